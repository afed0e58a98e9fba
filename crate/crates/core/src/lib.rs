//! First passage time moments for absorbing Markov chains whose transition
//! probabilities are estimated from observed counts.
//!
//! The exact mean and variance of the absorption time come from the
//! fundamental matrix `N = (I - U)^-1` of the transient block `U`:
//!
//! ```text
//! E[L] = v' N 1
//! V[L] = v' N (2N - I) 1 - E[L]^2
//! ```
//!
//! When `U` is itself an estimate built from finite counts, [`mc::run_mc`]
//! resamples each row from a multinomial with the observed sample size and
//! combines the per-replicate moments with the law of total variance.
//!
//! ```
//! use passage_core::{passage_time_moments, AbsorbingChainSpec, Matrix};
//!
//! let u = Matrix::from_rows(&[[0.5]]).unwrap();
//! let chain = AbsorbingChainSpec::unlabeled(u, vec![1.0]).unwrap();
//! let m = passage_time_moments(&chain).unwrap();
//! assert_eq!((m.mean, m.variance), (2.0, 2.0));
//! ```

pub mod chain;
pub mod error;
pub mod io;
pub mod linalg;
pub mod mc;
pub mod oracle;
pub mod sampling;
pub mod table;

pub use chain::{
    fundamental_matrix, passage_time_moments, unit_start, validate_spec, AbsorbingChainSpec,
    MomentPair, Violation,
};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use mc::{run_mc, sweep_sample_fraction, McConfig, McResult, SweepPoint};
pub use sampling::{sample_matrix, sample_row, RngStream};
pub use table::TransitionCountTable;
