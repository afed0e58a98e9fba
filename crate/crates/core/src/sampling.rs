//! Multinomial resampling of count rows.
//!
//! Every draw comes from an explicit [`RngStream`] keyed by `(seed, stream_id)`.
//! Monte Carlo replicates use their index as the stream id, so a replicate
//! draws the same numbers no matter which worker runs it.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::table::TransitionCountTable;

/// Tolerance on the total mass of a probability vector passed to [`sample_row`].
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

/// A reproducible random substream.
///
/// Backed by ChaCha8 seeded from `seed` with the cipher stream set to
/// `stream_id`, which gives 2^64 non-overlapping substreams per seed.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

fn check_probabilities(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidProbabilityVector("empty vector".into()));
    }
    if let Some((i, x)) = p
        .iter()
        .enumerate()
        .find(|(_, x)| !x.is_finite() || **x < 0.0)
    {
        return Err(Error::InvalidProbabilityVector(format!("entry {i} is {x}")));
    }
    let sum: f64 = p.iter().sum();
    if sum.is_nan() || (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
        return Err(Error::InvalidProbabilityVector(format!(
            "entries sum to {sum}"
        )));
    }
    Ok(())
}

/// Draws one Multinomial(`n`, `p`) count vector.
///
/// Uses the conditional-binomial decomposition: category `j` receives
/// Binomial(remaining draws, `p_j / sum_{l >= j} p_l`). Once the remaining
/// mass after `j` is exactly zero, `j` takes every remaining draw, so
/// zero-probability categories are never hit.
pub fn sample_row<R: RngCore + ?Sized>(p: &[f64], n: u64, rng: &mut R) -> Result<Vec<u64>> {
    check_probabilities(p)?;
    let mut suffix = vec![0.0; p.len() + 1];
    for j in (0..p.len()).rev() {
        suffix[j] = suffix[j + 1] + p[j];
    }
    let mut out = vec![0; p.len()];
    let mut remaining = n;
    for j in 0..p.len() {
        if remaining == 0 {
            break;
        }
        if suffix[j + 1] == 0.0 {
            out[j] = remaining;
            break;
        }
        let q = (p[j] / suffix[j]).clamp(0.0, 1.0);
        let x = if q == 0.0 {
            0
        } else {
            Binomial::new(remaining, q)
                .map_err(|e| Error::InvalidProbabilityVector(e.to_string()))?
                .sample(rng)
        };
        out[j] = x;
        remaining -= x;
    }
    Ok(out)
}

/// Sample size used for a row of `n` observations at fraction `f`:
/// `max(1, round(f * n))`.
pub fn effective_size(n: u64, fraction: f64) -> u64 {
    ((fraction * n as f64).round() as u64).max(1)
}

/// One realization of the transient block.
///
/// Each row keeps its observed proportions and is resampled with
/// `effective_size(n_i, fraction)` draws. The absorption column is dropped
/// and reappears as the row deficit.
pub fn sample_matrix<R: RngCore + ?Sized>(
    table: &TransitionCountTable,
    fraction: f64,
    rng: &mut R,
) -> Result<Matrix> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "sample fraction {fraction} outside (0, 1]"
        )));
    }
    let k = table.k();
    let mut u = Matrix::zeros(k, k);
    for i in 0..k {
        let n = effective_size(table.total(i), fraction);
        let counts = sample_row(&table.proportions(i), n, rng)?;
        let nf = n as f64;
        for (dst, &c) in u.row_mut(i).iter_mut().zip(&counts[..k]) {
            *dst = c as f64 / nf;
        }
    }
    Ok(u)
}
