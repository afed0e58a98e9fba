//! Exact first-passage-time moments via the fundamental matrix.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};

/// Tolerance for row sums of `U` and the total mass of the start vector.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Negative variances down to this value are treated as round-off and
/// clamped to zero; anything lower is an error.
pub const VARIANCE_CLAMP: f64 = 1e-9;

/// Slack allowed on the sign of fundamental-matrix entries.
pub const ENTRY_SLACK: f64 = 1e-9;

/// A chain restricted to its transient states.
///
/// Row `i` of the transient block holds one-step probabilities from state `i`
/// to each transient state; the deficit `1 - sum_j U[i][j]` is the probability
/// of being absorbed in one step from `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbingChainSpec {
    transient: Matrix,
    start: Vec<f64>,
    labels: Vec<String>,
}

impl AbsorbingChainSpec {
    /// Assembles a chain without checking any invariant. Use
    /// [`validate_spec`] or [`AbsorbingChainSpec::new`] for checked input.
    pub fn from_parts(transient: Matrix, start: Vec<f64>, labels: Vec<String>) -> Self {
        AbsorbingChainSpec {
            transient,
            start,
            labels,
        }
    }

    /// Assembles and validates a chain.
    pub fn new(transient: Matrix, start: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        let spec = Self::from_parts(transient, start, labels);
        let violations = validate_spec(&spec);
        if violations.is_empty() {
            Ok(spec)
        } else {
            Err(Error::InvalidSpec(violations))
        }
    }

    /// Validated chain with generated labels `s0, s1, ...`.
    pub fn unlabeled(transient: Matrix, start: Vec<f64>) -> Result<Self> {
        let labels = default_labels(transient.rows());
        Self::new(transient, start, labels)
    }

    pub fn k(&self) -> usize {
        self.transient.rows()
    }

    pub fn transient(&self) -> &Matrix {
        &self.transient
    }

    pub fn start(&self) -> &[f64] {
        &self.start
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// One-step absorption probability per state.
    pub fn absorption_probabilities(&self) -> Vec<f64> {
        self.transient
            .row_sums()
            .into_iter()
            .map(|s| (1.0 - s).max(0.0))
            .collect()
    }

    /// Same chain with a different start distribution.
    pub fn with_start(&self, start: Vec<f64>) -> Result<Self> {
        Self::new(self.transient.clone(), start, self.labels.clone())
    }

    /// Relabels states so that new state `i` is old state `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        AbsorbingChainSpec {
            transient: self.transient.permute_symmetric(perm),
            start: perm.iter().map(|&p| self.start[p]).collect(),
            labels: perm.iter().map(|&p| self.labels[p].clone()).collect(),
        }
    }
}

pub fn default_labels(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("s{i}")).collect()
}

/// Start vector with all mass on state `i`.
pub fn unit_start(k: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[i] = 1.0;
    v
}

/// Mean and variance of the passage time, in time steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub mean: f64,
    pub variance: f64,
}

impl MomentPair {
    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// A broken invariant of an [`AbsorbingChainSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotSquare { rows: usize, cols: usize },
    EntryOutOfRange { row: usize, col: usize, value: f64 },
    RowSumExceedsOne { row: usize, sum: f64 },
    StartLength { expected: usize, found: usize },
    LabelCount { expected: usize, found: usize },
    StartNegative { index: usize, value: f64 },
    StartSum { sum: f64 },
    AbsorptionUnreachable { row: usize },
    SolveFailed { reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSquare { rows, cols } => {
                write!(f, "transient matrix is {rows}x{cols}, not square")
            }
            Violation::EntryOutOfRange { row, col, value } => {
                write!(f, "row {row}, column {col}: entry {value} outside [0, 1]")
            }
            Violation::RowSumExceedsOne { row, sum } => {
                write!(f, "row {row}: row sum {sum} exceeds 1")
            }
            Violation::StartLength { expected, found } => {
                write!(
                    f,
                    "start distribution has {found} entries, expected {expected}"
                )
            }
            Violation::LabelCount { expected, found } => {
                write!(f, "{found} state labels given, expected {expected}")
            }
            Violation::StartNegative { index, value } => {
                write!(f, "start distribution entry {index} is negative ({value})")
            }
            Violation::StartSum { sum } => {
                write!(f, "start distribution sums to {sum}")
            }
            Violation::AbsorptionUnreachable { row } => write!(
                f,
                "row {row}: no absorption mass and no exit, absorption unreachable"
            ),
            Violation::SolveFailed { reason } => {
                write!(f, "fundamental matrix solve failed: {reason}")
            }
        }
    }
}

/// Lists every broken invariant of `spec`. An empty list means the chain is
/// valid.
pub fn validate_spec(spec: &AbsorbingChainSpec) -> Vec<Violation> {
    let u = &spec.transient;
    let mut out = Vec::new();
    if !u.is_square() {
        out.push(Violation::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
        return out;
    }
    let k = u.rows();
    for i in 0..k {
        for (j, &value) in u.row(i).iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                out.push(Violation::EntryOutOfRange {
                    row: i,
                    col: j,
                    value,
                });
            }
        }
        let sum: f64 = u.row(i).iter().sum();
        if sum > 1.0 + SUM_TOLERANCE {
            out.push(Violation::RowSumExceedsOne { row: i, sum });
        }
    }
    if spec.labels.len() != k {
        out.push(Violation::LabelCount {
            expected: k,
            found: spec.labels.len(),
        });
    }
    if spec.start.len() != k {
        out.push(Violation::StartLength {
            expected: k,
            found: spec.start.len(),
        });
    } else {
        for (index, &value) in spec.start.iter().enumerate() {
            if value.is_nan() || value < 0.0 {
                out.push(Violation::StartNegative { index, value });
            }
        }
        let sum: f64 = spec.start.iter().sum();
        if sum.is_nan() || (sum - 1.0).abs() > SUM_TOLERANCE {
            out.push(Violation::StartSum { sum });
        }
    }

    let reaches = absorption_reachability(u);
    for (row, ok) in reaches.iter().enumerate() {
        if !ok {
            out.push(Violation::AbsorptionUnreachable { row });
        }
    }
    if out.is_empty() {
        match fundamental_matrix(spec) {
            Ok(_) => {}
            Err(e) => out.push(Violation::SolveFailed {
                reason: e.to_string(),
            }),
        }
    }
    out
}

/// For each state, whether a path of positive-probability transitions leads
/// to a state with positive absorption mass.
fn absorption_reachability(u: &Matrix) -> Vec<bool> {
    let k = u.rows();
    let mut reaches: Vec<bool> = u
        .row_sums()
        .iter()
        .map(|s| 1.0 - s > SUM_TOLERANCE)
        .collect();
    loop {
        let mut changed = false;
        for i in 0..k {
            if !reaches[i] && u.row(i).iter().zip(&reaches).any(|(&p, &r)| p > 0.0 && r) {
                reaches[i] = true;
                changed = true;
            }
        }
        if !changed {
            return reaches;
        }
    }
}

fn identity_minus(u: &Matrix) -> Matrix {
    let k = u.rows();
    let mut a = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            a[(i, j)] = if i == j { 1.0 } else { 0.0 } - u[(i, j)];
        }
    }
    a
}

/// `N = (I - U)^-1`, computed column by column from an LU factorization.
pub fn fundamental_matrix(spec: &AbsorbingChainSpec) -> Result<Matrix> {
    fundamental_of(spec.transient())
}

pub fn fundamental_of(u: &Matrix) -> Result<Matrix> {
    let lu = Lu::factor(identity_minus(u))?;
    let n = lu.inverse();
    if n.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    for i in 0..n.rows() {
        for j in 0..n.cols() {
            let x = n[(i, j)];
            if x < -ENTRY_SLACK || (i == j && x < 1.0 - ENTRY_SLACK) {
                return Err(Error::SingularSystem {
                    column: j,
                    pivot: x,
                });
            }
        }
    }
    Ok(n)
}

/// Mean and variance of the absorption time of `spec`.
pub fn passage_time_moments(spec: &AbsorbingChainSpec) -> Result<MomentPair> {
    moments_of(spec.transient(), spec.start())
}

/// Passage-time moments from a transient block and start vector.
///
/// With `m = N 1` and `t = N m`, the mean is `v'm` and the variance is
/// `v'(2t - m) - (v'm)^2`. Both vectors come from two solves against one
/// factorization of `I - U`.
pub fn moments_of(u: &Matrix, start: &[f64]) -> Result<MomentPair> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch {
            expected: u.rows(),
            found: u.cols(),
        });
    }
    if start.len() != u.rows() {
        return Err(Error::DimensionMismatch {
            expected: u.rows(),
            found: start.len(),
        });
    }
    let lu = Lu::factor(identity_minus(u))?;
    let ones = vec![1.0; u.rows()];
    let m = lu.solve(&ones);
    let t = lu.solve(&m);
    if m.iter().chain(&t).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mean: f64 = start.iter().zip(&m).map(|(v, m)| v * m).sum();
    let second: f64 = start
        .iter()
        .zip(m.iter().zip(&t))
        .map(|(v, (m, t))| v * (2.0 * t - m))
        .sum();
    let mut variance = second - mean * mean;
    if variance < 0.0 {
        if variance < -VARIANCE_CLAMP {
            return Err(Error::NegativeVariance(variance));
        }
        variance = 0.0;
    }
    Ok(MomentPair { mean, variance })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(rows: &[&[f64]], start: Vec<f64>) -> AbsorbingChainSpec {
        AbsorbingChainSpec::from_parts(
            Matrix::from_rows(rows).unwrap(),
            start,
            default_labels(rows.len()),
        )
    }

    #[test]
    fn scalar_fundamental() {
        let n = fundamental_matrix(&chain(&[&[0.5]], vec![1.0])).unwrap();
        assert_eq!(n[(0, 0)], 2.0);
    }

    #[test]
    fn zero_transient_block_gives_identity() {
        for k in 1..6 {
            let spec =
                AbsorbingChainSpec::unlabeled(Matrix::zeros(k, k), unit_start(k, 0)).unwrap();
            assert_eq!(fundamental_matrix(&spec).unwrap(), Matrix::identity(k));
            let m = passage_time_moments(&spec).unwrap();
            assert_eq!(
                m,
                MomentPair {
                    mean: 1.0,
                    variance: 0.0
                }
            );
        }
    }

    #[test]
    fn geometric_against_brute_force_sum() {
        // P(L = t) = 0.5^t on t = 1, 2, ...
        let (mut m1, mut m2) = (0.0, 0.0);
        for t in 1..=200 {
            let p = 0.5f64.powi(t);
            m1 += t as f64 * p;
            m2 += (t as f64).powi(2) * p;
        }
        let m = passage_time_moments(&chain(&[&[0.5]], vec![1.0])).unwrap();
        assert!((m.mean - m1).abs() < 1e-12 && (m.mean - 2.0).abs() < 1e-12);
        assert!((m.variance - (m2 - m1 * m1)).abs() < 1e-12);
        assert!((m.variance - 2.0).abs() < 1e-12);
    }

    #[test]
    fn closed_state_is_singular() {
        let spec = chain(&[&[1.0]], vec![1.0]);
        assert!(matches!(
            passage_time_moments(&spec),
            Err(Error::SingularSystem { .. })
        ));
        assert!(matches!(
            fundamental_matrix(&spec),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn validation_examples() {
        assert!(validate_spec(&chain(&[&[0.5]], vec![1.0])).is_empty());

        let v = validate_spec(&chain(&[&[1.0]], vec![1.0]));
        assert_eq!(v, vec![Violation::AbsorptionUnreachable { row: 0 }]);
        assert!(v[0].to_string().contains("row 0"));

        let v = validate_spec(&chain(&[&[0.1, 0.1], &[0.1, 0.1]], vec![0.6, 0.6]));
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::StartSum { sum } if (sum - 1.2).abs() < 1e-15));
    }

    #[test]
    fn validation_catches_bad_entries() {
        let v = validate_spec(&chain(&[&[-0.1, 0.7], &[0.6, 0.6]], vec![1.0, 0.0]));
        assert!(v.contains(&Violation::EntryOutOfRange {
            row: 0,
            col: 0,
            value: -0.1
        }));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::RowSumExceedsOne { row: 1, .. })));

        let v = validate_spec(&chain(&[&[0.1]], vec![1.0, 0.0]));
        assert!(v.contains(&Violation::StartLength {
            expected: 1,
            found: 2
        }));

        let v = validate_spec(&chain(&[&[0.1]], vec![-1.0]));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::StartNegative { .. })));
    }

    #[test]
    fn closed_class_unreachable_even_if_entered_later() {
        // state 0 leaks into the closed pair {1, 2}
        let spec = chain(
            &[&[0.0, 0.5, 0.0], &[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0]],
            vec![1.0, 0.0, 0.0],
        );
        let v = validate_spec(&spec);
        assert_eq!(
            v,
            vec![
                Violation::AbsorptionUnreachable { row: 1 },
                Violation::AbsorptionUnreachable { row: 2 }
            ]
        );
    }

    #[test]
    fn tiny_negative_variance_is_clamped() {
        // U = 0: second moment 1, mean 1, exact zero
        let m = moments_of(&Matrix::zeros(3, 3), &[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(m.variance, 0.0);
        assert!(m.mean >= 1.0);
    }

    #[test]
    fn start_length_mismatch_is_an_error() {
        assert!(matches!(
            moments_of(&Matrix::zeros(2, 2), &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
