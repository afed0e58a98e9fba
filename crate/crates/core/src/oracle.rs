//! Independent checks on the fundamental-matrix moments: direct trajectory
//! simulation and exact summation of the truncated passage-time distribution.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{AbsorbingChainSpec, MomentPair};
use crate::error::{Error, Result};
use crate::sampling::RngStream;

/// Trajectories longer than this are reported as non-absorbing.
pub const MAX_TRAJECTORY_STEPS: u64 = 10_000_000;

/// Default tail mass below which a truncated sum is accepted.
pub const DEFAULT_TAIL_TARGET: f64 = 1e-9;

const MAX_HORIZON: usize = 1_000_000;

fn pick(weights: &[f64], mut u: f64) -> Option<usize> {
    for (j, &w) in weights.iter().enumerate() {
        if u < w {
            return Some(j);
        }
        u -= w;
    }
    None
}

/// Runs one chain path from a start state drawn from `v` and returns the
/// number of steps taken up to and including the absorbing one.
pub fn simulate_trajectory<R: Rng + ?Sized>(spec: &AbsorbingChainSpec, rng: &mut R) -> Result<u64> {
    let u = spec.transient();
    let start = spec.start();
    let mut state = pick(start, rng.random::<f64>()).unwrap_or(start.len() - 1);
    for step in 1..=MAX_TRAJECTORY_STEPS {
        match pick(u.row(state), rng.random::<f64>()) {
            Some(next) => state = next,
            None => return Ok(step),
        }
    }
    Err(Error::TrajectoryOverflow(MAX_TRAJECTORY_STEPS))
}

/// Sample statistics of simulated passage times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub trajectories: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub mean_std_error: f64,
    /// Large-sample standard error of the sample variance,
    /// `sqrt((m4 - s^4) / n)`.
    pub variance_std_error: f64,
}

/// Simulates `trajectories` independent paths. Path `i` uses stream `i` of
/// `seed`, so the summary does not depend on the thread count.
pub fn simulate_many(
    spec: &AbsorbingChainSpec,
    trajectories: usize,
    seed: u64,
) -> Result<TrajectorySummary> {
    if trajectories < 2 {
        return Err(Error::InvalidConfig(
            "at least 2 trajectories are needed".into(),
        ));
    }
    let lengths: Vec<u64> = (0..trajectories)
        .into_par_iter()
        .map(|i| simulate_trajectory(spec, &mut RngStream::new(seed, i as u64)))
        .collect::<Result<_>>()?;
    let n = trajectories as f64;
    let mean = lengths.iter().map(|&l| l as f64).sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &l in &lengths {
        let d = l as f64 - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    let variance = m2 / (n - 1.0);
    let pop_var = m2 / n;
    m4 /= n;
    Ok(TrajectorySummary {
        trajectories,
        mean,
        variance,
        mean_std_error: (variance / n).sqrt(),
        variance_std_error: ((m4 - pop_var * pop_var).max(0.0) / n).sqrt(),
    })
}

/// `P(L = t)` for `t = 1..=horizon`, plus the mass `v' U^horizon 1` left
/// beyond the horizon.
pub fn passage_time_pmf(spec: &AbsorbingChainSpec, horizon: usize) -> (Vec<f64>, f64) {
    let u = spec.transient();
    let exit = spec.absorption_probabilities();
    let mut w = spec.start().to_vec();
    let mut pmf = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        pmf.push(w.iter().zip(&exit).map(|(a, b)| a * b).sum());
        w = u.vec_mul(&w);
    }
    (pmf, w.iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedMoments {
    pub moments: MomentPair,
    pub horizon: usize,
    /// Probability mass not yet absorbed at the horizon.
    pub tail_bound: f64,
}

/// Mean and variance of the passage-time distribution cut off at `horizon`.
/// Meaningful as a reference only when `tail_bound` is negligible. Intended
/// for small chains (k up to about 8).
pub fn truncated_sum_moments(spec: &AbsorbingChainSpec, horizon: usize) -> TruncatedMoments {
    let (pmf, tail_bound) = passage_time_pmf(spec, horizon.max(1));
    let (mut m1, mut m2) = (0.0, 0.0);
    for (t, p) in pmf.iter().enumerate() {
        let t = (t + 1) as f64;
        m1 += t * p;
        m2 += t * t * p;
    }
    TruncatedMoments {
        moments: MomentPair {
            mean: m1,
            variance: m2 - m1 * m1,
        },
        horizon: pmf.len(),
        tail_bound,
    }
}

/// Doubles the horizon from 64 until the tail mass drops below `tail_target`
/// or the horizon passes one million steps.
pub fn adaptive_truncated_moments(spec: &AbsorbingChainSpec, tail_target: f64) -> TruncatedMoments {
    let mut horizon = 64;
    loop {
        let tm = truncated_sum_moments(spec, horizon);
        if tm.tail_bound < tail_target || horizon > MAX_HORIZON {
            return tm;
        }
        horizon *= 2;
    }
}
