//! Monte Carlo propagation of count-sampling uncertainty.
//!
//! Each replicate resamples every row of the count table, recomputes the
//! exact passage-time moments of the realized chain, and records them. The
//! replicate means and variances are then combined with the law of total
//! variance:
//!
//! ```text
//! V[L] = E[ V[L | U*] ] + V[ E[L | U*] ]
//! ```

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{moments_of, MomentPair, SUM_TOLERANCE};
use crate::error::{Error, Result};
use crate::sampling::{sample_matrix, RngStream};
use crate::table::TransitionCountTable;

/// Bits reserved for the replicate index inside a stream id. Sweeps place the
/// fraction index above them.
const REPLICATE_BITS: u32 = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub replicates: usize,
    pub seed: u64,
    /// Share of each row's observations used when resampling, in (0, 1].
    pub fraction: f64,
    /// Largest tolerated share of failed replicates, in [0, 1).
    pub max_skip_ratio: f64,
    /// Worker threads; `None` uses the global rayon pool. Results do not
    /// depend on this value.
    pub workers: Option<usize>,
    /// Keep the per-replicate moments in [`McResult::per_replicate`].
    pub retain_replicates: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            replicates: 100_000,
            seed: 42,
            fraction: 1.0,
            max_skip_ratio: 0.01,
            workers: None,
            retain_replicates: false,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(Error::InvalidConfig("replicates must be at least 1".into()));
        }
        if self.replicates as u64 >= 1 << REPLICATE_BITS {
            return Err(Error::InvalidConfig(format!(
                "at most 2^{REPLICATE_BITS} replicates are supported"
            )));
        }
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "fraction {} outside (0, 1]",
                self.fraction
            )));
        }
        if !(self.max_skip_ratio >= 0.0 && self.max_skip_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "max_skip_ratio {} outside [0, 1)",
                self.max_skip_ratio
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidConfig("workers must be positive".into()));
        }
        Ok(())
    }
}

/// Per-replicate moments, in replicate order, successful replicates only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateTrace {
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McResult {
    #[serde(rename = "mean_L")]
    pub mean_l: f64,
    #[serde(rename = "var_L")]
    pub var_l: f64,
    /// Estimate of E[V[L | U*]]: average of the replicate variances.
    pub mean_of_variances: f64,
    /// Estimate of V[E[L | U*]]: population variance of the replicate means.
    pub variance_of_means: f64,
    pub replicates_used: usize,
    pub replicates_skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_replicate: Option<ReplicateTrace>,
}

impl McResult {
    pub fn sd_l(&self) -> f64 {
        self.var_l.sqrt()
    }

    pub fn moments(&self) -> MomentPair {
        MomentPair {
            mean: self.mean_l,
            variance: self.var_l,
        }
    }
}

fn check_start(table: &TransitionCountTable, start: &[f64]) -> Result<()> {
    if start.len() != table.k() {
        return Err(Error::DimensionMismatch {
            expected: table.k(),
            found: start.len(),
        });
    }
    if start.iter().any(|x| x.is_nan() || *x < 0.0) {
        return Err(Error::InvalidConfig(
            "start distribution has a negative entry".into(),
        ));
    }
    let sum: f64 = start.iter().sum();
    if sum.is_nan() || (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidConfig(format!(
            "start distribution sums to {sum}"
        )));
    }
    Ok(())
}

/// Runs the resampling procedure for `cfg.replicates` replicates.
pub fn run_mc(table: &TransitionCountTable, start: &[f64], cfg: &McConfig) -> Result<McResult> {
    run_mc_at(table, start, cfg, 0)
}

fn run_mc_at(
    table: &TransitionCountTable,
    start: &[f64],
    cfg: &McConfig,
    stream_base: u64,
) -> Result<McResult> {
    cfg.validate()?;
    check_start(table, start)?;

    let replicate = |r: usize| -> Result<Option<MomentPair>> {
        let mut rng = RngStream::new(cfg.seed, stream_base + r as u64);
        let u = sample_matrix(table, cfg.fraction, &mut rng)?;
        Ok(moments_of(&u, start).ok())
    };
    let run = || -> Result<Vec<Option<MomentPair>>> {
        (0..cfg.replicates).into_par_iter().map(replicate).collect()
    };
    let outcomes = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(run)?,
        None => run()?,
    };

    let (means, variances): (Vec<f64>, Vec<f64>) = outcomes
        .iter()
        .flatten()
        .map(|m| (m.mean, m.variance))
        .unzip();
    let used = means.len();
    let skipped = cfg.replicates - used;
    if skipped as f64 > cfg.max_skip_ratio * cfg.replicates as f64 {
        return Err(Error::TooManySkips {
            skipped,
            replicates: cfg.replicates,
            max_ratio: cfg.max_skip_ratio,
        });
    }
    if used < 2 {
        return Err(Error::InsufficientReplicates(used));
    }

    let mean_l = mean(&means);
    let mean_of_variances = mean(&variances);
    let variance_of_means = population_variance(&means, mean_l);
    Ok(McResult {
        mean_l,
        var_l: mean_of_variances + variance_of_means,
        mean_of_variances,
        variance_of_means,
        replicates_used: used,
        replicates_skipped: skipped,
        per_replicate: cfg
            .retain_replicates
            .then_some(ReplicateTrace { means, variances }),
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn population_variance(xs: &[f64], mean: f64) -> f64 {
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub fraction: f64,
    pub result: McResult,
    /// Relative change of the standard deviation against the `f = 1` run, in
    /// percent.
    pub sd_increase_percent: f64,
}

/// Runs [`run_mc`] at each sample fraction, reusing the observed proportions.
///
/// The `f = 1` baseline is prepended when absent. Fraction `i` of the final
/// list draws from streams `i * 2^40 + replicate`, so the baseline at
/// position 0 reproduces a plain [`run_mc`] call.
pub fn sweep_sample_fraction(
    table: &TransitionCountTable,
    start: &[f64],
    cfg: &McConfig,
    fractions: &[f64],
) -> Result<Vec<SweepPoint>> {
    if fractions.is_empty() {
        return Err(Error::InvalidConfig("no sample fractions given".into()));
    }
    if let Some(f) = fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
        return Err(Error::InvalidConfig(format!("fraction {f} outside (0, 1]")));
    }
    let mut all = Vec::with_capacity(fractions.len() + 1);
    if !fractions.contains(&1.0) {
        all.push(1.0);
    }
    all.extend_from_slice(fractions);

    let mut results = Vec::with_capacity(all.len());
    for (i, &fraction) in all.iter().enumerate() {
        let cfg = McConfig {
            fraction,
            ..cfg.clone()
        };
        let result = run_mc_at(table, start, &cfg, (i as u64) << REPLICATE_BITS).map_err(|e| {
            Error::AtFraction {
                fraction,
                source: Box::new(e),
            }
        })?;
        results.push((fraction, result));
    }

    let baseline_sd = results
        .iter()
        .find(|(f, _)| *f == 1.0)
        .map(|(_, r)| r.sd_l())
        .expect("baseline fraction is always present");
    Ok(results
        .into_iter()
        .map(|(fraction, result)| SweepPoint {
            fraction,
            sd_increase_percent: 100.0 * (result.sd_l() - baseline_sd) / baseline_sd,
            result,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn absorbing_only(k: usize) -> TransitionCountTable {
        let rows = (0..k)
            .map(|i| {
                let mut r = vec![0; k + 1];
                r[k] = 10 + i as u64;
                r
            })
            .collect();
        TransitionCountTable::new(crate::chain::default_labels(k), rows).unwrap()
    }

    fn cfg(replicates: usize) -> McConfig {
        McConfig {
            replicates,
            ..McConfig::default()
        }
    }

    #[test]
    fn pure_absorption_is_one_step() {
        let t = absorbing_only(3);
        let r = run_mc(&t, &[1.0, 0.0, 0.0], &cfg(50)).unwrap();
        assert_eq!(r.mean_l, 1.0);
        assert_eq!(r.var_l, 0.0);
        assert_eq!(r.replicates_used, 50);
        assert_eq!(r.replicates_skipped, 0);
    }

    #[test]
    fn config_validation() {
        let t = absorbing_only(1);
        for bad in [
            McConfig {
                replicates: 0,
                ..cfg(1)
            },
            McConfig {
                fraction: 0.0,
                ..cfg(10)
            },
            McConfig {
                fraction: 1.1,
                ..cfg(10)
            },
            McConfig {
                max_skip_ratio: 1.0,
                ..cfg(10)
            },
            McConfig {
                workers: Some(0),
                ..cfg(10)
            },
        ] {
            assert!(matches!(
                run_mc(&t, &[1.0], &bad),
                Err(Error::InvalidConfig(_))
            ));
        }
        assert!(run_mc(&t, &[0.5], &cfg(10)).is_err());
        assert!(run_mc(&t, &[1.0, 0.0], &cfg(10)).is_err());
    }

    #[test]
    fn single_replicate_is_insufficient() {
        let t = absorbing_only(1);
        assert_eq!(
            run_mc(&t, &[1.0], &cfg(1)),
            Err(Error::InsufficientReplicates(1))
        );
    }

    #[test]
    fn frequent_failures_are_reported() {
        // one observation, staying with probability 0.5: half the replicates
        // draw a closed state
        let t = TransitionCountTable::new(vec!["a".into()], vec![vec![1, 1]]).unwrap();
        let c = McConfig {
            fraction: 0.5,
            ..cfg(1000)
        };
        match run_mc(&t, &[1.0], &c) {
            Err(Error::TooManySkips {
                skipped,
                replicates,
                ..
            }) => {
                assert_eq!(replicates, 1000);
                assert!(skipped > 400 && skipped < 600, "{skipped}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let lenient = McConfig {
            max_skip_ratio: 0.9,
            ..c
        };
        let r = run_mc(&t, &[1.0], &lenient).unwrap();
        assert_eq!(r.replicates_used + r.replicates_skipped, 1000);
        // surviving replicates all have U* = 0
        assert_eq!(r.mean_l, 1.0);
    }

    #[test]
    fn sweep_prepends_baseline() {
        let t = TransitionCountTable::new(vec!["a".into()], vec![vec![30, 70]]).unwrap();
        let pts = sweep_sample_fraction(&t, &[1.0], &cfg(500), &[0.5]).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].fraction, 1.0);
        assert_eq!(pts[0].sd_increase_percent, 0.0);
        assert_eq!(pts[0].result, run_mc(&t, &[1.0], &cfg(500)).unwrap());

        let only = sweep_sample_fraction(&t, &[1.0], &cfg(500), &[1.0]).unwrap();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].sd_increase_percent, 0.0);
    }

    #[test]
    fn sweep_annotates_failures() {
        let t = TransitionCountTable::new(vec!["a".into()], vec![vec![1, 1]]).unwrap();
        let err = sweep_sample_fraction(&t, &[1.0], &cfg(200), &[0.5]).unwrap_err();
        assert!(matches!(err, Error::AtFraction { fraction, .. } if fraction == 1.0));
        assert!(sweep_sample_fraction(&t, &[1.0], &cfg(10), &[]).is_err());
        assert!(sweep_sample_fraction(&t, &[1.0], &cfg(10), &[0.0]).is_err());
    }
}
