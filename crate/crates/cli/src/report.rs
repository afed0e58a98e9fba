//! Rendering of results. Human tables use three decimals; JSON and CSV carry
//! full precision.

use std::fmt::Write;

use passage_core::oracle::TrajectorySummary;
use passage_core::{McResult, MomentPair, SweepPoint};
use serde::Serialize;

use crate::cli::OutputFormat;

#[derive(Debug, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub sd: f64,
}

impl From<MomentPair> for Moments {
    fn from(m: MomentPair) -> Self {
        Moments {
            mean: m.mean,
            variance: m.variance,
            sd: m.sd(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AnalyticReport {
    pub start: Vec<f64>,
    #[serde(flatten)]
    pub moments: Moments,
}

#[derive(Debug, Serialize)]
pub struct McReport {
    pub seed: u64,
    pub fraction: f64,
    pub replicates: usize,
    #[serde(rename = "mean_L")]
    pub mean_l: f64,
    #[serde(rename = "var_L")]
    pub var_l: f64,
    #[serde(rename = "sd_L")]
    pub sd_l: f64,
    pub mean_of_variances: f64,
    pub variance_of_means: f64,
    pub replicates_used: usize,
    pub replicates_skipped: usize,
    pub analytic: Moments,
}

impl McReport {
    pub fn new(seed: u64, fraction: f64, r: &McResult, analytic: MomentPair) -> Self {
        McReport {
            seed,
            fraction,
            replicates: r.replicates_used + r.replicates_skipped,
            mean_l: r.mean_l,
            var_l: r.var_l,
            sd_l: r.sd_l(),
            mean_of_variances: r.mean_of_variances,
            variance_of_means: r.variance_of_means,
            replicates_used: r.replicates_used,
            replicates_skipped: r.replicates_skipped,
            analytic: analytic.into(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub f: f64,
    #[serde(rename = "mean_L")]
    pub mean_l: f64,
    #[serde(rename = "sd_L")]
    pub sd_l: f64,
    pub sd_increase_percent: f64,
    pub skipped: usize,
}

impl From<&SweepPoint> for SweepRow {
    fn from(p: &SweepPoint) -> Self {
        SweepRow {
            f: p.fraction,
            mean_l: p.result.mean_l,
            sd_l: p.result.sd_l(),
            sd_increase_percent: p.sd_increase_percent,
            skipped: p.result.replicates_skipped,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub seed: u64,
    #[serde(flatten)]
    pub summary: TrajectorySummary,
    pub analytic: Moments,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn analytic(r: &AnalyticReport, start_label: &str, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(r),
        OutputFormat::Csv => format!(
            "mean,variance,sd\n{},{},{}\n",
            r.moments.mean, r.moments.variance, r.moments.sd
        ),
        OutputFormat::Table => {
            let mut s = String::new();
            writeln!(s, "Passage time from {start_label}").unwrap();
            writeln!(s, "{:<20}{:>12.3}", "Expected value", r.moments.mean).unwrap();
            writeln!(s, "{:<20}{:>12.3}", "Standard deviation", r.moments.sd).unwrap();
            writeln!(s, "{:<20}{:>12.3}", "Variance", r.moments.variance).unwrap();
            s
        }
    }
}

pub fn montecarlo(r: &McReport, start_label: &str, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(r),
        OutputFormat::Csv => format!(
            "seed,fraction,replicates,mean_L,var_L,sd_L,mean_of_variances,variance_of_means,replicates_used,replicates_skipped,analytic_mean,analytic_sd\n\
             {},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.seed,
            r.fraction,
            r.replicates,
            r.mean_l,
            r.var_l,
            r.sd_l,
            r.mean_of_variances,
            r.variance_of_means,
            r.replicates_used,
            r.replicates_skipped,
            r.analytic.mean,
            r.analytic.sd,
        ),
        OutputFormat::Table => {
            let mut s = String::new();
            writeln!(
                s,
                "Passage time from {start_label}: {} replicates, seed {}, sample fraction {}",
                r.replicates, r.seed, r.fraction
            )
            .unwrap();
            writeln!(s, "{:<20}{:>12}{:>14}", "", "Calculated", "Monte Carlo").unwrap();
            writeln!(s, "{:<20}{:>12.3}{:>14.3}", "Expected value", r.analytic.mean, r.mean_l).unwrap();
            writeln!(s, "{:<20}{:>12.3}{:>14.3}", "Standard deviation", r.analytic.sd, r.sd_l).unwrap();
            writeln!(s).unwrap();
            writeln!(s, "{:<20}{:>12.3}", "E[V[L|U]]", r.mean_of_variances).unwrap();
            writeln!(s, "{:<20}{:>12.3}", "V[E[L|U]]", r.variance_of_means).unwrap();
            writeln!(
                s,
                "{:<20}{:>12}",
                "Skipped replicates", r.replicates_skipped
            )
            .unwrap();
            s
        }
    }
}

pub fn sweep(rows: &[SweepRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(&rows),
        OutputFormat::Csv => {
            let mut s = String::from("f,mean_L,sd_L,sd_increase_percent,skipped\n");
            for r in rows {
                writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.f, r.mean_l, r.sd_l, r.sd_increase_percent, r.skipped
                )
                .unwrap();
            }
            s
        }
        OutputFormat::Table => {
            let mut s = format!(
                "{:>8}{:>12}{:>12}{:>14}{:>10}\n",
                "f", "mean", "sd", "sd increase %", "skipped"
            );
            for r in rows {
                writeln!(
                    s,
                    "{:>8}{:>12.3}{:>12.3}{:>14.3}{:>10}",
                    r.f, r.mean_l, r.sd_l, r.sd_increase_percent, r.skipped
                )
                .unwrap();
            }
            s
        }
    }
}

pub fn simulate(r: &SimulateReport, start_label: &str, format: OutputFormat) -> String {
    let t = &r.summary;
    match format {
        OutputFormat::Json => json(r),
        OutputFormat::Csv => format!(
            "trajectories,mean,variance,mean_std_error,variance_std_error,analytic_mean,analytic_variance\n{},{},{},{},{},{},{}\n",
            t.trajectories, t.mean, t.variance, t.mean_std_error, t.variance_std_error, r.analytic.mean, r.analytic.variance
        ),
        OutputFormat::Table => {
            let mut s = String::new();
            writeln!(s, "Passage time from {start_label}: {} trajectories, seed {}", t.trajectories, r.seed).unwrap();
            writeln!(s, "{:<20}{:>12}{:>14}{:>12}", "", "Calculated", "Simulated", "Std. error").unwrap();
            writeln!(s, "{:<20}{:>12.3}{:>14.3}{:>12.3}", "Expected value", r.analytic.mean, t.mean, t.mean_std_error).unwrap();
            writeln!(s, "{:<20}{:>12.3}{:>14.3}{:>12.3}", "Variance", r.analytic.variance, t.variance, t.variance_std_error).unwrap();
            s
        }
    }
}
