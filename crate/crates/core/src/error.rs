use thiserror::Error;

use crate::chain::Violation;

/// Errors produced by the numerical and Monte Carlo layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `I - U` has a pivot below the singularity threshold: some transient
    /// state has no path to absorption.
    #[error("singular system: pivot {pivot:e} at column {column} (absorption unreachable)")]
    SingularSystem { column: usize, pivot: f64 },

    #[error("non-finite value in fundamental matrix solve")]
    NonFinite,

    #[error("variance {0:e} is negative beyond round-off tolerance")]
    NegativeVariance(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilityVector(String),

    #[error("invalid chain: {}", join_violations(.0))]
    InvalidSpec(Vec<Violation>),

    #[error("invalid count table: {}", .0.join("; "))]
    InvalidTable(Vec<String>),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("trajectory did not absorb within {0} steps")]
    TrajectoryOverflow(u64),

    #[error("{skipped} of {replicates} replicates failed, above the allowed ratio {max_ratio}")]
    TooManySkips {
        skipped: usize,
        replicates: usize,
        max_ratio: f64,
    },

    #[error("only {0} replicates succeeded; at least 2 are needed")]
    InsufficientReplicates(usize),

    #[error("at sample fraction {fraction}: {source}")]
    AtFraction {
        fraction: f64,
        #[source]
        source: Box<Error>,
    },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
