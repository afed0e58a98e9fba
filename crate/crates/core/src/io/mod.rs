//! Text input formats.
//!
//! Two line-oriented formats are understood; `#` starts a comment anywhere on
//! a line and blank lines are ignored.
//!
//! **Generic counts**, tabular form. The header names the destination states
//! in order, then `absorb`, then optionally `n`:
//!
//! ```text
//! state, A, B, absorb, n
//! A, 5, 3, 2, 10
//! B, 0, 4, 6, 10
//! ```
//!
//! **Generic counts**, keyed form. States are ordered as their rows appear;
//! missing destinations count as zero:
//!
//! ```text
//! A: to_A=5, to_B=3, absorb=2
//! B: to_B=4, absorb=6, n=10
//! ```
//!
//! **Stage table**, one stage per line with graduation, death and stay counts
//! and the row total. Counts may be written as `x/n` fractions:
//!
//! ```text
//! stage, G, R, P, n
//! Egg, 139/676, 59/676, 478/676, 676
//! ```

mod generic;
mod stage;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::chain::{unit_start, validate_spec, Violation, SUM_TOLERANCE};
use crate::table::TransitionCountTable;

pub use generic::{emit_generic, parse_counts};
pub use stage::{parse_stages, stage_table_to_counts, Stage, StageTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),
}

impl InputError {
    fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        InputError::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Generic,
    Stage,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "generic" | "counts" => Ok(Format::Generic),
            "stage" | "stages" => Ok(Format::Stage),
            other => Err(format!("unknown input format {other:?}")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Generic => "generic",
            Format::Stage => "stage",
        })
    }
}

/// Parses `text` in the given format into a validated count table.
pub fn read_table(text: &str, format: Format) -> Result<TransitionCountTable, InputError> {
    match format {
        Format::Generic => parse_counts(text),
        Format::Stage => stage_table_to_counts(&parse_stages(text)?),
    }
}

/// Resolves a start argument: either a state label, or comma-separated
/// weights, one per state, summing to 1.
pub fn parse_start(arg: &str, labels: &[String]) -> Result<Vec<f64>, InputError> {
    let arg = arg.trim();
    if let Some(i) = labels.iter().position(|l| l == arg) {
        return Ok(unit_start(labels.len(), i));
    }
    let mut weights = Vec::new();
    for field in split_fields(arg) {
        let w: f64 = field.text.parse().map_err(|_| {
            InputError::parse(
                1,
                field.column,
                format!("{:?} is neither a state label nor a weight", field.text),
            )
        })?;
        weights.push(w);
    }
    let mut problems = Vec::new();
    if weights.len() != labels.len() {
        problems.push(format!(
            "start has {} weights for {} states",
            weights.len(),
            labels.len()
        ));
    }
    if weights.iter().any(|w| w.is_nan() || *w < 0.0) {
        problems.push("start weights must be nonnegative".to_string());
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        problems.push(format!("start weights sum to {sum}"));
    }
    if problems.is_empty() {
        Ok(weights)
    } else {
        Err(InputError::Validation(problems))
    }
}

/// Structural check shared by both formats: every state must be able to
/// reach absorption under the point estimate.
fn check_absorbing(table: &TransitionCountTable) -> Result<(), InputError> {
    let chain = crate::chain::AbsorbingChainSpec::from_parts(
        table.point_estimate(),
        unit_start(table.k(), 0),
        table.labels().to_vec(),
    );
    let problems: Vec<String> = validate_spec(&chain)
        .into_iter()
        .map(|v| match v {
            Violation::AbsorptionUnreachable { row } => format!(
                "state {} ({row}): no observed deaths or exits, absorption unreachable",
                table.labels()[row]
            ),
            other => other.to_string(),
        })
        .collect();
    if problems.is_empty() {
        Ok(())
    } else {
        Err(InputError::Validation(problems))
    }
}

/// A comma-separated field with its 1-based column.
#[derive(Debug, Clone, Copy)]
struct Field<'a> {
    text: &'a str,
    column: usize,
}

fn split_fields(line: &str) -> Vec<Field<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    for piece in line.split(',') {
        let lead = piece.len() - piece.trim_start().len();
        out.push(Field {
            text: piece.trim(),
            column: start + lead + 1,
        });
        start += piece.len() + 1;
    }
    out
}

/// Non-blank lines with comments removed, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("");
        (!line.trim().is_empty()).then_some((i + 1, line))
    })
}

fn parse_count(field: Field<'_>, line: usize) -> Result<u64, InputError> {
    field.text.parse().map_err(|_| {
        InputError::parse(
            line,
            field.column,
            format!(
                "expected a nonnegative integer count, found {:?}",
                field.text
            ),
        )
    })
}

fn check_label(field: Field<'_>, line: usize) -> Result<String, InputError> {
    if field.text.is_empty() {
        return Err(InputError::parse(line, field.column, "empty state label"));
    }
    Ok(field.text.to_string())
}

fn into_validation(e: crate::error::Error) -> InputError {
    match e {
        crate::error::Error::InvalidTable(p) => InputError::Validation(p),
        other => InputError::Validation(vec![other.to_string()]),
    }
}
