use std::collections::HashSet;

use super::{
    check_absorbing, check_label, content_lines, into_validation, split_fields, Field, InputError,
};
use crate::table::TransitionCountTable;

/// One life stage with its observed outcome counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub label: String,
    /// Moves on to the next stage.
    pub graduate: u64,
    /// Dies (absorbed).
    pub die: u64,
    /// Stays in the same stage.
    pub stay: u64,
    pub n: u64,
}

/// Stage-structured counts in the layout used for matrix population models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageTable {
    pub stages: Vec<Stage>,
}

impl StageTable {
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.stages.is_empty() {
            problems.push("no stages".to_string());
        }
        let mut seen = HashSet::new();
        for s in &self.stages {
            if !seen.insert(s.label.as_str()) {
                problems.push(format!("duplicate stage label {:?}", s.label));
            }
            if s.n == 0 {
                problems.push(format!("stage {}: n must be at least 1", s.label));
            }
            let sum = s.graduate + s.die + s.stay;
            if sum != s.n {
                problems.push(format!(
                    "stage {}: G + R + P = {sum}, but n = {}",
                    s.label, s.n
                ));
            }
        }
        if let Some(last) = self.stages.last() {
            if last.graduate != 0 {
                problems.push(format!(
                    "final stage {} has G = {}, but there is no stage to graduate into",
                    last.label, last.graduate
                ));
            }
        }
        problems
    }
}

/// Converts stage counts to chain rows: stage `i` stays in `i` with count P,
/// moves to `i + 1` with count G and is absorbed with count R.
///
/// The resulting transient block is the transpose of the projection matrix's
/// survival block.
pub fn stage_table_to_counts(stages: &StageTable) -> Result<TransitionCountTable, InputError> {
    let problems = stages.validate();
    if !problems.is_empty() {
        return Err(InputError::Validation(problems));
    }
    let k = stages.stages.len();
    let rows = stages
        .stages
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut row = vec![0; k + 1];
            row[i] = s.stay;
            if i + 1 < k {
                row[i + 1] = s.graduate;
            }
            row[k] = s.die;
            row
        })
        .collect();
    let labels = stages.stages.iter().map(|s| s.label.clone()).collect();
    let table = TransitionCountTable::new(labels, rows).map_err(into_validation)?;
    check_absorbing(&table)?;
    Ok(table)
}

/// A count written either as an integer or as `x/d`. The denominator, when
/// present, is returned for comparison with the row total.
fn parse_stage_count(f: Field<'_>, line: usize) -> Result<(u64, Option<u64>), InputError> {
    let bad = || {
        InputError::parse(
            line,
            f.column,
            format!("expected a count or count/n fraction, found {:?}", f.text),
        )
    };
    match f.text.split_once('/') {
        Some((num, den)) => {
            let num = num.trim().parse().map_err(|_| bad())?;
            let den = den.trim().parse().map_err(|_| bad())?;
            Ok((num, Some(den)))
        }
        None => Ok((f.text.parse().map_err(|_| bad())?, None)),
    }
}

/// Parses the stage format: `label, G, R, P, n` per line, with an optional
/// `stage, G, R, P, n` header.
pub fn parse_stages(text: &str) -> Result<StageTable, InputError> {
    let mut stages = Vec::new();
    let mut problems = Vec::new();
    for (idx, (no, line)) in content_lines(text).enumerate() {
        let fields = split_fields(line);
        if idx == 0 && fields[0].text.eq_ignore_ascii_case("stage") {
            let names: Vec<String> = fields.iter().map(|f| f.text.to_ascii_uppercase()).collect();
            if names != ["STAGE", "G", "R", "P", "N"] {
                return Err(InputError::parse(
                    no,
                    1,
                    "stage header must read `stage, G, R, P, n`",
                ));
            }
            continue;
        }
        if fields.len() != 5 {
            let col = fields.get(5).map_or(line.len().max(1), |f| f.column);
            return Err(InputError::parse(
                no,
                col,
                format!(
                    "expected 5 fields (label, G, R, P, n), found {}",
                    fields.len()
                ),
            ));
        }
        let label = check_label(fields[0], no)?;
        let n: u64 = fields[4].text.parse().map_err(|_| {
            InputError::parse(
                no,
                fields[4].column,
                format!("expected an integer total, found {:?}", fields[4].text),
            )
        })?;
        let mut counts = [0u64; 3];
        for (c, name, f) in [
            (0, "G", fields[1]),
            (1, "R", fields[2]),
            (2, "P", fields[3]),
        ] {
            let (x, den) = parse_stage_count(f, no)?;
            if let Some(d) = den {
                if d != n {
                    problems.push(format!(
                        "stage {label}: {name} written over {d}, but n = {n}"
                    ));
                }
            }
            counts[c] = x;
        }
        stages.push(Stage {
            label,
            graduate: counts[0],
            die: counts[1],
            stay: counts[2],
            n,
        });
    }
    if !problems.is_empty() {
        return Err(InputError::Validation(problems));
    }
    if stages.is_empty() {
        return Err(InputError::parse(1, 1, "no stage rows found"));
    }
    Ok(StageTable { stages })
}
