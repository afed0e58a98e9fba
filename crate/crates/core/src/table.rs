use std::collections::HashSet;

use crate::chain::AbsorbingChainSpec;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Observed transition counts per transient state.
///
/// Row `i` has `k + 1` entries: counts into each of the `k` transient states
/// followed by the count of absorptions. The row total is `n_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionCountTable {
    labels: Vec<String>,
    rows: Vec<Vec<u64>>,
}

impl TransitionCountTable {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<u64>>) -> Result<Self> {
        let problems = check(&labels, &rows);
        if problems.is_empty() {
            Ok(TransitionCountTable { labels, rows })
        } else {
            Err(Error::InvalidTable(problems))
        }
    }

    /// Like [`TransitionCountTable::new`], additionally requiring each row to
    /// sum to the stated total.
    pub fn with_totals(labels: Vec<String>, rows: Vec<Vec<u64>>, totals: &[u64]) -> Result<Self> {
        let mut problems = check(&labels, &rows);
        if totals.len() != rows.len() {
            problems.push(format!(
                "{} totals given for {} rows",
                totals.len(),
                rows.len()
            ));
        }
        for (i, (row, &n)) in rows.iter().zip(totals).enumerate() {
            let sum: u64 = row.iter().sum();
            if sum != n {
                let label = labels.get(i).map_or("?", String::as_str);
                problems.push(format!(
                    "row {i} ({label}): counts sum to {sum}, stated total is {n}"
                ));
            }
        }
        if problems.is_empty() {
            Ok(TransitionCountTable { labels, rows })
        } else {
            Err(Error::InvalidTable(problems))
        }
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Counts for row `i`, absorption last.
    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn total(&self, i: usize) -> u64 {
        self.rows[i].iter().sum()
    }

    pub fn totals(&self) -> Vec<u64> {
        (0..self.k()).map(|i| self.total(i)).collect()
    }

    /// Observed proportions `x_ij / n_i` for row `i`, absorption last.
    pub fn proportions(&self, i: usize) -> Vec<f64> {
        let n = self.total(i) as f64;
        self.rows[i].iter().map(|&x| x as f64 / n).collect()
    }

    /// The point estimate of the transient block. Every entry is the single
    /// correctly rounded quotient `x_ij / n_i`.
    pub fn point_estimate(&self) -> Matrix {
        let k = self.k();
        let mut u = Matrix::zeros(k, k);
        for i in 0..k {
            let n = self.total(i) as f64;
            for (dst, &x) in u.row_mut(i).iter_mut().zip(&self.rows[i][..k]) {
                *dst = x as f64 / n;
            }
        }
        u
    }

    /// Validated chain built from the point estimate.
    pub fn to_chain(&self, start: Vec<f64>) -> Result<AbsorbingChainSpec> {
        AbsorbingChainSpec::new(self.point_estimate(), start, self.labels.clone())
    }

    /// Every count multiplied by `factor`; proportions are unchanged.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| x * factor).collect())
            .collect();
        Self::new(self.labels.clone(), rows)
    }
}

fn check(labels: &[String], rows: &[Vec<u64>]) -> Vec<String> {
    let mut problems = Vec::new();
    let k = rows.len();
    if k == 0 {
        problems.push("table has no states".to_string());
    }
    if labels.len() != k {
        problems.push(format!("{} labels given for {k} rows", labels.len()));
    }
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            problems.push(format!("duplicate state label {l:?}"));
        }
    }
    for (i, row) in rows.iter().enumerate() {
        let label = labels.get(i).map_or("?", String::as_str);
        if row.len() != k + 1 {
            problems.push(format!(
                "row {i} ({label}): {} counts, expected {}",
                row.len(),
                k + 1
            ));
        }
        if row.iter().sum::<u64>() == 0 {
            problems.push(format!("row {i} ({label}): no observed transitions"));
        }
    }
    problems
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("s{i}")).collect()
    }

    #[test]
    fn totals_and_estimates() {
        let t = TransitionCountTable::new(labels(2), vec![vec![5, 3, 2], vec![0, 4, 6]]).unwrap();
        assert_eq!(t.totals(), vec![10, 10]);
        let u = t.point_estimate();
        assert_eq!(u.row(0), &[0.5, 0.3]);
        assert_eq!(t.proportions(1), vec![0.0, 0.4, 0.6]);
        assert_eq!(t.label_index("s1"), Some(1));
    }

    #[test]
    fn stated_total_mismatch() {
        let err = TransitionCountTable::with_totals(labels(1), vec![vec![3, 4]], &[8]).unwrap_err();
        assert!(matches!(err, Error::InvalidTable(ref p) if p[0].contains("stated total is 8")));
    }

    #[test]
    fn rejects_empty_rows_and_bad_shapes() {
        assert!(TransitionCountTable::new(labels(1), vec![vec![0, 0]]).is_err());
        assert!(TransitionCountTable::new(labels(1), vec![vec![1, 2, 3]]).is_err());
        assert!(TransitionCountTable::new(
            vec!["a".into(), "a".into()],
            vec![vec![1, 0, 1], vec![0, 1, 1]]
        )
        .is_err());
        assert!(TransitionCountTable::new(vec![], vec![]).is_err());
    }

    #[test]
    fn scaling_preserves_estimate() {
        let t = TransitionCountTable::new(labels(2), vec![vec![5, 3, 2], vec![1, 4, 6]]).unwrap();
        let s = t.scaled(100).unwrap();
        assert_eq!(s.total(1), 1100);
        assert_eq!(s.point_estimate(), t.point_estimate());
    }
}
