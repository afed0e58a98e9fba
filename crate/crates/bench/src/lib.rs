//! Fixtures shared by the benchmarks.

use passage_core::TransitionCountTable;

/// Seven-stage life table: egg, five nymph stages, adult. Rows are
/// (stay, graduate, die).
pub const STAGES: [(&str, u64, u64, u64); 7] = [
    ("Egg", 478, 139, 59),
    ("N1", 528, 89, 52),
    ("N2", 301, 74, 15),
    ("N3", 392, 60, 14),
    ("N4", 405, 59, 1),
    ("N5", 853, 55, 4),
    ("Adult", 2515, 0, 55),
];

pub fn life_table() -> TransitionCountTable {
    let k = STAGES.len();
    let rows = STAGES
        .iter()
        .enumerate()
        .map(|(i, &(_, stay, grad, die))| {
            let mut r = vec![0; k + 1];
            r[i] = stay;
            if i + 1 < k {
                r[i + 1] = grad;
            }
            r[k] = die;
            r
        })
        .collect();
    let labels = STAGES.iter().map(|s| s.0.to_string()).collect();
    TransitionCountTable::new(labels, rows).expect("fixture is valid")
}
