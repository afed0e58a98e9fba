//! Reference values for the seven-stage life table.
//!
//! The fundamental-matrix row and the exact moments below were computed once
//! with exact rational Gauss-Jordan elimination on the integer counts and
//! then rounded to f64.

mod common;

use common::{life_table, life_table_stages};
use passage_core::{fundamental_matrix, passage_time_moments, unit_start};

const N_FIRST_ROW: [f64; 7] = [
    3.414141414141414,
    3.330861809585214,
    1.9417580055877928,
    2.3201518733433626,
    2.3151730066623686,
    4.540726413066839,
    12.795687370155456,
];
const N_DIAGONAL: [f64; 7] = [
    3.414141414141414,
    4.74468085106383,
    4.382022471910112,
    6.297297297297297,
    7.75,
    15.457627118644067,
    46.72727272727273,
];
const EXACT_MEAN: f64 = 30.658499892542444;
const EXACT_VARIANCE: f64 = 2019.9528471894023;

#[test]
fn fundamental_matrix_matches_rational_reference() {
    let t = life_table();
    let chain = t.to_chain(unit_start(7, 0)).unwrap();
    let n = fundamental_matrix(&chain).unwrap();
    for j in 0..7 {
        assert!(
            (n[(0, j)] - N_FIRST_ROW[j]).abs() < 1e-12,
            "N[0][{j}] = {}",
            n[(0, j)]
        );
        assert!(
            (n[(j, j)] - N_DIAGONAL[j]).abs() < 1e-12,
            "N[{j}][{j}] = {}",
            n[(j, j)]
        );
    }
    // lower triangle is zero: stages never go backwards
    for i in 1..7 {
        for j in 0..i {
            assert_eq!(n[(i, j)], 0.0);
        }
    }
}

#[test]
fn exact_moments_from_egg() {
    let t = life_table();
    let m = passage_time_moments(&t.to_chain(unit_start(7, 0)).unwrap()).unwrap();
    assert!((m.mean - EXACT_MEAN).abs() < 1e-10);
    assert!((m.variance - EXACT_VARIANCE).abs() < 1e-8);
    // published to three decimals
    assert!((m.mean - 30.658).abs() <= 1e-3);
    assert!((m.sd() - 44.943).abs() <= 1e-3);
}

#[test]
fn point_estimate_reproduces_published_fractions() {
    let u = life_table().point_estimate();
    let expect = [
        (0, 0, 478.0 / 676.0),
        (0, 1, 139.0 / 676.0),
        (1, 1, 528.0 / 669.0),
        (1, 2, 89.0 / 669.0),
        (2, 2, 301.0 / 390.0),
        (2, 3, 74.0 / 390.0),
        (3, 3, 392.0 / 466.0),
        (3, 4, 60.0 / 466.0),
        (4, 4, 405.0 / 465.0),
        (4, 5, 59.0 / 465.0),
        (5, 5, 853.0 / 912.0),
        (5, 6, 55.0 / 912.0),
        (6, 6, 2515.0 / 2570.0),
    ];
    let mut nonzero = 0;
    for i in 0..7 {
        for j in 0..7 {
            if u[(i, j)] != 0.0 {
                nonzero += 1;
            }
        }
    }
    assert_eq!(nonzero, expect.len());
    for (i, j, p) in expect {
        assert_eq!(u[(i, j)], p, "entry ({i}, {j})");
    }
    // the projection-matrix orientation is the transpose
    let mpm = u.transpose();
    assert_eq!(mpm[(0, 0)], 478.0 / 676.0);
    assert_eq!(mpm[(1, 0)], 139.0 / 676.0);
}

#[test]
fn stage_and_generic_encodings_agree_bitwise() {
    let a = life_table();
    let b = life_table_stages();
    assert_eq!(a, b);
    let ca = a.to_chain(unit_start(7, 0)).unwrap();
    let cb = b.to_chain(unit_start(7, 0)).unwrap();
    assert_eq!(ca, cb);
    let (ma, mb) = (
        passage_time_moments(&ca).unwrap(),
        passage_time_moments(&cb).unwrap(),
    );
    assert_eq!(ma.mean.to_bits(), mb.mean.to_bits());
    assert_eq!(ma.variance.to_bits(), mb.variance.to_bits());
}

#[test]
fn later_start_stages() {
    // exact means of the remaining lifetime from each stage
    let expected = [
        30.658499892542444,
        38.808510638297875,
        53.96629213483146,
        59.63513513513514,
        65.78333333333333,
        59.016949152542374,
        46.72727272727273,
    ];
    let t = life_table();
    for (i, e) in expected.iter().enumerate() {
        let m = passage_time_moments(&t.to_chain(unit_start(7, i)).unwrap()).unwrap();
        assert!((m.mean - e).abs() < 1e-10, "stage {i}: {}", m.mean);
    }
}
