//! Distributional checks on the multinomial resampler.

mod common;

use common::life_table;
use passage_core::{sample_matrix, sample_row, RngStream};

#[test]
fn egg_row_moments_match_multinomial() {
    // (graduate, die, stay) proportions of the egg stage
    let n = 676u64;
    let p = [139.0 / 676.0, 59.0 / 676.0, 478.0 / 676.0];
    let draws = 100_000;
    let mut rng = RngStream::new(2024, 0);
    let mut sum = [0.0; 3];
    let mut cross = [[0.0; 3]; 3];
    for _ in 0..draws {
        let x = sample_row(&p, n, &mut rng).unwrap();
        assert_eq!(x.iter().sum::<u64>(), n);
        let x = [x[0] as f64, x[1] as f64, x[2] as f64];
        for a in 0..3 {
            sum[a] += x[a];
            for b in 0..3 {
                cross[a][b] += x[a] * x[b];
            }
        }
    }
    let r = draws as f64;
    let nf = n as f64;
    for a in 0..3 {
        let mean = sum[a] / r;
        let se = (nf * p[a] * (1.0 - p[a]) / r).sqrt();
        assert!(
            (mean - nf * p[a]).abs() < 3.0 * se,
            "component {a}: mean {mean}"
        );
        for b in 0..3 {
            let cov = cross[a][b] / r - (sum[a] / r) * (sum[b] / r);
            let want = if a == b {
                nf * p[a] * (1.0 - p[a])
            } else {
                -nf * p[a] * p[b]
            };
            let rel = (cov - want).abs() / want.abs();
            assert!(rel < 0.05, "cov[{a}][{b}] = {cov}, want {want}");
        }
    }
}

#[test]
fn resampled_matrix_is_unbiased() {
    let t = life_table();
    let u_hat = t.point_estimate();
    let reps = 100_000;
    let k = t.k();
    let mut sum = vec![0.0; k * k];
    for r in 0..reps {
        let u = sample_matrix(&t, 1.0, &mut RngStream::new(77, r)).unwrap();
        for (s, x) in sum.iter_mut().zip(u.as_slice()) {
            *s += x;
        }
    }
    for i in 0..k {
        let n = t.total(i) as f64;
        for j in 0..k {
            let p = u_hat[(i, j)];
            let mean = sum[i * k + j] / reps as f64;
            if p == 0.0 {
                assert_eq!(mean, 0.0);
                continue;
            }
            let se = (p * (1.0 - p) / n / reps as f64).sqrt();
            assert!(
                (mean - p).abs() < 3.0 * se,
                "U*[{i}][{j}] mean {mean} vs {p}"
            );
        }
    }
}

#[test]
fn reduced_rows_conserve_counts() {
    let t = life_table();
    let mut rng = RngStream::new(5, 5);
    for f in [1.0, 0.5, 0.2, 0.1, 0.001] {
        for _ in 0..200 {
            let u = sample_matrix(&t, f, &mut rng).unwrap();
            for i in 0..t.k() {
                let n = passage_core::sampling::effective_size(t.total(i), f) as f64;
                let transient: f64 = u.row(i).iter().sum();
                // every entry is a count over n
                for x in u.row(i) {
                    assert_eq!((x * n).round() / n, *x);
                }
                assert!(transient <= 1.0 + 1e-12);
            }
        }
    }
}
