#![allow(dead_code)]

use std::f64::consts::PI;

use expsum::phases::{check_admissible, PhaseGrid, PhaseSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Direct `|sum e^{2 pi i a}|` without compensation or range reduction.
pub fn naive_abs_sum(phases: &[f64]) -> f64 {
    let (re, im) = phases.iter().fold((0.0, 0.0), |(r, i), &a| {
        let (s, c) = (2.0 * PI * a).sin_cos();
        (r + c, i + s)
    });
    re.hypot(im)
}

pub fn cot_half(theta: f64) -> f64 {
    1.0 / (PI * theta / 2.0).tan()
}

/// Random admissible `(sequence, theta)` with `2 <= n <= n_max` and theta in
/// `[0.01, 0.5]`.
///
/// Half the draws are built on an exact grid; the rest use plain floating
/// running sums and are kept only when the admissibility check accepts them.
pub fn random_admissible(rng: &mut ChaCha8Rng, n_max: usize) -> (PhaseSequence, f64) {
    loop {
        let n = rng.random_range(2..=n_max);
        let theta = rng.random_range(0.01..=0.5);
        let start = rng.random_range(-3.0..3.0);
        let mut gaps: Vec<f64> = (0..n - 1)
            .map(|_| rng.random_range(theta..=1.0 - theta))
            .collect();
        gaps.sort_by(f64::total_cmp);
        let candidate = if rng.random_bool(0.5) {
            let grid = PhaseGrid::for_span(4.0 + n as f64);
            let (lo, hi) = (grid.up(theta), grid.down(1.0 - theta));
            let snapped: Vec<f64> = gaps
                .iter()
                .map(|&g| grid.nearest(g).clamp(lo, hi))
                .collect();
            PhaseSequence::from_gaps(grid.nearest(start), &snapped)
        } else {
            PhaseSequence::from_gaps(start, &gaps)
        };
        let Ok(a) = candidate else { continue };
        if check_admissible(&a, theta).unwrap().admissible {
            return (a, theta);
        }
    }
}

/// Least-squares projection onto `lo <= x_1 <= ... <= x_m <= hi` by
/// coordinate ascent on the dual (Hildreth), one multiplier per constraint.
pub fn hildreth_projection(y: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let m = y.len();
    let mut x = y.to_vec();
    // constraint j: 0 is x_1 >= lo, 1..m-1 is x_{j+1} - x_j >= 0, m is hi - x_m >= 0
    let mut lambda = vec![0.0; m + 1];
    for _ in 0..1_000_000 {
        let mut change: f64 = 0.0;
        for j in 0..=m {
            let (slack, norm2) = if j == 0 {
                (x[0] - lo, 1.0)
            } else if j == m {
                (hi - x[m - 1], 1.0)
            } else {
                (x[j] - x[j - 1], 2.0)
            };
            let new = (lambda[j] - slack / norm2).max(0.0);
            let d = new - lambda[j];
            if d != 0.0 {
                lambda[j] = new;
                if j == 0 {
                    x[0] += d;
                } else if j == m {
                    x[m - 1] -= d;
                } else {
                    x[j] += d;
                    x[j - 1] -= d;
                }
                change = change.max(d.abs());
            }
        }
        if change < 1e-15 {
            break;
        }
    }
    x
}
