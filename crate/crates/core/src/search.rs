//! Numerical maximization of `|S|` over sequences admissible for a fixed
//! `(n, theta)`.
//!
//! Sequences are parametrized by their gaps with `a_1 = 0` (the global phase
//! does not change `|S|`). Each step of projected gradient ascent maps the
//! trial point back onto `theta <= delta_1 <= ... <= delta_{n-1} <= 1 - theta`
//! and snaps it onto an exact binary grid, so the phases rebuilt from the
//! gaps pass the admissibility check with zero slack.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::landau_bound;
use crate::compensated::ComplexSum;
use crate::error::{validate_theta, Error, Result};
use crate::extremal::two_block_sequence;
use crate::phases::{exp_sum, unit_phasor, PhaseGrid, PhaseSequence};

/// Sufficient-increase constant for the backtracking line search.
const ARMIJO: f64 = 1e-4;

/// Odd/odd candidates tried when building the extremal seed.
const SEED_CANDIDATES: usize = 4;

/// Upper limit on block splits evaluated per seed candidate.
const SEED_SPLITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    pub n: usize,
    pub theta: f64,
    pub restarts: usize,
    pub max_iters: usize,
    pub step_init: f64,
    pub tol: f64,
    pub seed: u64,
    /// Also start from a padded extremal construction when one fits.
    pub extremal_seed: bool,
}

impl SearchConfig {
    pub const DEFAULT_RESTARTS: usize = 32;
    pub const DEFAULT_MAX_ITERS: usize = 5000;
    pub const DEFAULT_STEP_INIT: f64 = 0.1;
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn new(n: usize, theta: f64) -> Self {
        Self {
            n,
            theta,
            restarts: Self::DEFAULT_RESTARTS,
            max_iters: Self::DEFAULT_MAX_ITERS,
            step_init: Self::DEFAULT_STEP_INIT,
            tol: Self::DEFAULT_TOL,
            seed: 0,
            extremal_seed: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_theta(self.theta)?;
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        if self.restarts == 0 && !self.extremal_seed {
            return bad("at least one restart is required");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if !(self.step_init > 0.0 && self.step_init.is_finite()) {
            return bad("step_init must be positive");
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad("tol must be positive");
        }
        Ok(())
    }
}

/// `|S|^2` and its gradient with respect to `(a_1, delta_1, ..., delta_{n-1})`.
///
/// With `g_k = d|S|^2 / d a_k = -4 pi Im(conj(S) e^{2 pi i a_k})`, the partial in
/// `a_1` is `sum_k g_k` and the partial in `delta_j` is `sum_{k > j} g_k`.
pub fn objective_and_gradient(a1: f64, gaps: &[f64]) -> (f64, Vec<f64>) {
    let mut phases = Vec::with_capacity(gaps.len() + 1);
    let mut a = a1;
    phases.push(a);
    for &d in gaps {
        a += d;
        phases.push(a);
    }
    let e: Vec<Complex64> = phases.iter().map(|&x| unit_phasor(x)).collect();
    let s = e.iter().copied().collect::<ComplexSum>().value();
    let per_phase: Vec<f64> = e.iter().map(|&ek| -4.0 * PI * (s.conj() * ek).im).collect();

    // suffix sums: grad[j] = sum_{k >= j} per_phase[k]
    let mut grad = vec![0.0; per_phase.len()];
    let mut acc = 0.0;
    for (g, &p) in grad.iter_mut().zip(&per_phase).rev() {
        acc += p;
        *g = acc;
    }
    (s.norm_sqr(), grad)
}

/// Euclidean projection onto `{theta <= x_1 <= ... <= x_m <= 1 - theta}`:
/// pool-adjacent-violators followed by clamping to the box.
pub fn project_admissible(gaps: &[f64], theta: f64) -> Result<Vec<f64>> {
    validate_theta(theta)?;
    let (lo, hi) = (theta, 1.0 - theta);
    Ok(isotonic(gaps)
        .into_iter()
        .map(|x| x.clamp(lo, hi))
        .collect())
}

/// Unweighted least-squares isotonic (non-decreasing) fit.
fn isotonic(y: &[f64]) -> Vec<f64> {
    // (sum, count) per pooled block
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(y.len());
    for &v in y {
        blocks.push((v, 1));
        while blocks.len() >= 2 {
            let (s1, c1) = blocks[blocks.len() - 1];
            let (s0, c0) = blocks[blocks.len() - 2];
            if s0 / c0 as f64 > s1 / c1 as f64 {
                blocks.pop();
                let last = blocks.last_mut().expect("two blocks");
                *last = (s0 + s1, c0 + c1);
            } else {
                break;
            }
        }
    }
    blocks
        .into_iter()
        .flat_map(|(s, c)| std::iter::repeat_n(s / c as f64, c))
        .collect()
}

/// The feasible gap set, restricted to a grid on which phases rebuilt by
/// running sums are exact.
#[derive(Debug, Clone, Copy)]
struct FeasibleGrid {
    theta: f64,
    grid: PhaseGrid,
    lo: f64,
    hi: f64,
}

impl FeasibleGrid {
    fn new(n: usize, theta: f64) -> Self {
        let grid = PhaseGrid::for_span(n as f64);
        Self {
            theta,
            grid,
            lo: grid.up(theta),
            hi: grid.down(1.0 - theta),
        }
    }

    fn project(&self, gaps: &[f64]) -> Vec<f64> {
        // Rounding and clamping are monotone maps, so order survives.
        project_admissible(gaps, self.theta)
            .expect("validated theta")
            .into_iter()
            .map(|x| self.grid.nearest(x).clamp(self.lo, self.hi))
            .collect()
    }
}

fn objective(gaps: &[f64]) -> f64 {
    let mut acc = ComplexSum::new();
    let mut a = 0.0;
    acc.add(unit_phasor(a));
    for &d in gaps {
        a += d;
        acc.add(unit_phasor(a));
    }
    acc.value().norm_sqr()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    Random,
    Extremal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub start: StartKind,
    pub start_abs_sum: f64,
    pub best_abs_sum: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip)]
    pub gaps: Vec<f64>,
}

/// A point visited by the ascent, after projection.
#[derive(Debug, Clone, Copy)]
pub struct Iterate<'a> {
    pub iteration: usize,
    pub gaps: &'a [f64],
    /// `|S|^2`
    pub objective: f64,
}

/// Projected gradient ascent with backtracking from one start.
///
/// `observer` sees the projected start and every accepted iterate.
pub fn ascend<F>(start: &[f64], config: &SearchConfig, mut observer: F) -> Result<RestartSummary>
where
    F: FnMut(Iterate<'_>),
{
    config.validate()?;
    if start.len() + 1 != config.n {
        return Err(Error::InvalidParameter(format!(
            "start has {} gaps, expected {}",
            start.len(),
            config.n - 1
        )));
    }
    let feasible = FeasibleGrid::new(config.n, config.theta);
    let mut x = feasible.project(start);
    let mut f = objective(&x);
    let start_abs_sum = f.sqrt();
    observer(Iterate {
        iteration: 0,
        gaps: &x,
        objective: f,
    });

    let mut step = config.step_init;
    let mut converged = false;
    let mut iterations = 0;
    'outer: while iterations < config.max_iters {
        let (_, grad) = objective_and_gradient(0.0, &x);
        let g = &grad[1..];
        loop {
            let trial: Vec<f64> = x.iter().zip(g).map(|(xi, gi)| xi + step * gi).collect();
            let y = feasible.project(&trial);
            let ascent: f64 = g
                .iter()
                .zip(y.iter().zip(&x))
                .map(|(gi, (yi, xi))| gi * (yi - xi))
                .sum();
            let moved = y != x;
            if moved {
                let fy = objective(&y);
                if fy >= f && fy >= f + ARMIJO * ascent {
                    x = y;
                    f = fy;
                    break;
                }
            }
            step /= 2.0;
            if step < config.tol {
                converged = true;
                break 'outer;
            }
        }
        iterations += 1;
        observer(Iterate {
            iteration: iterations,
            gaps: &x,
            objective: f,
        });
        step = (2.0 * step).min(config.step_init);
    }

    Ok(RestartSummary {
        restart: 0,
        start: StartKind::Random,
        start_abs_sum,
        best_abs_sum: f.sqrt(),
        iterations,
        converged,
        gaps: x,
    })
}

fn random_start(config: &SearchConfig, restart: usize) -> Vec<f64> {
    let stream = config.seed ^ (restart as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    let (lo, hi) = (config.theta, 1.0 - config.theta);
    let mut gaps: Vec<f64> = (0..config.n - 1)
        .map(|_| {
            if hi > lo {
                rng.random_range(lo..=hi)
            } else {
                lo
            }
        })
        .collect();
    gaps.sort_by(f64::total_cmp);
    gaps
}

/// Odd/odd `p/q` in `[theta, 1/2)` with `q <= n`, smallest values first.
fn seed_fractions(n: usize, theta: f64) -> Vec<(u64, u64)> {
    let mut found: Vec<(u64, u64)> = Vec::new();
    for q in (3..=n as u64).step_by(2) {
        let qf = q as f64;
        let mut p = ((theta * qf).floor() as u64).saturating_sub(2).max(1) | 1;
        while (p as f64 / qf) < theta {
            p += 2;
        }
        if 2 * p < q && !found.iter().any(|&(a, b)| a * q == p * b) {
            found.push((p, q));
        }
    }
    found.sort_by(|x, y| (x.0 as f64 / x.1 as f64).total_cmp(&(y.0 as f64 / y.1 as f64)));
    found.truncate(SEED_CANDIDATES);
    found
}

/// Best padded two-block construction of length `n` built from an odd/odd
/// `theta' >= theta` whose extremal sequence fits in `n` phases.
pub fn extremal_start(n: usize, theta: f64) -> Option<PhaseSequence> {
    let mut best: Option<(f64, PhaseSequence)> = None;
    for (p, q) in seed_fractions(n, theta) {
        let theta_prime = p as f64 / q as f64;
        let half = (q as usize - 1) / 2;
        let spare = n - q as usize;
        let stride = spare / SEED_SPLITS + 1;
        for extra_front in (0..=spare).step_by(stride) {
            let front = half + extra_front;
            let back = half + spare - extra_front;
            let Ok(seq) = two_block_sequence(theta_prime, theta_prime, front, back) else {
                continue;
            };
            let value = exp_sum(&seq).norm();
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, seq));
            }
        }
    }
    best.map(|(_, s)| s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub n: usize,
    pub theta: f64,
    /// Phases with `a_1 = 0`.
    pub best_sequence: PhaseSequence,
    pub best_abs_sum: f64,
    /// `cot(pi theta / 2)`
    pub target: f64,
    pub gap_to_target: f64,
    pub iterations_used: usize,
    pub restarts_used: usize,
    pub converged: bool,
    pub best_restart: usize,
    pub restarts: Vec<RestartSummary>,
}

pub fn maximize(config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let mut starts: Vec<(StartKind, Vec<f64>)> = (0..config.restarts)
        .map(|r| (StartKind::Random, random_start(config, r)))
        .collect();
    if config.extremal_seed {
        if let Some(seq) = extremal_start(config.n, config.theta) {
            starts.push((StartKind::Extremal, seq.gaps().as_slice().to_vec()));
        }
    }
    if starts.is_empty() {
        starts.push((StartKind::Random, random_start(config, 0)));
    }

    let summaries: Vec<RestartSummary> = starts
        .par_iter()
        .enumerate()
        .map(|(i, (kind, gaps))| {
            ascend(gaps, config, |_| {}).map(|mut s| {
                s.restart = i;
                s.start = *kind;
                s
            })
        })
        .collect::<Result<_>>()?;

    // Strictly greater replaces, so ties keep the lowest restart index.
    let best = summaries.iter().fold(&summaries[0], |b, s| {
        if s.best_abs_sum > b.best_abs_sum {
            s
        } else {
            b
        }
    });
    let best_sequence = PhaseSequence::from_gaps(0.0, &best.gaps)?;
    let target = landau_bound(config.theta);
    Ok(SearchResult {
        n: config.n,
        theta: config.theta,
        best_abs_sum: best.best_abs_sum,
        gap_to_target: target - best.best_abs_sum,
        target,
        iterations_used: summaries.iter().map(|s| s.iterations).sum(),
        restarts_used: summaries.len(),
        converged: best.converged,
        best_restart: best.restart,
        best_sequence,
        restarts: summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phases::check_admissible;

    #[test]
    fn single_phase_objective() {
        let (v, g) = objective_and_gradient(0.3, &[]);
        assert_eq!(v, 1.0);
        assert_eq!(g, vec![0.0]);
    }

    #[test]
    fn global_phase_has_zero_gradient() {
        let (_, g) = objective_and_gradient(0.17, &[0.2, 0.31, 0.4, 0.77]);
        assert!(g[0].abs() < 1e-12);
    }

    #[test]
    fn projection_examples() {
        let p = project_admissible(&[0.3, 0.2], 0.1).unwrap();
        assert!((p[0] - 0.25).abs() < 1e-15 && (p[1] - 0.25).abs() < 1e-15);

        let x = [0.2, 0.3, 0.3, 0.7];
        assert_eq!(project_admissible(&x, 0.2).unwrap(), x.to_vec());

        let p = project_admissible(&[0.05, 0.9, 0.95], 0.1).unwrap();
        assert_eq!(p, vec![0.1, 0.9, 0.9]);

        assert!(project_admissible(&[0.3], 0.7).is_err());
    }

    #[test]
    fn projection_is_idempotent() {
        let y = [0.9, 0.1, 0.5, 0.45, 0.02, 0.99, 0.6];
        let once = project_admissible(&y, 0.15).unwrap();
        let twice = project_admissible(&once, 0.15).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn search_finds_extremal_third() {
        let r = maximize(&SearchConfig::new(3, 1.0 / 3.0)).unwrap();
        assert!((r.best_abs_sum - 3f64.sqrt()).abs() < 1e-6);
        assert!(r.best_abs_sum <= r.target + 1e-9);
        assert!(
            check_admissible(&r.best_sequence, 1.0 / 3.0)
                .unwrap()
                .admissible
        );
    }

    #[test]
    fn half_theta_has_a_single_feasible_point() {
        let mut cfg = SearchConfig::new(5, 0.5);
        cfg.restarts = 3;
        let r = maximize(&cfg).unwrap();
        assert!(r.best_abs_sum <= 1.0 + 1e-9);
        assert!(r.best_abs_sum >= 1.0 - 1e-6);
        assert_eq!(r.best_sequence.gaps().as_slice(), &[0.5; 4]);
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::new(1, 0.3).validate().is_err());
        assert!(SearchConfig::new(4, 0.0).validate().is_err());
        let mut c = SearchConfig::new(4, 0.3);
        c.tol = 0.0;
        assert!(c.validate().is_err());
        let mut c = SearchConfig::new(4, 0.3);
        c.restarts = 0;
        c.extremal_seed = false;
        assert!(c.validate().is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let mut c = SearchConfig::new(9, 0.2);
        c.restarts = 6;
        c.max_iters = 200;
        c.seed = 42;
        let a = maximize(&c).unwrap();
        let b = maximize(&c).unwrap();
        assert_eq!(a, b);
    }
}
