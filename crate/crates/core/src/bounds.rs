//! The bound ladder `cot(pi theta / 2) <= 2 / sin(pi theta) <= 1 / theta`, the
//! comparison bound `2 / (pi theta)`, and the (false) `1 / (pi theta) + 1`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{validate_theta, Result};
use crate::landau::refined_bound;
use crate::phases::{exp_sum, require_admissible, PhaseSequence};

/// Absolute slack on the `|S| <= bound` flags.
pub const FLAG_TOLERANCE: f64 = 1e-9;

/// `cot x` as `cos x / sin x`.
pub fn cot(x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    c / s
}

/// The sharp bound `cot(pi theta / 2)`.
pub fn landau_bound(theta: f64) -> f64 {
    cot(PI * theta / 2.0)
}

/// The claimed bound `1 / (pi theta) + 1`, which the extremal sequences violate.
pub fn false_bound(theta: f64) -> f64 {
    1.0 / (PI * theta) + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundLadder {
    pub theta: f64,
    pub bound_landau: f64,
    pub bound_kuzmin: f64,
    pub bound_simple: f64,
    #[serde(rename = "bound_2_over_pi_theta")]
    pub bound_two_over_pi_theta: f64,
    pub bound_false: f64,
}

pub fn bound_ladder(theta: f64) -> Result<BoundLadder> {
    validate_theta(theta)?;
    Ok(BoundLadder {
        theta,
        bound_landau: landau_bound(theta),
        bound_kuzmin: 2.0 / (PI * theta).sin(),
        bound_simple: 1.0 / theta,
        bound_two_over_pi_theta: 2.0 / (PI * theta),
        bound_false: false_bound(theta),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundFlags {
    pub landau: bool,
    pub kuzmin: bool,
    pub simple: bool,
    pub two_over_pi_theta: bool,
    #[serde(rename = "false")]
    pub false_bound: bool,
    /// Absent for single-phase sequences, where the refined bound is undefined.
    pub refined: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub theta: f64,
    pub sum_re: f64,
    pub sum_im: f64,
    pub abs_sum: f64,
    pub bound_landau: f64,
    pub bound_kuzmin: f64,
    pub bound_simple: f64,
    #[serde(rename = "bound_2_over_pi_theta")]
    pub bound_two_over_pi_theta: f64,
    pub bound_false: f64,
    pub bound_refined: Option<f64>,
    pub flags: BoundFlags,
}

impl BoundReport {
    pub fn ladder(&self) -> BoundLadder {
        BoundLadder {
            theta: self.theta,
            bound_landau: self.bound_landau,
            bound_kuzmin: self.bound_kuzmin,
            bound_simple: self.bound_simple,
            bound_two_over_pi_theta: self.bound_two_over_pi_theta,
            bound_false: self.bound_false,
        }
    }
}

pub fn bound_report(a: &PhaseSequence, theta: f64) -> Result<BoundReport> {
    require_admissible(a, theta)?;
    let ladder = bound_ladder(theta)?;
    let s = exp_sum(a);
    let abs_sum = s.norm();
    let bound_refined = if a.len() >= 2 {
        Some(refined_bound(a)?)
    } else {
        None
    };
    let within = |bound: f64| abs_sum <= bound + FLAG_TOLERANCE;
    Ok(BoundReport {
        n: a.len(),
        theta,
        sum_re: s.re,
        sum_im: s.im,
        abs_sum,
        bound_landau: ladder.bound_landau,
        bound_kuzmin: ladder.bound_kuzmin,
        bound_simple: ladder.bound_simple,
        bound_two_over_pi_theta: ladder.bound_two_over_pi_theta,
        bound_false: ladder.bound_false,
        bound_refined,
        flags: BoundFlags {
            landau: within(ladder.bound_landau),
            kuzmin: within(ladder.bound_kuzmin),
            simple: within(ladder.bound_simple),
            two_over_pi_theta: within(ladder.bound_two_over_pi_theta),
            false_bound: within(ladder.bound_false),
            refined: bound_refined.map(within),
        },
    })
}
