//! Phase sequences, gap profiles, admissibility and the exponential sum itself.
//!
//! Phases are measured in cycles: `a` contributes `e^{2 pi i a}`. They are never
//! reduced modulo one for the gap conditions; the hypotheses are stated on raw
//! differences `a_{k+1} - a_k`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::compensated::ComplexSum;
use crate::error::{validate_theta, Error, Result};

/// Strictly increasing, finite, non-empty list of phases (in cycles).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PhaseSequence {
    phases: Vec<f64>,
}

impl PhaseSequence {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::InvalidSequence(
                "at least one phase is required".into(),
            ));
        }
        if let Some(i) = phases.iter().position(|a| !a.is_finite()) {
            return Err(Error::InvalidSequence(format!(
                "phase {} is not finite ({})",
                i + 1,
                phases[i]
            )));
        }
        if let Some(i) = phases.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSequence(format!(
                "phases must be strictly increasing: a_{} = {} >= a_{} = {}",
                i + 1,
                phases[i],
                i + 2,
                phases[i + 1]
            )));
        }
        Ok(Self { phases })
    }

    /// Builds `start, start + g_1, start + g_1 + g_2, ...` by running sums.
    ///
    /// The sums are exact when `start` and every gap lie on a common [`PhaseGrid`].
    pub fn from_gaps(start: f64, gaps: &[f64]) -> Result<Self> {
        let mut phases = Vec::with_capacity(gaps.len() + 1);
        let mut a = start;
        phases.push(a);
        for &g in gaps {
            a += g;
            phases.push(a);
        }
        Self::new(phases)
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn gaps(&self) -> GapProfile {
        gap_profile(self)
    }

    /// Every phase shifted by `c`.
    pub fn translate(&self, c: f64) -> Result<Self> {
        Self::new(self.phases.iter().map(|a| a + c).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.phases
    }
}

impl TryFrom<Vec<f64>> for PhaseSequence {
    type Error = Error;

    fn try_from(phases: Vec<f64>) -> Result<Self> {
        Self::new(phases)
    }
}

/// Consecutive differences `delta_k = a_{k+1} - a_k`, `k = 1 .. n-1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct GapProfile {
    gaps: Vec<f64>,
}

impl GapProfile {
    pub fn as_slice(&self) -> &[f64] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    /// 1-based index `k` of the first `delta_k > delta_{k+1}`.
    pub fn first_violation(&self) -> Option<usize> {
        self.gaps
            .windows(2)
            .position(|w| w[0] > w[1])
            .map(|i| i + 1)
    }

    pub fn is_monotone(&self) -> bool {
        self.first_violation().is_none()
    }
}

pub fn gap_profile(a: &PhaseSequence) -> GapProfile {
    GapProfile {
        gaps: a.phases.windows(2).map(|w| w[1] - w[0]).collect(),
    }
}

/// Outcome of testing `theta <= delta_1 <= ... <= delta_{n-1} <= 1 - theta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub n: usize,
    pub theta: f64,
    pub admissible: bool,
    pub monotone: bool,
    /// Largest theta for which the sequence is admissible; 0 when none is.
    pub theta_star: f64,
    /// 1-based `k` of the first `delta_k > delta_{k+1}`.
    pub first_violation: Option<usize>,
    pub gaps: GapProfile,
}

/// Endpoint conditions only; comparisons are exact, with no slack.
fn endpoints_admit(gaps: &[f64], theta: f64) -> bool {
    match (gaps.first(), gaps.last()) {
        (Some(&first), Some(&last)) => theta <= first && last <= 1.0 - theta,
        _ => true,
    }
}

/// The supremum of admissible thetas, adjusted by single ulps so that
/// `theta <= theta_star` agrees exactly with the floating endpoint test.
fn largest_admissible_theta(gaps: &[f64]) -> f64 {
    let (Some(&first), Some(&last)) = (gaps.first(), gaps.last()) else {
        return 0.5;
    };
    let mut t = first.min(1.0 - last).min(0.5);
    if t <= 0.0 {
        return 0.0;
    }
    while t > 0.0 && !endpoints_admit(gaps, t) {
        t = t.next_down();
    }
    loop {
        let up = t.next_up();
        if up <= 0.5 && endpoints_admit(gaps, up) {
            t = up;
        } else {
            break;
        }
    }
    t.max(0.0)
}

pub fn check_admissible(a: &PhaseSequence, theta: f64) -> Result<AdmissibilityReport> {
    validate_theta(theta)?;
    let gaps = a.gaps();
    let first_violation = gaps.first_violation();
    let monotone = first_violation.is_none();
    let theta_star = if monotone {
        largest_admissible_theta(gaps.as_slice())
    } else {
        0.0
    };
    let admissible = monotone && endpoints_admit(gaps.as_slice(), theta);
    debug_assert_eq!(admissible, monotone && theta <= theta_star);
    Ok(AdmissibilityReport {
        n: a.len(),
        theta,
        admissible,
        monotone,
        theta_star,
        first_violation,
        gaps,
    })
}

/// `check_admissible`, turned into an error when the hypotheses fail.
pub fn require_admissible(a: &PhaseSequence, theta: f64) -> Result<AdmissibilityReport> {
    let report = check_admissible(a, theta)?;
    if report.admissible {
        Ok(report)
    } else {
        Err(Error::NotAdmissible {
            theta,
            report: Box::new(report),
        })
    }
}

/// `e^{2 pi i a}`, evaluated after removing the integer part of `a`.
///
/// `a - a.round()` is exact in binary floating point, so integer shifts of a
/// phase leave the result bit-for-bit unchanged.
pub fn unit_phasor(a: f64) -> Complex64 {
    let r = a - a.round();
    let (s, c) = (TAU * r).sin_cos();
    Complex64::new(c, s)
}

/// `sum_k e^{2 pi i a_k}` with compensated accumulation.
pub fn exp_sum(a: &PhaseSequence) -> Complex64 {
    a.phases
        .iter()
        .map(|&x| unit_phasor(x))
        .collect::<ComplexSum>()
        .value()
}

/// Binary grid on which running sums of phases are exact.
///
/// All multiples of `quantum` up to `2^53 * quantum` are representable, and
/// the grid is chosen so that every phase in the intended span stays below
/// that limit; differences of grid phases are therefore exact too.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    quantum: f64,
}

impl PhaseGrid {
    /// A grid covering phases in `[-span, span]`.
    pub fn for_span(span: f64) -> Self {
        let span = span.abs().max(1.0);
        let mut p = 1.0f64;
        while p < span {
            p *= 2.0;
        }
        Self {
            quantum: p * f64::EPSILON,
        }
    }

    pub fn quantum(&self) -> f64 {
        self.quantum
    }

    pub fn up(&self, x: f64) -> f64 {
        (x / self.quantum).ceil() * self.quantum
    }

    pub fn down(&self, x: f64) -> f64 {
        (x / self.quantum).floor() * self.quantum
    }

    pub fn nearest(&self, x: f64) -> f64 {
        (x / self.quantum).round() * self.quantum
    }
}
