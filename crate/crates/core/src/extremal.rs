//! Sequences that attain or approach the sharp bound, and the counterexample
//! to `|S| <= 1/(pi theta) + 1`.
//!
//! For `theta = (2M+1)/(2N+1) < 1/2` the construction uses `2N+1` phases,
//! indexed `0 ..= 2N`:
//!
//! ```text
//! a_k = k theta                        0 <= k <= N - 1
//! a_k = N theta + (k - N)(1 - theta)   N <= k <= 2N
//! ```
//!
//! i.e. `N` gaps of `theta` followed by `N` gaps of `1 - theta`, and the sum has
//! modulus `(1 + cos pi theta) / sin pi theta = cot(pi theta / 2)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bounds::{false_bound, landau_bound};
use crate::error::{validate_theta, Error, Result};
use crate::phases::{exp_sum, require_admissible, PhaseGrid, PhaseSequence};

/// `|S| >= target - ATTAINMENT_TOLERANCE` counts as attaining the bound.
pub const ATTAINMENT_TOLERANCE: f64 = 1e-9;

/// Narrowest interval `odd_fraction_in` will search.
pub const MIN_INTERVAL_WIDTH: f64 = 1e-9;

/// A fraction with odd numerator and odd denominator, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OddFraction {
    numerator: u64,
    denominator: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl OddFraction {
    /// Accepts any odd/odd representation strictly between 0 and 1/2 and
    /// reduces it (the reduced form of an odd/odd fraction is odd/odd).
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        if numerator.is_multiple_of(2) || denominator.is_multiple_of(2) {
            return Err(Error::InvalidFraction(format!(
                "{numerator}/{denominator}: numerator and denominator must both be odd"
            )));
        }
        if 2 * numerator >= denominator {
            return Err(Error::InvalidFraction(format!(
                "{numerator}/{denominator} is not in (0, 1/2)"
            )));
        }
        let g = gcd(numerator, denominator);
        Ok(Self {
            numerator: numerator / g,
            denominator: denominator / g,
        })
    }

    /// `(2M + 1) / (2N + 1)`.
    pub fn from_mn(m: u64, n: u64) -> Result<Self> {
        Self::new(2 * m + 1, 2 * n + 1)
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn m(&self) -> u64 {
        (self.numerator - 1) / 2
    }

    pub fn n(&self) -> u64 {
        (self.denominator - 1) / 2
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl fmt::Display for OddFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl FromStr for OddFraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = s
            .split_once('/')
            .ok_or_else(|| Error::InvalidFraction(format!("expected P/Q, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| Error::InvalidFraction(format!("{s:?}: {e}")))
        };
        Self::new(parse(p)?, parse(q)?)
    }
}

/// A sequence together with its sum and the sharp bound at `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalWitness {
    pub theta: f64,
    /// `None` for the `theta = 1/2` witness.
    pub fraction: Option<OddFraction>,
    pub sequence: PhaseSequence,
    pub abs_sum: f64,
    /// `cot(pi theta / 2)`
    pub target: f64,
    pub attained: bool,
}

impl ExtremalWitness {
    fn from_sequence(theta: f64, fraction: Option<OddFraction>, sequence: PhaseSequence) -> Self {
        let abs_sum = exp_sum(&sequence).norm();
        let target = landau_bound(theta);
        Self {
            theta,
            fraction,
            sequence,
            abs_sum,
            target,
            attained: (abs_sum - target).abs() <= ATTAINMENT_TOLERANCE,
        }
    }
}

/// `(1 + cos pi theta) / sin pi theta`.
pub fn closed_form_extremal_sum(theta: f64) -> f64 {
    let (s, c) = (PI * theta).sin_cos();
    (1.0 + c) / s
}

/// Phases starting at 0 with `front` gaps of `theta_lo` then `back` gaps of
/// `1 - theta_hi`. Both gaps are snapped inward onto an exact grid, so the
/// recomputed differences satisfy `theta_lo <= small` and
/// `large <= 1 - theta_hi` with no rounding slack.
pub(crate) fn two_block_sequence(
    theta_lo: f64,
    theta_hi: f64,
    front: usize,
    back: usize,
) -> Result<PhaseSequence> {
    let span = front as f64 * theta_lo + back as f64 * (1.0 - theta_hi) + 1.0;
    let grid = PhaseGrid::for_span(span);
    let small = grid.up(theta_lo);
    let large = grid.down(1.0 - theta_hi);
    let mut phases = Vec::with_capacity(front + back + 1);
    for k in 0..=front {
        phases.push(k as f64 * small);
    }
    let corner = front as f64 * small;
    for j in 1..=back {
        phases.push(corner + j as f64 * large);
    }
    PhaseSequence::new(phases)
}

pub fn extremal_sequence(f: OddFraction) -> Result<ExtremalWitness> {
    let theta = f.value();
    let n = f.n() as usize;
    let sequence = two_block_sequence(theta, theta, n, n)?;
    Ok(ExtremalWitness::from_sequence(theta, Some(f), sequence))
}

/// The `theta = 1/2` witness `0, 1/2, 1` with `|1 + e^{pi i} + e^{2 pi i}| = 1`.
pub fn extremal_half() -> ExtremalWitness {
    let sequence = PhaseSequence::new(vec![0.0, 0.5, 1.0]).expect("static sequence");
    ExtremalWitness::from_sequence(0.5, None, sequence)
}

fn validate_interval(lo: f64, hi: f64) -> Result<()> {
    if lo > 0.0 && lo < hi && hi <= 0.5 && hi - lo >= MIN_INTERVAL_WIDTH {
        Ok(())
    } else {
        Err(Error::InvalidInterval { lo, hi })
    }
}

/// Smallest odd denominator (then smallest numerator) with `p/q` in the interval
/// between `lo` and `hi`; `hi` is always excluded.
fn first_odd_fraction(lo: f64, hi: f64, lo_inclusive: bool) -> OddFraction {
    let above = |x: f64| if lo_inclusive { x >= lo } else { x > lo };
    let mut q: u64 = 3;
    loop {
        let qf = q as f64;
        let mut p = ((lo * qf).floor() as u64).saturating_sub(2).max(1);
        if p.is_multiple_of(2) {
            p += 1;
        }
        while !above(p as f64 / qf) {
            p += 2;
        }
        if (p as f64 / qf) < hi && 2 * p < q {
            return OddFraction::new(p, q).expect("odd by construction");
        }
        q += 2;
    }
}

/// The odd/odd fraction in the open interval `(lo, hi)` with the smallest
/// denominator, ties broken by the smallest numerator.
pub fn odd_fraction_in(lo: f64, hi: f64) -> Result<OddFraction> {
    validate_interval(lo, hi)?;
    Ok(first_odd_fraction(lo, hi, false))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearExtremal {
    /// The requested parameter.
    pub theta: f64,
    pub epsilon: f64,
    /// `cot(pi theta / 2)` at the requested theta.
    pub target: f64,
    /// Witness built at the odd/odd `theta' > theta` (or at 1/2).
    pub witness: ExtremalWitness,
}

impl NearExtremal {
    pub fn abs_sum(&self) -> f64 {
        self.witness.abs_sum
    }

    pub fn theta_prime(&self) -> f64 {
        self.witness.theta
    }
}

/// An admissible sequence for `theta` with `|S| > cot(pi theta / 2) - epsilon`.
pub fn near_extremal(theta: f64, epsilon: f64) -> Result<NearExtremal> {
    validate_theta(theta)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    let target = landau_bound(theta);
    let witness = if theta == 0.5 {
        extremal_half()
    } else {
        let floor = target - epsilon;
        let mut hi = 0.5;
        loop {
            let f = odd_fraction_in(theta, hi)?;
            if landau_bound(f.value()) > floor {
                break extremal_sequence(f)?;
            }
            hi = theta + (hi - theta) / 2.0;
        }
    };
    require_admissible(&witness.sequence, theta)?;
    Ok(NearExtremal {
        theta,
        epsilon,
        target,
        witness,
    })
}

/// `|S| >= cot(pi theta / 2) - 1e-9` for an admissible sequence.
pub fn attainment_check(a: &PhaseSequence, theta: f64) -> Result<bool> {
    require_admissible(a, theta)?;
    Ok(exp_sum(a).norm() >= landau_bound(theta) - ATTAINMENT_TOLERANCE)
}

/// Where `cot(pi theta / 2) = 1/(pi theta) + 1` on `(0, 1/2)`.
///
/// Below the crossing the sharp bound exceeds the false one, so extremal
/// sequences there violate it.
pub fn false_bound_crossing() -> f64 {
    let gap = |t: f64| landau_bound(t) - false_bound(t);
    let (mut lo, mut hi) = (1e-3, 0.5);
    debug_assert!(gap(lo) > 0.0 && gap(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Which parameters a counterexample may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RefuteScope {
    /// The witness must be admissible for the requested theta itself.
    #[default]
    AtTheta,
    /// Fall back to an odd/odd `theta' <= theta` when none exists at theta.
    AtOrBelow,
}

/// Values reported when no counterexample is available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefutationDiagnostics {
    pub theta: f64,
    pub bound_landau: f64,
    pub bound_false: f64,
    pub crossing: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refutation {
    pub theta: f64,
    /// The parameter at which the false bound is evaluated and violated.
    pub parameter: f64,
    pub witness: ExtremalWitness,
    /// `1/(pi parameter) + 1`
    pub bound_false: f64,
    /// `cot(pi parameter / 2)`
    pub bound_landau: f64,
    /// `|S| - bound_false`, positive for a counterexample.
    pub margin: f64,
    pub crossing: f64,
}

impl Refutation {
    /// Recomputes the margin from the raw phases and the admissibility from the gaps.
    pub fn reverify(&self) -> Result<f64> {
        require_admissible(&self.witness.sequence, self.parameter)?;
        Ok(exp_sum(&self.witness.sequence).norm() - false_bound(self.parameter))
    }
}

fn build_refutation(
    theta: f64,
    parameter: f64,
    f: OddFraction,
    crossing: f64,
) -> Result<Refutation> {
    let witness = extremal_sequence(f)?;
    require_admissible(&witness.sequence, parameter)?;
    let bound_false = false_bound(parameter);
    let abs_sum = exp_sum(&witness.sequence).norm();
    Ok(Refutation {
        theta,
        parameter,
        bound_false,
        bound_landau: landau_bound(parameter),
        margin: abs_sum - bound_false,
        witness,
        crossing,
    })
}

/// A machine-checkable sequence violating `|S| <= 1/(pi theta) + 1`.
pub fn refute_false_bound(theta: f64, scope: RefuteScope) -> Result<Refutation> {
    validate_theta(theta)?;
    let crossing = false_bound_crossing();
    let bound_false = false_bound(theta);
    let bound_landau = landau_bound(theta);

    if bound_landau > bound_false && theta < 0.5 {
        // theta' in [theta, x*) keeps the witness admissible for theta and
        // keeps at least half of the largest possible margin at theta.
        let halfway = 0.5 * (bound_landau + bound_false);
        let x_star = (2.0 / PI) * (1.0 / halfway).atan();
        if x_star - theta >= MIN_INTERVAL_WIDTH {
            let f = first_odd_fraction(theta, x_star, true);
            let r = build_refutation(theta, theta, f, crossing)?;
            if r.margin > 0.0 {
                return Ok(r);
            }
        }
    }

    if scope == RefuteScope::AtOrBelow {
        let upper = theta.min(crossing);
        let mut q: u64 = 3;
        while 1.0 / q as f64 > upper {
            q += 2;
        }
        let qf = q as f64;
        let mut p = 1;
        while ((p + 2) as f64 / qf) <= upper && 2 * (p + 2) < q {
            p += 2;
        }
        let f = OddFraction::new(p, q)?;
        let r = build_refutation(theta, f.value(), f, crossing)?;
        if r.margin > 0.0 {
            return Ok(r);
        }
    }

    Err(Error::NoCounterexample(Box::new(RefutationDiagnostics {
        theta,
        bound_landau,
        bound_false,
        crossing,
    })))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestConstantRow {
    pub j: u64,
    pub theta: f64,
    pub abs_sum: f64,
    /// `theta * cot(pi theta / 2)`, measured on the extremal witness.
    pub scaled: f64,
}

/// `theta_j |S_j|` for `theta_j = 1/(2j+1)`, `j = 1 ..= j_max`; increases to `2/pi`.
pub fn best_constant_scan(j_max: u64) -> Result<Vec<BestConstantRow>> {
    if j_max < 1 {
        return Err(Error::InvalidParameter("j_max must be at least 1".into()));
    }
    (1..=j_max)
        .map(|j| {
            let w = extremal_sequence(OddFraction::new(1, 2 * j + 1)?)?;
            Ok(BestConstantRow {
                j,
                theta: w.theta,
                abs_sum: w.abs_sum,
                scaled: w.theta * w.abs_sum,
            })
        })
        .collect()
}
