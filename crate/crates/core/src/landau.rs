//! Landau's arithmetic form of the argument.
//!
//! With `b_k = pi (a_k - a_{k-1})` and `e_k = e^{2 pi i a_k}`, the sum splits as
//!
//! ```text
//! sum e_k = e_1 i e^{-i b_2} / (2 sin b_2)
//!         - (i/2) sum_{k=2}^{n-1} e_k (cot b_k - cot b_{k+1})
//!         - e_n i e^{i b_n} / (2 sin b_n)
//! ```
//!
//! which holds for any strictly increasing phases with `sin b_k != 0`. Only the
//! refined bound needs the gaps to be non-decreasing.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::compensated::ComplexSum;
use crate::error::{Error, Result};
use crate::phases::{exp_sum, unit_phasor, PhaseSequence};

/// Smallest `|sin b_k|` accepted before a gap counts as degenerate.
pub const SIN_THRESHOLD: f64 = 1e-12;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct LandauDecomposition {
    /// `b_2 .. b_n`; `b[j]` is `b_{j+2}`.
    pub b: Vec<f64>,
    pub head: Complex64,
    /// Middle terms for `k = 2 .. n-1`; `middle[j]` belongs to `k = j + 2`.
    pub middle: Vec<Complex64>,
    pub tail: Complex64,
    pub reconstruction: Complex64,
    /// The directly evaluated sum the reconstruction is compared against.
    pub direct: Complex64,
    pub residual: f64,
}

impl LandauDecomposition {
    pub fn n(&self) -> usize {
        self.b.len() + 1
    }

    /// `cot b_k` for `k = 2 .. n`.
    pub fn cot_b(&self) -> Vec<f64> {
        self.b.iter().map(|&b| cot(b)).collect()
    }

    /// `cot b_k - cot b_{k+1}` for `k = 2 .. n-1`; non-negative for monotone gaps.
    pub fn cot_differences(&self) -> Vec<f64> {
        self.cot_b().windows(2).map(|w| w[0] - w[1]).collect()
    }
}

fn cot(x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    c / s
}

fn half_angles(a: &PhaseSequence) -> Vec<f64> {
    a.gaps().as_slice().iter().map(|d| PI * d).collect()
}

fn check_sines(b: &[f64]) -> Result<()> {
    for (j, &bk) in b.iter().enumerate() {
        let s = bk.sin();
        if s.abs() < SIN_THRESHOLD {
            return Err(Error::DegenerateGap {
                index: j + 2,
                sin_b: s,
            });
        }
    }
    Ok(())
}

pub fn landau_decompose(a: &PhaseSequence) -> Result<LandauDecomposition> {
    let n = a.len();
    if n < 2 {
        return Err(Error::TooShort { need: 2, got: n });
    }
    let b = half_angles(a);
    check_sines(&b)?;

    let e: Vec<Complex64> = a.phases().iter().map(|&x| unit_phasor(x)).collect();
    let b2 = b[0];
    let bn = b[n - 2];

    let head = e[0] * I * Complex64::cis(-b2) / (2.0 * b2.sin());
    let middle: Vec<Complex64> = (0..n.saturating_sub(2))
        .map(|j| {
            // e_{j+2} (cot b_{j+2} - cot b_{j+3})
            -(I / 2.0) * e[j + 1] * (cot(b[j]) - cot(b[j + 1]))
        })
        .collect();
    let tail = -e[n - 1] * I * Complex64::cis(bn) / (2.0 * bn.sin());

    let mut acc = ComplexSum::new();
    acc.add(head);
    for &m in &middle {
        acc.add(m);
    }
    acc.add(tail);
    let reconstruction = acc.value();
    let direct = exp_sum(a);

    Ok(LandauDecomposition {
        residual: (reconstruction - direct).norm(),
        b,
        head,
        middle,
        tail,
        reconstruction,
        direct,
    })
}

/// `max_k |e_k e^{-i b_k} - e_{k-1} e^{i b_k}|`; both sides equal `e^{pi i (a_k + a_{k-1})}`.
pub fn verify_shift_identity(a: &PhaseSequence) -> Result<f64> {
    if a.len() < 2 {
        return Err(Error::TooShort {
            need: 2,
            got: a.len(),
        });
    }
    let residual = a
        .phases()
        .windows(2)
        .map(|w| {
            let b = PI * (w[1] - w[0]);
            let left = unit_phasor(w[1]) * Complex64::cis(-b);
            let right = unit_phasor(w[0]) * Complex64::cis(b);
            (left - right).norm()
        })
        .fold(0.0, f64::max);
    Ok(residual)
}

/// Residuals of the two half-turn identities used to pass to the closed form:
///
/// * `1 + i e^{ib} / (2 sin b) = i e^{-ib} / (2 sin b)`
/// * `1/2 + i e^{ib} / (2 sin b) = -cos b / (2 i sin b)`
pub fn verify_halfturn_identities(b: f64) -> Result<(f64, f64)> {
    let s = b.sin();
    if s.is_nan() || s.abs() < SIN_THRESHOLD {
        return Err(Error::InvalidParameter(format!(
            "b = {b} is within {SIN_THRESHOLD:e} of a multiple of pi"
        )));
    }
    let w = I * Complex64::cis(b) / (2.0 * s);
    let lhs1 = 1.0 + w;
    let rhs1 = I * Complex64::cis(-b) / (2.0 * s);
    let lhs2 = 0.5 + w;
    let rhs2 = Complex64::new(-b.cos(), 0.0) / (2.0 * I * s);
    Ok(((lhs1 - rhs1).norm(), (lhs2 - rhs2).norm()))
}

/// `(1 + cos b_2) / (2 sin b_2) + (1 - cos b_n) / (2 sin b_n)`.
///
/// Requires non-decreasing gaps: the telescoping of `|cot b_k - cot b_{k+1}|`
/// relies on `cot` decreasing on `(0, pi)`.
pub fn refined_bound(a: &PhaseSequence) -> Result<f64> {
    let n = a.len();
    if n < 2 {
        return Err(Error::TooShort { need: 2, got: n });
    }
    if let Some(index) = a.gaps().first_violation() {
        return Err(Error::NonMonotoneGaps { index });
    }
    let b = half_angles(a);
    check_sines(&b)?;
    let (b2, bn) = (b[0], b[n - 2]);
    Ok((1.0 + b2.cos()) / (2.0 * b2.sin()) + (1.0 - bn.cos()) / (2.0 * bn.sin()))
}
