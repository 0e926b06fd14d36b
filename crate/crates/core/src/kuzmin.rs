//! Kuzmin's geometric picture: the unit-step polygon through the partial sums,
//! the circumcenters of consecutive vertex triples, and the length identities
//! that bound the chord `A_n - A_0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::compensated::{ComplexSum, NeumaierSum};
use crate::error::{Error, Result};
use crate::phases::{require_admissible, unit_phasor, PhaseSequence};

/// Smallest `|sin(pi delta)|` for which three consecutive vertices count as non-collinear.
pub const COLLINEAR_THRESHOLD: f64 = 1e-12;

/// Absolute slack for the trace inequalities.
pub const TRACE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainGeometry {
    pub sequence: PhaseSequence,
    /// `A_0 .. A_n`, with `A_0 = 0`.
    pub partial_sums: Vec<Complex64>,
    /// `M_1 .. M_n`; `midpoints[m - 1]` is the midpoint of `A_{m-1} A_m`.
    pub midpoints: Vec<Complex64>,
    /// `C_1 .. C_{n-1}`; `centers[m - 1]` is the circumcenter of `A_{m-1}, A_m, A_{m+1}`.
    pub centers: Vec<Complex64>,
    /// `theta_m = 2 pi (a_{m+1} - a_m)` in radians.
    pub turn_angles: Vec<f64>,
    /// `R_m = |A_m - C_m|`.
    pub radii: Vec<f64>,
    /// Largest spread among `|C_m - A_{m-1}|`, `|C_m - A_m|`, `|C_m - A_{m+1}|`.
    pub circumradius_spread: f64,
    /// Largest `| |A_m - A_{m-1}| - 1 |`.
    pub unit_step_error: f64,
}

impl ChainGeometry {
    pub fn n(&self) -> usize {
        self.sequence.len()
    }

    pub fn endpoint(&self) -> Complex64 {
        self.partial_sums[self.n()]
    }
}

/// Center of the circle through `A_m - u`, `A_m`, `A_m + v`, relative to `A_m`,
/// for unit steps `u`, `v`.
///
/// The bisector equations `2 u.X = |u|^2`, `2 v.X = |v|^2` are taken in the
/// orthogonal frame `p = u + v`, `q = v - u`, where with `|u| = |v| = 1` they read
/// `p.X = 1` and `q.X = 0`. Solving there avoids the cancellation the raw 2x2
/// system suffers when the step doubles back (`v` close to `u`), and stays
/// regular right at a half-turn.
fn circumcenter_offset(u: Complex64, v: Complex64) -> Complex64 {
    let p = u + v;
    p / p.norm_sqr()
}

pub fn build_chain(a: &PhaseSequence) -> Result<ChainGeometry> {
    let n = a.len();
    if n < 2 {
        return Err(Error::TooShort { need: 2, got: n });
    }
    let gaps = a.gaps();
    for (i, &d) in gaps.as_slice().iter().enumerate() {
        if (PI * d).sin().abs() < COLLINEAR_THRESHOLD {
            return Err(Error::DegenerateTriple {
                index: i + 1,
                gap: d,
            });
        }
    }

    let steps: Vec<Complex64> = a.phases().iter().map(|&x| unit_phasor(x)).collect();
    let mut partial_sums = Vec::with_capacity(n + 1);
    let mut acc = ComplexSum::new();
    partial_sums.push(Complex64::new(0.0, 0.0));
    for &e in &steps {
        acc.add(e);
        partial_sums.push(acc.value());
    }

    let midpoints: Vec<Complex64> = partial_sums
        .windows(2)
        .map(|w| (w[0] + w[1]) / 2.0)
        .collect();

    // The incoming step at A_m is e_m and the outgoing one e_{m+1}.
    let centers: Vec<Complex64> = (1..n)
        .map(|m| partial_sums[m] + circumcenter_offset(-steps[m - 1], steps[m]))
        .collect();

    let turn_angles: Vec<f64> = gaps.as_slice().iter().map(|d| 2.0 * PI * d).collect();
    let radii: Vec<f64> = centers
        .iter()
        .enumerate()
        .map(|(i, &c)| (partial_sums[i + 1] - c).norm())
        .collect();

    let circumradius_spread = centers
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let r = [
                (c - partial_sums[i]).norm(),
                (c - partial_sums[i + 1]).norm(),
                (c - partial_sums[i + 2]).norm(),
            ];
            let hi = r.iter().cloned().fold(f64::MIN, f64::max);
            let lo = r.iter().cloned().fold(f64::MAX, f64::min);
            hi - lo
        })
        .fold(0.0, f64::max);

    let unit_step_error = partial_sums
        .windows(2)
        .map(|w| ((w[1] - w[0]).norm() - 1.0).abs())
        .fold(0.0, f64::max);

    Ok(ChainGeometry {
        sequence: a.clone(),
        partial_sums,
        midpoints,
        centers,
        turn_angles,
        radii,
        circumradius_spread,
        unit_step_error,
    })
}

/// `max_m | R_m - csc(theta_m / 2) / 2 |`.
pub fn verify_radius_identity(g: &ChainGeometry) -> f64 {
    g.radii
        .iter()
        .zip(&g.turn_angles)
        .map(|(&r, &t)| (r - 0.5 / (t / 2.0).sin()).abs())
        .fold(0.0, f64::max)
}

fn half_cot(turn: f64) -> f64 {
    let (s, c) = (turn / 2.0).sin_cos();
    0.5 * c / s
}

/// `max_m | |C_{m+1} - C_m| - (cot(theta_m / 2) - cot(theta_{m+1} / 2)) / 2 |`.
pub fn verify_center_spacing(g: &ChainGeometry) -> f64 {
    g.centers
        .windows(2)
        .zip(g.turn_angles.windows(2))
        .map(|(c, t)| ((c[1] - c[0]).norm() - (half_cot(t[0]) - half_cot(t[1]))).abs())
        .fold(0.0, f64::max)
}

/// Residual of `A_n - A_0 = (A_n - C_{n-1}) + sum_{m=2}^{n-1} (C_m - C_{m-1}) + (C_1 - A_0)`.
pub fn verify_telescoping(g: &ChainGeometry) -> Result<f64> {
    if g.n() < 3 {
        return Err(Error::TooShort {
            need: 3,
            got: g.n(),
        });
    }
    let n = g.n();
    let c = &g.centers;
    let mut acc = ComplexSum::new();
    acc.add(g.partial_sums[n] - c[n - 2]);
    for w in c.windows(2) {
        acc.add(w[1] - w[0]);
    }
    acc.add(c[0] - g.partial_sums[0]);
    let chord = g.partial_sums[n] - g.partial_sums[0];
    Ok((chord - acc.value()).norm())
}

/// The three lengths that bound `|A_n|` in the geometric argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KuzminTrace {
    pub theta: f64,
    /// `|A_n - C_{n-1}|`
    pub tail: f64,
    /// `sum_{m=2}^{n-1} |C_m - C_{m-1}|`
    pub center_path: f64,
    /// `|C_1 - A_0|`
    pub head: f64,
    pub total: f64,
    /// `(1 - cos(theta_{n-1}/2)) / (2 sin(theta_{n-1}/2)) + (1 + cos(theta_1/2)) / (2 sin(theta_1/2))`
    pub closed_form: f64,
    pub abs_sum: f64,
    /// `2 / sin(pi theta)`
    pub kuzmin_bound: f64,
    /// `|A_n| <= total` (with slack)
    pub lower_holds: bool,
    /// `total <= 2 / sin(pi theta)` (with slack)
    pub upper_holds: bool,
}

pub fn kuzmin_bound_trace(g: &ChainGeometry, theta: f64) -> Result<KuzminTrace> {
    require_admissible(&g.sequence, theta)?;
    let n = g.n();
    if n < 3 {
        return Err(Error::TooShort { need: 3, got: n });
    }
    let tail = (g.partial_sums[n] - g.centers[n - 2]).norm();
    let center_path = g
        .centers
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .collect::<NeumaierSum>()
        .value();
    let head = (g.centers[0] - g.partial_sums[0]).norm();
    let total = tail + center_path + head;

    let last = g.turn_angles[n - 2] / 2.0;
    let first = g.turn_angles[0] / 2.0;
    let closed_form =
        (1.0 - last.cos()) / (2.0 * last.sin()) + (1.0 + first.cos()) / (2.0 * first.sin());

    let abs_sum = g.endpoint().norm();
    let kuzmin_bound = 2.0 / (PI * theta).sin();
    Ok(KuzminTrace {
        theta,
        tail,
        center_path,
        head,
        total,
        closed_form,
        abs_sum,
        kuzmin_bound,
        lower_holds: abs_sum <= total + TRACE_TOLERANCE,
        upper_holds: total <= kuzmin_bound + TRACE_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[f64]) -> PhaseSequence {
        PhaseSequence::new(v.to_vec()).unwrap()
    }

    /// Circumcenter from the textbook determinant formula on absolute coordinates.
    fn circumcenter_oracle(p: Complex64, q: Complex64, r: Complex64) -> Complex64 {
        let d = 2.0 * (p.re * (q.im - r.im) + q.re * (r.im - p.im) + r.re * (p.im - q.im));
        let (pp, qq, rr) = (p.norm_sqr(), q.norm_sqr(), r.norm_sqr());
        Complex64::new(
            (pp * (q.im - r.im) + qq * (r.im - p.im) + rr * (p.im - q.im)) / d,
            (pp * (r.re - q.re) + qq * (p.re - r.re) + rr * (q.re - p.re)) / d,
        )
    }

    #[test]
    fn quarter_turn_chain() {
        let g = build_chain(&seq(&[0.0, 0.25])).unwrap();
        let expect = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 1.0),
        ];
        for (a, b) in g.partial_sums.iter().zip(expect) {
            assert!((a - b).norm() < 1e-15);
        }
        let oracle = circumcenter_oracle(expect[0], expect[1], expect[2]);
        assert!((oracle - Complex64::new(0.5, 0.5)).norm() < 1e-15);
        assert!((g.centers[0] - oracle).norm() < 1e-15);
        assert!((g.radii[0] - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(verify_radius_identity(&g) <= 1e-12);
    }

    #[test]
    fn radius_near_half_turn() {
        let g = build_chain(&seq(&[0.0, 0.49])).unwrap();
        let expected = 0.5 / (0.49 * PI).sin();
        assert!((g.radii[0] - expected).abs() < 1e-12);
        assert!((expected - 0.50025).abs() < 1e-5);
    }

    #[test]
    fn center_spacing_of_three_phases() {
        let g = build_chain(&seq(&[0.0, 0.25, 0.6])).unwrap();
        let s = &g.partial_sums;
        let c1 = circumcenter_oracle(s[0], s[1], s[2]);
        let c2 = circumcenter_oracle(s[1], s[2], s[3]);
        let spacing = (c2 - c1).norm();
        let formula = 0.5 * (1.0 / (0.25 * PI).tan() - 1.0 / (0.35 * PI).tan());
        assert!((spacing - formula).abs() < 1e-12);
        assert!((spacing - 0.245).abs() < 1e-3);
        assert!((g.centers[0] - c1).norm() < 1e-14);
        assert!((g.centers[1] - c2).norm() < 1e-14);
        assert!(verify_center_spacing(&g) <= 1e-10);
    }

    #[test]
    fn equal_gaps_share_one_center() {
        let a = seq(&(0..9).map(|k| k as f64 * 0.125).collect::<Vec<_>>());
        let g = build_chain(&a).unwrap();
        for c in &g.centers {
            assert!((c - g.centers[0]).norm() < 1e-14);
        }
        assert!(verify_center_spacing(&g) < 1e-14);
        let t = kuzmin_bound_trace(&g, 0.125).unwrap();
        assert!(t.center_path < 1e-13);
    }

    #[test]
    fn degenerate_and_short_inputs() {
        assert!(matches!(
            build_chain(&seq(&[0.0])),
            Err(Error::TooShort { need: 2, .. })
        ));
        assert!(matches!(
            build_chain(&seq(&[0.0, 0.3, 1.3])),
            Err(Error::DegenerateTriple { index: 2, .. })
        ));
    }

    #[test]
    fn half_turn_triple_has_midpoint_center() {
        let g = build_chain(&seq(&[0.0, 0.5, 1.0])).unwrap();
        // A = 0, 1, 0, 1; every center is the midpoint 1/2 with radius 1/2.
        for c in &g.centers {
            assert!((c - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
        assert!(verify_radius_identity(&g) < 1e-15);
        assert!(verify_telescoping(&g).unwrap() < 1e-15);
    }

    #[test]
    fn nearly_doubled_back_triple_is_accurate() {
        for eps in [1.3e-8, 1e-10, 1e-13] {
            let d = 0.5 - eps;
            let g = build_chain(&seq(&[0.0, 0.3, 0.3 + d])).unwrap();
            assert!(g.circumradius_spread < 1e-14, "eps = {eps}");
            assert!(verify_radius_identity(&g) < 1e-14);
            assert!(verify_center_spacing(&g) < 1e-12);
        }
    }

    #[test]
    fn telescoping_small_cases() {
        let g = build_chain(&seq(&[0.0, 0.2, 0.55])).unwrap();
        assert!(verify_telescoping(&g).unwrap() <= 1e-13);
        let g2 = build_chain(&seq(&[0.0, 0.3])).unwrap();
        assert!(verify_telescoping(&g2).is_err());
    }

    #[test]
    fn trace_on_extremal_third_is_tight() {
        let g = build_chain(&seq(&[0.0, 1.0 / 3.0, 1.0])).unwrap();
        let t = kuzmin_bound_trace(&g, 1.0 / 3.0).unwrap();
        let root3 = 3f64.sqrt();
        assert!((t.total - root3).abs() < 1e-12);
        assert!((t.closed_form - root3).abs() < 1e-12);
        assert!((t.abs_sum - root3).abs() < 1e-12);
        assert!(t.lower_holds && t.upper_holds);
        // 2 / sin(pi/3) is strictly looser
        assert!(t.kuzmin_bound > t.total + 0.5);
    }

    #[test]
    fn trace_requires_admissibility() {
        let g = build_chain(&seq(&[0.0, 0.3, 0.5])).unwrap();
        assert!(matches!(
            kuzmin_bound_trace(&g, 0.2),
            Err(Error::NotAdmissible { .. })
        ));
    }
}
