//! Phase input, JSON report shapes, CSV tables and the chain SVG.
//!
//! The layouts here are a stable interface; FORMATS.md in the repository root
//! documents them field by field.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{BestConstantRow, ExtremalWitness, NearExtremal, Refutation};
use crate::kuzmin::{
    verify_center_spacing, verify_radius_identity, verify_telescoping, ChainGeometry, KuzminTrace,
};
use crate::landau::{refined_bound, verify_shift_identity, LandauDecomposition};
use crate::phases::PhaseSequence;

/// Parses either a JSON array of numbers or newline-delimited decimals.
///
/// In the text form blank lines and lines starting with `#` are ignored.
pub fn parse_phases(text: &str) -> Result<PhaseSequence> {
    let trimmed = text.trim_start();
    let values: Vec<f64> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| Error::Parse(format!("phase JSON: {e}")))?
    } else {
        text.lines()
            .enumerate()
            .map(|(i, l)| (i, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .map(|(i, l)| {
                l.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {l:?}: {e}", i + 1)))
            })
            .collect::<Result<_>>()?
    };
    PhaseSequence::new(values)
}

/// Comma- or whitespace-separated phases, e.g. `"0,0.2,0.5"`.
pub fn parse_inline_phases(text: &str) -> Result<PhaseSequence> {
    let values = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| Error::Parse(format!("inline phase {t:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    PhaseSequence::new(values)
}

pub fn read_phases(path: &Path) -> Result<PhaseSequence> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_phases(&text)
}

/// One phase per line, shortest round-trip decimal form.
pub fn format_phases(a: &PhaseSequence) -> String {
    let mut out = String::new();
    for x in a.phases() {
        let _ = writeln!(out, "{x:?}");
    }
    out
}

/// Decimal (`0.3`) or fraction (`P/Q`) form of theta.
pub fn parse_theta(text: &str) -> Result<f64> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: f64 = p
            .trim()
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("theta {t:?}: {e}")))? as f64;
        let q: f64 = q
            .trim()
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("theta {t:?}: {e}")))? as f64;
        if q == 0.0 {
            return Err(Error::Parse(format!("theta {t:?}: zero denominator")));
        }
        Ok(p / q)
    } else {
        t.parse::<f64>()
            .map_err(|e| Error::Parse(format!("theta {t:?}: {e}")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessJson {
    pub theta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fraction: Option<String>,
    pub n: usize,
    pub phases: Vec<f64>,
    pub abs_sum: f64,
    pub target: f64,
    pub attained: bool,
    pub margin: f64,
}

impl WitnessJson {
    pub fn extremal(w: &ExtremalWitness) -> Self {
        Self {
            theta: w.theta,
            theta_prime: None,
            fraction: Some(match w.fraction {
                Some(f) => f.to_string(),
                None => "1/2".to_string(),
            }),
            n: w.sequence.len(),
            phases: w.sequence.phases().to_vec(),
            abs_sum: w.abs_sum,
            target: w.target,
            attained: w.attained,
            margin: w.abs_sum - w.target,
        }
    }

    pub fn near_extremal(r: &NearExtremal) -> Self {
        let w = &r.witness;
        Self {
            theta: r.theta,
            theta_prime: Some(w.theta),
            fraction: Some(match w.fraction {
                Some(f) => f.to_string(),
                None => "1/2".to_string(),
            }),
            n: w.sequence.len(),
            phases: w.sequence.phases().to_vec(),
            abs_sum: w.abs_sum,
            target: r.target,
            attained: w.abs_sum >= r.target - crate::extremal::ATTAINMENT_TOLERANCE,
            margin: w.abs_sum - r.target,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NearExtremalJson {
    #[serde(flatten)]
    pub witness: WitnessJson,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefutationJson {
    #[serde(flatten)]
    pub witness: WitnessJson,
    /// Theta at which the false bound is evaluated.
    pub parameter: f64,
    pub bound_false: f64,
    pub bound_landau: f64,
    pub crossing: f64,
}

impl RefutationJson {
    pub fn new(r: &Refutation) -> Self {
        let w = &r.witness;
        Self {
            witness: WitnessJson {
                theta: r.theta,
                theta_prime: Some(w.theta),
                fraction: w.fraction.map(|f| f.to_string()),
                n: w.sequence.len(),
                phases: w.sequence.phases().to_vec(),
                abs_sum: w.abs_sum,
                target: w.target,
                attained: w.attained,
                margin: r.margin,
            },
            parameter: r.parameter,
            bound_false: r.bound_false,
            bound_landau: r.bound_landau,
            crossing: r.crossing,
        }
    }
}

pub const LANDAU_CSV_HEADER: &str = "k,b,cot_b,middle_re,middle_im";

/// Rows `k = 2 .. n`; the middle columns are empty for `k = n`.
pub fn landau_csv(d: &LandauDecomposition) -> String {
    let mut out = String::from(LANDAU_CSV_HEADER);
    out.push('\n');
    for (j, (&b, cot)) in d.b.iter().zip(d.cot_b()).enumerate() {
        let k = j + 2;
        match d.middle.get(j) {
            Some(m) => {
                let _ = writeln!(out, "{k},{b:?},{cot:?},{:?},{:?}", m.re, m.im);
            }
            None => {
                let _ = writeln!(out, "{k},{b:?},{cot:?},,");
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct LandauSummary {
    pub method: &'static str,
    pub n: usize,
    pub sum_re: f64,
    pub sum_im: f64,
    pub abs_sum: f64,
    pub reconstruction_re: f64,
    pub reconstruction_im: f64,
    pub residual: f64,
    pub shift_identity_residual: f64,
    pub head_abs: f64,
    pub tail_abs: f64,
    /// Null when the gaps are not non-decreasing.
    pub refined_bound: Option<f64>,
}

pub fn landau_summary(a: &PhaseSequence, d: &LandauDecomposition) -> Result<LandauSummary> {
    Ok(LandauSummary {
        method: "landau",
        n: d.n(),
        sum_re: d.direct.re,
        sum_im: d.direct.im,
        abs_sum: d.direct.norm(),
        reconstruction_re: d.reconstruction.re,
        reconstruction_im: d.reconstruction.im,
        residual: d.residual,
        shift_identity_residual: verify_shift_identity(a)?,
        head_abs: d.head.norm(),
        tail_abs: d.tail.norm(),
        refined_bound: refined_bound(a).ok(),
    })
}

pub const KUZMIN_CSV_HEADER: &str =
    "m,a_re,a_im,mid_re,mid_im,center_re,center_im,turn_angle,radius";

/// Rows `m = 0 .. n`; columns that do not exist for a given `m` are empty.
pub fn kuzmin_csv(g: &ChainGeometry) -> String {
    let mut out = String::from(KUZMIN_CSV_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
    for (m, a) in g.partial_sums.iter().enumerate() {
        let mid = m.checked_sub(1).and_then(|i| g.midpoints.get(i));
        let idx = m.checked_sub(1);
        let center = idx.and_then(|i| g.centers.get(i));
        let turn = idx.and_then(|i| g.turn_angles.get(i)).copied();
        let radius = idx.and_then(|i| g.radii.get(i)).copied();
        let _ = writeln!(
            out,
            "{m},{:?},{:?},{},{},{},{},{},{}",
            a.re,
            a.im,
            opt(mid.map(|z| z.re)),
            opt(mid.map(|z| z.im)),
            opt(center.map(|z| z.re)),
            opt(center.map(|z| z.im)),
            opt(turn),
            opt(radius),
        );
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceJson {
    pub theta: f64,
    pub tail: f64,
    pub center_path: f64,
    pub head: f64,
    pub total: f64,
    pub closed_form: f64,
    pub kuzmin_bound: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

impl From<&KuzminTrace> for TraceJson {
    fn from(t: &KuzminTrace) -> Self {
        Self {
            theta: t.theta,
            tail: t.tail,
            center_path: t.center_path,
            head: t.head,
            total: t.total,
            closed_form: t.closed_form,
            kuzmin_bound: t.kuzmin_bound,
            lower_holds: t.lower_holds,
            upper_holds: t.upper_holds,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KuzminSummary {
    pub method: &'static str,
    pub n: usize,
    pub sum_re: f64,
    pub sum_im: f64,
    pub abs_sum: f64,
    pub radius_residual: f64,
    pub center_spacing_residual: f64,
    /// Null for `n < 3`.
    pub telescoping_residual: Option<f64>,
    pub circumradius_spread: f64,
    pub unit_step_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceJson>,
}

pub fn kuzmin_summary(g: &ChainGeometry, trace: Option<&KuzminTrace>) -> KuzminSummary {
    let end = g.endpoint();
    KuzminSummary {
        method: "kuzmin",
        n: g.n(),
        sum_re: end.re,
        sum_im: end.im,
        abs_sum: end.norm(),
        radius_residual: verify_radius_identity(g),
        center_spacing_residual: verify_center_spacing(g),
        telescoping_residual: verify_telescoping(g).ok(),
        circumradius_spread: g.circumradius_spread,
        unit_step_error: g.unit_step_error,
        trace: trace.map(TraceJson::from),
    }
}

pub const BEST_CONSTANT_CSV_HEADER: &str = "j,theta,abs_sum,theta_times_abs_sum";

pub fn best_constant_csv(rows: &[BestConstantRow]) -> String {
    let mut out = String::from(BEST_CONSTANT_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{:?},{:?},{:?}", r.j, r.theta, r.abs_sum, r.scaled);
    }
    out
}

const SVG_SIZE: f64 = 1000.0;
const SVG_MARGIN: f64 = 0.05 * SVG_SIZE;

/// The unit-step chain as a polyline, circumcenters as 3-unit crosses and,
/// optionally, the circumcircles. Coordinates are printed with three decimals
/// so the output is byte-stable.
pub fn chain_svg(g: &ChainGeometry, circles: bool) -> String {
    let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut include = |z: Complex64, r: f64| {
        lo.re = lo.re.min(z.re - r);
        lo.im = lo.im.min(z.im - r);
        hi.re = hi.re.max(z.re + r);
        hi.im = hi.im.max(z.im + r);
    };
    for &z in g.partial_sums.iter().chain(&g.centers) {
        include(z, 0.0);
    }
    if circles {
        for (&c, &r) in g.centers.iter().zip(&g.radii) {
            include(c, r);
        }
    }
    let extent = (hi.re - lo.re).max(hi.im - lo.im);
    let scale = if extent > 0.0 {
        (SVG_SIZE - 2.0 * SVG_MARGIN) / extent
    } else {
        1.0
    };
    let mid = (lo + hi) / 2.0;
    let half = SVG_SIZE / 2.0;
    let map = |z: Complex64| {
        (
            half + (z.re - mid.re) * scale,
            half - (z.im - mid.im) * scale,
        )
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1000 1000" width="1000" height="1000">"#
    );
    let _ = writeln!(out, r#"<rect width="1000" height="1000" fill="white"/>"#);
    if circles {
        let _ = writeln!(
            out,
            r##"<g id="circles" fill="none" stroke="#999999" stroke-width="1">"##
        );
        for (&c, &r) in g.centers.iter().zip(&g.radii) {
            let (x, y) = map(c);
            let _ = writeln!(
                out,
                r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}"/>"#,
                r * scale
            );
        }
        let _ = writeln!(out, "</g>");
    }
    let points: Vec<String> = g
        .partial_sums
        .iter()
        .map(|&z| {
            let (x, y) = map(z);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline id="chain" fill="none" stroke="black" stroke-width="2" points="{}"/>"#,
        points.join(" ")
    );
    let _ = writeln!(
        out,
        r##"<g id="centers" stroke="#c0392b" stroke-width="1.5">"##
    );
    for &c in &g.centers {
        let (x, y) = map(c);
        let _ = writeln!(
            out,
            r#"<path d="M{:.3} {y:.3}H{:.3}M{x:.3} {:.3}V{:.3}"/>"#,
            x - 3.0,
            x + 3.0,
            y - 3.0,
            y + 3.0
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kuzmin::build_chain;
    use crate::landau::landau_decompose;

    #[test]
    fn parses_text_and_json() {
        let a = parse_phases("0\n0.2\n\n# comment\n0.5\n").unwrap();
        assert_eq!(a.phases(), &[0.0, 0.2, 0.5]);
        let b = parse_phases(" [0, 0.2, 0.5]").unwrap();
        assert_eq!(a, b);
        assert!(parse_phases("0\nabc\n").is_err());
        assert!(parse_phases("[0, \"x\"]").is_err());
        assert!(parse_phases("").is_err());
        assert!(parse_phases("0.5\n0.1\n").is_err());
    }

    #[test]
    fn parses_inline() {
        let a = parse_inline_phases("0,0.3, 0.5").unwrap();
        assert_eq!(a.phases(), &[0.0, 0.3, 0.5]);
        assert!(parse_inline_phases("0,,x").is_err());
    }

    #[test]
    fn phases_round_trip_through_text() {
        let a = PhaseSequence::new(vec![0.0, 0.1 + 0.2, 1.0 / 3.0, 7.000000000000001]).unwrap();
        assert_eq!(parse_phases(&format_phases(&a)).unwrap(), a);
    }

    #[test]
    fn theta_forms() {
        assert_eq!(parse_theta("0.25").unwrap(), 0.25);
        assert_eq!(parse_theta("1/3").unwrap(), 1.0 / 3.0);
        assert!(parse_theta("1/0").is_err());
        assert!(parse_theta("a/3").is_err());
    }

    #[test]
    fn csv_shapes() {
        let a = PhaseSequence::new(vec![0.0, 0.25, 0.6]).unwrap();
        let csv = landau_csv(&landau_decompose(&a).unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], LANDAU_CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[2].ends_with(",,"));

        let csv = kuzmin_csv(&build_chain(&a).unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], KUZMIN_CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines.iter().all(|l| l.split(',').count() == 9));
        assert!(lines[1].starts_with("0,0.0,0.0,,"));
        assert!(lines[4].ends_with(",,,,"));
    }

    #[test]
    fn svg_is_deterministic_and_framed() {
        let a = PhaseSequence::new(vec![0.0, 0.2, 0.45, 0.75]).unwrap();
        let g = build_chain(&a).unwrap();
        let s1 = chain_svg(&g, true);
        let s2 = chain_svg(&g, true);
        assert_eq!(s1, s2);
        assert!(s1.contains(r#"viewBox="0 0 1000 1000""#));
        assert_eq!(s1.matches("<circle").count(), 3);
        assert_eq!(chain_svg(&g, false).matches("<circle").count(), 0);
        assert_eq!(s1.matches("<path").count(), 3);
    }
}
