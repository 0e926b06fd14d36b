use thiserror::Error;

use crate::extremal::RefutationDiagnostics;
use crate::phases::AdmissibilityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid phase sequence: {0}")]
    InvalidSequence(String),

    #[error("sequence is not admissible for theta = {theta}")]
    NotAdmissible {
        theta: f64,
        report: Box<AdmissibilityReport>,
    },

    /// Three consecutive partial sums are (nearly) collinear, so no circumcircle exists.
    #[error("degenerate triple at m = {index}: gap {gap} is too close to an integer")]
    DegenerateTriple { index: usize, gap: f64 },

    /// `sin b_k` vanishes, so the Landau weights blow up.
    #[error("degenerate gap at k = {index}: |sin b_k| = {sin_b:e}")]
    DegenerateGap { index: usize, sin_b: f64 },

    #[error("sequence too short: need at least {need} phases, got {got}")]
    TooShort { need: usize, got: usize },

    #[error("gaps are not non-decreasing (first violation at k = {index})")]
    NonMonotoneGaps { index: usize },

    #[error("invalid odd/odd fraction: {0}")]
    InvalidFraction(String),

    #[error("invalid interval ({lo}, {hi})")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("no counterexample to |S| <= 1/(pi theta) + 1 at theta = {}", .0.theta)]
    NoCounterexample(Box<RefutationDiagnostics>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid_theta(theta: f64) -> Self {
        Error::InvalidParameter(format!("theta must lie in (0, 1/2], got {theta}"))
    }
}

/// Rejects anything outside `(0, 1/2]`, NaN included.
pub(crate) fn validate_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= 0.5 {
        Ok(())
    } else {
        Err(Error::invalid_theta(theta))
    }
}
