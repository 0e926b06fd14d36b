//! Exponential sums `sum_k e^{2 pi i a_k}` over phase sequences whose gaps are
//! non-decreasing and confined to `[theta, 1 - theta]`, and the sharp bound
//! `cot(pi theta / 2)` on their modulus.
//!
//! * [`phases`]: sequences, gaps, admissibility, the compensated sum.
//! * [`bounds`]: the bound ladder and per-sequence reports.
//! * [`kuzmin`]: the partial-sum polygon and circumcenter identities.
//! * [`landau`]: the three-group rewriting of the sum and the refined bound.
//! * [`extremal`]: attaining and near-attaining sequences, the false-bound
//!   counterexample and the best-constant scan.
//! * [`search`]: projected gradient ascent over admissible gap profiles.

pub mod bounds;
pub mod cli;
pub mod compensated;
pub mod error;
pub mod extremal;
pub mod formats;
pub mod kuzmin;
pub mod landau;
pub mod phases;
pub mod search;

pub use bounds::{bound_ladder, bound_report, BoundLadder, BoundReport};
pub use error::{Error, Result};
pub use extremal::{
    attainment_check, best_constant_scan, extremal_half, extremal_sequence, near_extremal,
    odd_fraction_in, refute_false_bound, ExtremalWitness, OddFraction, RefuteScope,
};
pub use kuzmin::{build_chain, ChainGeometry};
pub use landau::{landau_decompose, refined_bound, LandauDecomposition};
pub use phases::{check_admissible, exp_sum, gap_profile, AdmissibilityReport, PhaseSequence};
pub use search::{maximize, project_admissible, SearchConfig, SearchResult};
