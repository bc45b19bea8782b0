//! Probabilistic epistemic logic: formulas, observation schedules, the
//! brute-force satisfaction oracle, and indicator-node construction.

mod formula;
mod model;
mod parser;
mod schedule;
mod semantics;

pub use formula::{Formula, TRUE_LABEL, TRUE_VAR};
pub use model::{InferenceStats, PelError, PelModel, DEFAULT_MAX_RELEVANT};
pub use parser::{parse_formula, ParseError};
pub use schedule::ObservationSchedule;
pub use semantics::{eval_state, formula_probability_oracle, Oracle};

/// Slack applied to every belief-threshold comparison, `p >= r - tol`.
pub const BELIEF_TOLERANCE: f64 = 1e-12;

pub(crate) fn meets_threshold(p: f64, threshold: f64) -> bool {
    p >= threshold - BELIEF_TOLERANCE
}
