//! Probabilistic epistemic logic over discrete Bayesian networks.
//!
//! A common-prior world model is a [`Network`] of finite-domain variables
//! with tabular CPDs. Agents observe subsets of those variables in stages
//! ([`ObservationSchedule`]), and graded belief formulas ([`Formula`]) are
//! evaluated by adding deterministic indicator nodes to the network
//! ([`PelModel::create_node`]). Decision CPDs for a single rational agent
//! are derived by solving an [`InfluenceDiagram`] and converting it back to
//! a network with [`id_to_bn`].
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod decision;
pub mod diagnostics;
pub mod examples;
pub mod factor;
pub mod graph;
pub mod inference;
pub mod pel;

pub use decision::{
    expected_utility, id_to_bn, solve_id, validate_id, DecisionError, DecisionRule,
    IdNode, InfluenceDiagram, NodeId, NodeKind, Policy,
};
pub use diagnostics::Diagnostic;
pub use factor::Factor;
pub use graph::{parent_row_index, row_instantiation, Cpd, GraphError, Network, VarId, Variable, WorldState};
pub use inference::{
    d_separated, enumerate_joint, evidence_probability, probability_of, query, relevant_observations, Conditional,
    Evidence, InferenceError, JointTable, DEFAULT_STATE_CAP,
};
pub use pel::{
    eval_state, formula_probability_oracle, parse_formula, Formula, InferenceStats,
    ObservationSchedule, ParseError, PelError, PelModel, BELIEF_TOLERANCE, TRUE_VAR,
};
