//! Validation findings shared by networks, PEL models and influence diagrams.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// One violated invariant, naming the offending variable, agent or node.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    MissingCpd { variable: String },
    /// The listed variables lie on or behind a directed cycle.
    Cycle { variables: Vec<String> },
    RowCountMismatch { variable: String, expected: usize, found: usize },
    RowLengthMismatch { variable: String, row: usize, expected: usize, found: usize },
    RowNotNormalized { variable: String, row: usize, sum: f64 },
    NegativeEntry { variable: String, row: usize, value: f64 },
    UnknownVariable { context: String, name: String },
    PerfectRecall { agent: String, earlier: usize, later: usize, variable: String },
    UtilityHasChild { utility: String, child: String },
    UtilityTableSize { utility: String, expected: usize, found: usize },
    DecisionHasCpd { decision: String },
    DecisionOrder { earlier: String, later: String },
    NoForgetting { earlier: String, later: String, missing: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::MissingCpd { variable } => write!(f, "missing-cpd: {variable}"),
            Diagnostic::Cycle { variables } => write!(f, "cycle: {}", variables.join(", ")),
            Diagnostic::RowCountMismatch { variable, expected, found } => {
                write!(f, "row-count-mismatch: {variable} expects {expected} rows, found {found}")
            }
            Diagnostic::RowLengthMismatch { variable, row, expected, found } => write!(
                f,
                "row-length-mismatch: {variable} row {row} expects {expected} entries, found {found}"
            ),
            Diagnostic::RowNotNormalized { variable, row, sum } => {
                write!(f, "row-not-normalized: {variable} row {row} sums to {sum}")
            }
            Diagnostic::NegativeEntry { variable, row, value } => {
                write!(f, "negative-entry: {variable} row {row} has {value}")
            }
            Diagnostic::UnknownVariable { context, name } => {
                write!(f, "unknown-variable: {name} ({context})")
            }
            Diagnostic::PerfectRecall { agent, earlier, later, variable } => write!(
                f,
                "perfect-recall: agent {agent} observes {variable} at stage {earlier} but not at stage {later}"
            ),
            Diagnostic::UtilityHasChild { utility, child } => {
                write!(f, "utility-has-child: {utility} is a parent of {child}")
            }
            Diagnostic::UtilityTableSize { utility, expected, found } => write!(
                f,
                "utility-table-size: {utility} expects {expected} entries, found {found}"
            ),
            Diagnostic::DecisionHasCpd { decision } => {
                write!(f, "decision-has-cpd: {decision}")
            }
            Diagnostic::DecisionOrder { earlier, later } => write!(
                f,
                "decision-order: {later} is an ancestor of the earlier decision {earlier}"
            ),
            Diagnostic::NoForgetting { earlier, later, missing } => write!(
                f,
                "no-forgetting: {later} does not observe {missing} (known at {earlier})"
            ),
        }
    }
}
