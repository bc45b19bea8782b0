use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

/// Name of the reserved single-valued variable backing the `true` formula.
pub const TRUE_VAR: &str = "__true";
/// Its only label.
pub const TRUE_LABEL: &str = "true";

/// A PEL formula in normalized form: conjunction and unconditional belief
/// are desugared on construction, so structural equality is registry
/// identity.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Atom { var: String, value: String },
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    BelCond {
        agent: String,
        stage: usize,
        threshold: f64,
        body: Box<Formula>,
        condition: Box<Formula>,
    },
}

impl Formula {
    pub fn atom(var: impl Into<String>, value: impl Into<String>) -> Self {
        Formula::Atom { var: var.into(), value: value.into() }
    }

    pub fn truth() -> Self {
        Formula::atom(TRUE_VAR, TRUE_LABEL)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Formula) -> Self {
        Formula::Not(Box::new(inner))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// `a and b`, stored as `!(!a or !b)`.
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::or(Formula::not(a), Formula::not(b)))
    }

    pub fn bel_cond(agent: impl Into<String>, stage: usize, threshold: f64, body: Formula, condition: Formula) -> Self {
        Formula::BelCond {
            agent: agent.into(),
            stage,
            threshold,
            body: Box::new(body),
            condition: Box::new(condition),
        }
    }

    /// Unconditional belief, stored as belief conditioned on `true`.
    pub fn bel(agent: impl Into<String>, stage: usize, threshold: f64, body: Formula) -> Self {
        Formula::bel_cond(agent, stage, threshold, body, Formula::truth())
    }

    pub fn is_truth(&self) -> bool {
        matches!(self, Formula::Atom { var, value } if var == TRUE_VAR && value == TRUE_LABEL)
    }

    /// Nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom { .. } => 0,
            Formula::Not(f) => 1 + f.depth(),
            Formula::Or(a, b) => 1 + a.depth().max(b.depth()),
            Formula::BelCond { body, condition, .. } => 1 + body.depth().max(condition.depth()),
        }
    }

    /// Number of belief operators, counting repeats.
    pub fn belief_count(&self) -> usize {
        match self {
            Formula::Atom { .. } => 0,
            Formula::Not(f) => f.belief_count(),
            Formula::Or(a, b) => a.belief_count() + b.belief_count(),
            Formula::BelCond { body, condition, .. } => 1 + body.belief_count() + condition.belief_count(),
        }
    }

    /// Visit this formula and every subformula, children first.
    pub fn for_each_subformula<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        match self {
            Formula::Atom { .. } => {}
            Formula::Not(inner) => inner.for_each_subformula(f),
            Formula::Or(a, b) => {
                a.for_each_subformula(f);
                b.for_each_subformula(f);
            }
            Formula::BelCond { body, condition, .. } => {
                body.for_each_subformula(f);
                condition.for_each_subformula(f);
            }
        }
        f(self);
    }
}

/// Prints in the concrete syntax accepted by [`super::parse_formula`];
/// disjunctions are fully parenthesized so the output re-parses to the
/// same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { var, value } => write!(f, "{var}={value}"),
            Formula::Not(inner) => match **inner {
                Formula::Atom { .. } => write!(f, "!({inner})"),
                _ => write!(f, "!{inner}"),
            },
            Formula::Or(a, b) => write!(f, "({a} or {b})"),
            Formula::BelCond { agent, stage, threshold, body, condition } => {
                if condition.is_truth() && matches!(**body, Formula::Or(..)) {
                    write!(f, "Bel[{agent},{stage}] >= {threshold} {body}")
                } else if condition.is_truth() {
                    write!(f, "Bel[{agent},{stage}] >= {threshold} ({body})")
                } else {
                    write!(f, "BelCond[{agent},{stage}] >= {threshold} ({body} | {condition})")
                }
            }
        }
    }
}
