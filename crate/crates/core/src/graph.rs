//! Finite-domain variables, tabular CPDs and the acyclic network carrying
//! the common prior.
//!
//! CPD rows are indexed in mixed radix over the parent list with the
//! *first* parent most significant: for parents `[X, M]` with two values
//! each, row `2` is `X = 1, M = 0`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::diagnostics::Diagnostic;

/// Largest deviation of a CPD row sum from one that is accepted.
pub const ROW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub domain: Vec<String>,
}

impl Variable {
    pub fn cardinality(&self) -> usize {
        self.domain.len()
    }

    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.domain.iter().position(|l| l == label)
    }
}

/// Conditional distribution of `child` given `parents`, one row per parent
/// instantiation.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpd {
    pub child: VarId,
    pub parents: Vec<VarId>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("variable `{var}` repeats the label `{label}`")]
    DuplicateLabel { var: String, label: String },
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("CPD for `{var}` lists parent `{parent}` twice")]
    DuplicateParent { var: String, parent: String },
    #[error("CPD for `{0}` would introduce a cycle")]
    CycleIntroduced(String),
    #[error("CPD for `{var}` needs {expected} rows, got {found}")]
    RowCountMismatch { var: String, expected: usize, found: usize },
    #[error("CPD for `{var}` row {row} needs {expected} entries, got {found}")]
    RowLengthMismatch { var: String, row: usize, expected: usize, found: usize },
    #[error("CPD for `{var}` row {row} sums to {sum}")]
    RowNotNormalized { var: String, row: usize, sum: f64 },
    #[error("CPD for `{var}` row {row} has negative entry {value}")]
    NegativeEntry { var: String, row: usize, value: f64 },
    #[error("instantiation length {found} does not match {expected} parents")]
    LengthMismatch { expected: usize, found: usize },
    #[error("value index {index} out of range for cardinality {cardinality}")]
    IndexOutOfRange { index: usize, cardinality: usize },
    #[error("network contains a cycle through {0:?}")]
    CycleDetected(Vec<String>),
}

/// A complete assignment of value indices, indexed by [`VarId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WorldState(pub Vec<usize>);

impl WorldState {
    pub fn value(&self, var: VarId) -> usize {
        self.0[var.0]
    }
}

/// Mixed-radix index of `instantiation` over variables with the given
/// cardinalities, first position most significant.
pub fn mixed_radix_index(cardinalities: &[usize], instantiation: &[usize]) -> Result<usize, GraphError> {
    if cardinalities.len() != instantiation.len() {
        return Err(GraphError::LengthMismatch {
            expected: cardinalities.len(),
            found: instantiation.len(),
        });
    }
    let mut index = 0;
    for (&card, &value) in cardinalities.iter().zip(instantiation) {
        if value >= card {
            return Err(GraphError::IndexOutOfRange { index: value, cardinality: card });
        }
        index = index * card + value;
    }
    Ok(index)
}

/// Row of a CPD whose parents are `parents` selected by `instantiation`.
pub fn parent_row_index(
    network: &Network,
    parents: &[VarId],
    instantiation: &[usize],
) -> Result<usize, GraphError> {
    let cards = parents
        .iter()
        .map(|&p| network.variable(p).map(Variable::cardinality))
        .collect::<Result<Vec<_>, _>>()?;
    mixed_radix_index(&cards, instantiation)
}

/// Inverse of [`mixed_radix_index`].
pub fn row_instantiation(cardinalities: &[usize], mut row: usize) -> Vec<usize> {
    let mut out = vec![0; cardinalities.len()];
    for (slot, &card) in out.iter_mut().zip(cardinalities).rev() {
        *slot = row % card;
        row /= card;
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Network {
    variables: Vec<Variable>,
    cpds: Vec<Option<Cpd>>,
    by_name: BTreeMap<String, VarId>,
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable<S: Into<String>>(&mut self, name: S, domain: Vec<String>) -> Result<VarId, GraphError> {
        let name = name.into();
        if self.by_name.contains_key(&name) {
            return Err(GraphError::DuplicateName(name));
        }
        if domain.is_empty() {
            return Err(GraphError::EmptyDomain(name));
        }
        let mut seen = BTreeSet::new();
        for label in &domain {
            if !seen.insert(label.as_str()) {
                return Err(GraphError::DuplicateLabel { var: name, label: label.clone() });
            }
        }
        let id = VarId(self.variables.len());
        self.by_name.insert(name.clone(), id);
        self.variables.push(Variable { name, domain });
        self.cpds.push(None);
        Ok(id)
    }

    /// Store the CPD of `child`, replacing any previous one.
    pub fn set_cpd(&mut self, child: VarId, parents: Vec<VarId>, rows: Vec<Vec<f64>>) -> Result<(), GraphError> {
        self.check_parents(child, &parents)?;
        if parents.contains(&child) || parents.iter().any(|&p| self.reaches(child, p)) {
            return Err(GraphError::CycleIntroduced(self.variables[child.0].name.clone()));
        }
        let cpd = Cpd { child, parents, rows };
        if let Some(problem) = self.cpd_problems(&cpd).into_iter().next() {
            return Err(problem);
        }
        self.cpds[child.0] = Some(cpd);
        Ok(())
    }

    /// Store a CPD checking only that the ids exist. Loaders use this so
    /// that every remaining problem surfaces through [`Network::validate`].
    pub fn set_cpd_unchecked(&mut self, child: VarId, parents: Vec<VarId>, rows: Vec<Vec<f64>>) -> Result<(), GraphError> {
        self.check_parents(child, &parents)?;
        self.cpds[child.0] = Some(Cpd { child, parents, rows });
        Ok(())
    }

    fn check_parents(&self, child: VarId, parents: &[VarId]) -> Result<(), GraphError> {
        self.variable(child)?;
        for (i, &p) in parents.iter().enumerate() {
            self.variable(p)?;
            if parents[..i].contains(&p) {
                return Err(GraphError::DuplicateParent {
                    var: self.variables[child.0].name.clone(),
                    parent: self.variables[p.0].name.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.variables.len()).map(VarId)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> Result<&Variable, GraphError> {
        self.variables
            .get(id.0)
            .ok_or_else(|| GraphError::UnknownVariable(alloc::format!("{id}")))
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.variables[id.0].name
    }

    pub fn cardinality(&self, id: VarId) -> usize {
        self.variables[id.0].domain.len()
    }

    pub fn id_of(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn cpd(&self, id: VarId) -> Option<&Cpd> {
        self.cpds.get(id.0).and_then(Option::as_ref)
    }

    pub fn parents(&self, id: VarId) -> &[VarId] {
        self.cpd(id).map(|c| c.parents.as_slice()).unwrap_or(&[])
    }

    /// Child lists for every variable, in id order.
    pub fn children_lists(&self) -> Vec<Vec<VarId>> {
        let mut children = vec![Vec::new(); self.variables.len()];
        for cpd in self.cpds.iter().flatten() {
            for &p in &cpd.parents {
                children[p.0].push(cpd.child);
            }
        }
        children
    }

    /// Probability that `child` takes `value` given a full world state.
    pub fn cpd_entry(&self, child: VarId, state: &[usize]) -> f64 {
        let cpd = self.cpds[child.0].as_ref().expect("validated network");
        let mut row = 0;
        for &p in &cpd.parents {
            row = row * self.cardinality(p) + state[p.0];
        }
        cpd.rows[row][state[child.0]]
    }

    /// `from` and every variable with a directed path into it.
    pub fn ancestors<I: IntoIterator<Item = VarId>>(&self, from: I) -> BTreeSet<VarId> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<VarId> = from.into_iter().collect();
        while let Some(v) = stack.pop() {
            if seen.insert(v) {
                stack.extend(self.parents(v).iter().copied());
            }
        }
        seen
    }

    /// `from` and every variable reachable from it along directed edges.
    pub fn descendants(&self, from: VarId) -> BTreeSet<VarId> {
        let children = self.children_lists();
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            if seen.insert(v) {
                stack.extend(children[v.0].iter().copied());
            }
        }
        seen
    }

    fn reaches(&self, from: VarId, to: VarId) -> bool {
        self.descendants(from).contains(&to)
    }

    fn cpd_problems(&self, cpd: &Cpd) -> Vec<GraphError> {
        let var = self.variables[cpd.child.0].name.clone();
        let expected: usize = cpd.parents.iter().map(|&p| self.cardinality(p)).product();
        if cpd.rows.len() != expected {
            return vec![GraphError::RowCountMismatch { var, expected, found: cpd.rows.len() }];
        }
        let width = self.cardinality(cpd.child);
        let mut problems = Vec::new();
        for (row, entries) in cpd.rows.iter().enumerate() {
            if entries.len() != width {
                problems.push(GraphError::RowLengthMismatch {
                    var: var.clone(),
                    row,
                    expected: width,
                    found: entries.len(),
                });
                continue;
            }
            if let Some(&value) = entries.iter().find(|&&p| p < 0.0) {
                problems.push(GraphError::NegativeEntry { var: var.clone(), row, value });
                continue;
            }
            let sum: f64 = entries.iter().sum();
            if sum.is_nan() || (sum - 1.0).abs() > ROW_TOLERANCE {
                problems.push(GraphError::RowNotNormalized { var: var.clone(), row, sum });
            }
        }
        problems
    }

    /// One diagnostic per violated invariant; empty iff the network is
    /// fully specified, consistent and acyclic.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (i, var) in self.variables.iter().enumerate() {
            match &self.cpds[i] {
                None => out.push(Diagnostic::MissingCpd { variable: var.name.clone() }),
                Some(cpd) => out.extend(self.cpd_problems(cpd).into_iter().map(graph_diagnostic)),
            }
        }
        if let Err(GraphError::CycleDetected(vars)) = self.topological_order() {
            out.push(Diagnostic::Cycle { variables: vars });
        }
        out
    }

    /// Parents before children; ready variables leave in insertion order.
    pub fn topological_order(&self) -> Result<Vec<VarId>, GraphError> {
        let n = self.variables.len();
        let children = self.children_lists();
        let mut indegree: Vec<usize> = (0..n).map(|i| self.parents(VarId(i)).len()).collect();
        let mut ready: BTreeSet<VarId> = (0..n).filter(|&i| indegree[i] == 0).map(VarId).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &children[v.0] {
                indegree[c.0] -= 1;
                if indegree[c.0] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            let stuck = (0..n)
                .filter(|&i| indegree[i] > 0)
                .map(|i| self.variables[i].name.clone())
                .collect();
            Err(GraphError::CycleDetected(stuck))
        }
    }

    /// Copy of the network restricted to `keep`, which must be closed under
    /// parents. Variables keep their names and relative order.
    pub fn sub_network(&self, keep: &BTreeSet<VarId>) -> Result<Network, GraphError> {
        let mut out = Network::new();
        let mut mapping = BTreeMap::new();
        for &id in keep {
            let var = self.variable(id)?;
            mapping.insert(id, out.add_variable(var.name.clone(), var.domain.clone())?);
        }
        for &id in keep {
            if let Some(cpd) = self.cpd(id) {
                let parents = cpd
                    .parents
                    .iter()
                    .map(|p| {
                        mapping
                            .get(p)
                            .copied()
                            .ok_or_else(|| GraphError::UnknownVariable(self.name(*p).into()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                out.set_cpd_unchecked(mapping[&id], parents, cpd.rows.clone())?;
            }
        }
        Ok(out)
    }
}

fn graph_diagnostic(err: GraphError) -> Diagnostic {
    match err {
        GraphError::RowCountMismatch { var, expected, found } => {
            Diagnostic::RowCountMismatch { variable: var, expected, found }
        }
        GraphError::RowLengthMismatch { var, row, expected, found } => {
            Diagnostic::RowLengthMismatch { variable: var, row, expected, found }
        }
        GraphError::RowNotNormalized { var, row, sum } => {
            Diagnostic::RowNotNormalized { variable: var, row, sum }
        }
        GraphError::NegativeEntry { var, row, value } => {
            Diagnostic::NegativeEntry { variable: var, row, value }
        }
        other => unreachable!("not a CPD problem: {other}"),
    }
}

/// Owned label list from string slices.
pub fn labels(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| String::from(*s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary() -> Vec<String> {
        labels(&["true", "false"])
    }

    fn two_node() -> (Network, VarId, VarId) {
        let mut net = Network::new();
        let x = net.add_variable("X", binary()).unwrap();
        let y = net.add_variable("Y", binary()).unwrap();
        net.set_cpd(x, vec![], vec![vec![0.5, 0.5]]).unwrap();
        net.set_cpd(y, vec![x], vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        (net, x, y)
    }

    #[test]
    fn add_variable_rules() {
        let mut net = Network::new();
        net.add_variable("V", binary()).unwrap();
        assert_eq!(net.len(), 1);
        assert_eq!(net.add_variable("V", binary()), Err(GraphError::DuplicateName("V".into())));
        let c = net.add_variable("C", labels(&["high", "medium", "low"])).unwrap();
        assert_eq!(net.cardinality(c), 3);
        assert!(matches!(net.add_variable("E", vec![]), Err(GraphError::EmptyDomain(_))));
        assert!(matches!(
            net.add_variable("D", labels(&["a", "a"])),
            Err(GraphError::DuplicateLabel { .. })
        ));
    }

    #[test]
    fn set_cpd_checks() {
        let (mut net, x, y) = two_node();
        assert_eq!(net.cpd(y).unwrap().rows[0], vec![0.9, 0.1]);
        assert_eq!(
            net.set_cpd(y, vec![x], vec![vec![0.9, 0.1]]),
            Err(GraphError::RowCountMismatch { var: "Y".into(), expected: 2, found: 1 })
        );
        assert!(matches!(
            net.set_cpd(x, vec![], vec![vec![0.5, 0.4]]),
            Err(GraphError::RowNotNormalized { .. })
        ));
        assert!(matches!(
            net.set_cpd(x, vec![], vec![vec![1.5, -0.5]]),
            Err(GraphError::NegativeEntry { .. })
        ));
        assert_eq!(
            net.set_cpd(x, vec![y], vec![vec![0.5, 0.5], vec![0.5, 0.5]]),
            Err(GraphError::CycleIntroduced("X".into()))
        );
        // within tolerance, not renormalized
        net.set_cpd(x, vec![], vec![vec![0.5 + 5e-10, 0.5]]).unwrap();
        assert_eq!(net.cpd(x).unwrap().rows[0][0], 0.5 + 5e-10);
    }

    #[test]
    fn validate_reports_each_problem() {
        let (net, _, _) = two_node();
        assert!(net.validate().is_empty());

        let mut missing = Network::new();
        missing.add_variable("X", binary()).unwrap();
        assert_eq!(missing.validate(), vec![Diagnostic::MissingCpd { variable: "X".into() }]);

        let mut cyclic = Network::new();
        let x = cyclic.add_variable("X", binary()).unwrap();
        let y = cyclic.add_variable("Y", binary()).unwrap();
        let rows = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        cyclic.set_cpd_unchecked(x, vec![y], rows.clone()).unwrap();
        cyclic.set_cpd_unchecked(y, vec![x], rows).unwrap();
        assert_eq!(
            cyclic.validate(),
            vec![Diagnostic::Cycle { variables: vec!["X".into(), "Y".into()] }]
        );
    }

    #[test]
    fn topological_order_is_stable() {
        let mut net = Network::new();
        let z = net.add_variable("Z", binary()).unwrap();
        let y = net.add_variable("Y", binary()).unwrap();
        let x = net.add_variable("X", binary()).unwrap();
        let rows = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        net.set_cpd(x, vec![], vec![vec![0.5, 0.5]]).unwrap();
        net.set_cpd(y, vec![x], rows.clone()).unwrap();
        net.set_cpd(z, vec![y], rows).unwrap();
        assert_eq!(net.topological_order().unwrap(), vec![x, y, z]);

        let mut net = Network::new();
        let a = net.add_variable("A", binary()).unwrap();
        let b = net.add_variable("B", binary()).unwrap();
        let c = net.add_variable("C", binary()).unwrap();
        net.set_cpd(c, vec![a, b], vec![vec![0.5, 0.5]; 4]).unwrap();
        assert_eq!(net.topological_order().unwrap(), vec![a, b, c]);
    }

    #[test]
    fn row_index_examples() {
        assert_eq!(mixed_radix_index(&[2, 2], &[1, 0]), Ok(2));
        assert_eq!(mixed_radix_index(&[3], &[2]), Ok(2));
        assert_eq!(mixed_radix_index(&[], &[]), Ok(0));
        assert!(matches!(mixed_radix_index(&[2], &[2]), Err(GraphError::IndexOutOfRange { .. })));
        assert!(matches!(mixed_radix_index(&[2], &[]), Err(GraphError::LengthMismatch { .. })));
        let (net, x, y) = two_node();
        assert_eq!(parent_row_index(&net, &[x, y], &[1, 1]), Ok(3));
    }

    #[test]
    fn row_index_bijective() {
        for cards in [vec![2, 3, 2], vec![4], vec![3, 1, 2, 2], vec![]] {
            let rows: usize = cards.iter().product();
            for row in 0..rows {
                let inst = row_instantiation(&cards, row);
                assert_eq!(mixed_radix_index(&cards, &inst), Ok(row));
            }
        }
    }
}
