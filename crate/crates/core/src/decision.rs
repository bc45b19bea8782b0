//! Single-decision-maker influence diagrams: validation, backward
//! induction, conversion to a Bayesian network, and preference nodes.
//!
//! Decision rules are solved last decision first. For decision `D_i` the
//! solver eliminates every variable outside `Pa(D_i) ∪ {D_i}` from the
//! product of chance CPDs, the already-solved later rules and each utility
//! table; the resulting table is `P(pa) · EU(d | pa)` and its row-wise
//! argmax is the rule. Ties (including rows with `P(pa) = 0`) go to the
//! earliest action in the declared domain.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::diagnostics::Diagnostic;
use crate::factor::{eliminate, Factor};
use crate::graph::{row_instantiation, GraphError, Network, VarId, ROW_TOLERANCE};
use crate::inference::{enumerate_joint, InferenceError};

/// Largest number of parent instantiations a single decision may have.
pub const MAX_DECISION_ROWS: usize = 1 << 16;

/// Relative slack used when comparing expected utilities of actions.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }

    fn var(self) -> VarId {
        VarId(self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Chance,
    Decision,
    Utility,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdNode {
    pub name: String,
    pub kind: NodeKind,
    /// Empty for utility nodes.
    pub domain: Vec<String>,
    pub parents: Vec<NodeId>,
    /// Chance nodes: one distribution per parent instantiation.
    pub rows: Vec<Vec<f64>>,
    /// Utility nodes: one value per parent instantiation.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecisionError {
    #[error("duplicate node name `{0}`")]
    DuplicateName(String),
    #[error("node `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("node `{0}` lists parent `{1}` twice")]
    DuplicateParent(String, String),
    #[error("`{0}` is not a {1:?} node")]
    WrongKind(String, NodeKind),
    #[error("influence diagram is invalid: {0:?}")]
    Invalid(Vec<Diagnostic>),
    #[error("decision `{decision}` has {rows} parent instantiations, above {max}")]
    InfeasibleSize { decision: String, rows: usize, max: usize },
    #[error("policy has no usable rule for decision `{0}`")]
    IncompletePolicy(String),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// An action for every instantiation of the decision's parents, indexed by
/// parent row (first parent most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionRule {
    pub decision: NodeId,
    pub parents: Vec<NodeId>,
    pub actions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub rules: Vec<DecisionRule>,
    /// Expected total utility under the policy.
    pub meu: f64,
}

impl Policy {
    pub fn rule(&self, decision: NodeId) -> Option<&DecisionRule> {
        self.rules.iter().find(|r| r.decision == decision)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InfluenceDiagram {
    nodes: Vec<IdNode>,
    by_name: BTreeMap<String, NodeId>,
    order: Vec<NodeId>,
}

impl InfluenceDiagram {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, node: IdNode) -> Result<NodeId, DecisionError> {
        if self.by_name.contains_key(&node.name) {
            return Err(DecisionError::DuplicateName(node.name));
        }
        if node.kind != NodeKind::Utility && node.domain.is_empty() {
            return Err(DecisionError::EmptyDomain(node.name));
        }
        let id = NodeId(self.nodes.len());
        self.by_name.insert(node.name.clone(), id);
        self.nodes.push(node);
        Ok(id)
    }

    fn check(&self, id: NodeId) -> Result<(), DecisionError> {
        if id.0 < self.nodes.len() {
            Ok(())
        } else {
            Err(DecisionError::UnknownNode(alloc::format!("#{}", id.0)))
        }
    }

    fn check_parents(&self, child: &str, parents: &[NodeId]) -> Result<(), DecisionError> {
        for (i, &p) in parents.iter().enumerate() {
            self.check(p)?;
            if parents[..i].contains(&p) {
                return Err(DecisionError::DuplicateParent(child.into(), self.nodes[p.0].name.clone()));
            }
        }
        Ok(())
    }

    fn check_kind(&self, id: NodeId, kind: NodeKind) -> Result<(), DecisionError> {
        self.check(id)?;
        if self.nodes[id.0].kind != kind {
            return Err(DecisionError::WrongKind(self.nodes[id.0].name.clone(), kind));
        }
        Ok(())
    }

    pub fn add_chance(&mut self, name: impl Into<String>, domain: Vec<String>) -> Result<NodeId, DecisionError> {
        self.push(IdNode {
            name: name.into(),
            kind: NodeKind::Chance,
            domain,
            parents: Vec::new(),
            rows: Vec::new(),
            values: Vec::new(),
        })
    }

    /// Set a chance node's parents and CPD rows. Shape and normalization
    /// are checked by [`validate_id`].
    pub fn set_cpd(&mut self, node: NodeId, parents: Vec<NodeId>, rows: Vec<Vec<f64>>) -> Result<(), DecisionError> {
        self.check_kind(node, NodeKind::Chance)?;
        self.check_parents(&self.nodes[node.0].name, &parents)?;
        let n = &mut self.nodes[node.0];
        n.parents = parents;
        n.rows = rows;
        Ok(())
    }

    /// Append a decision after all existing ones in the decision order.
    pub fn add_decision(&mut self, name: impl Into<String>, domain: Vec<String>, parents: Vec<NodeId>) -> Result<NodeId, DecisionError> {
        let name = name.into();
        self.check_parents(&name, &parents)?;
        let id = self.push(IdNode {
            name,
            kind: NodeKind::Decision,
            domain,
            parents,
            rows: Vec::new(),
            values: Vec::new(),
        })?;
        self.order.push(id);
        Ok(id)
    }

    /// Replace a decision's information set.
    pub fn set_decision_parents(&mut self, node: NodeId, parents: Vec<NodeId>) -> Result<(), DecisionError> {
        self.check_kind(node, NodeKind::Decision)?;
        self.check_parents(&self.nodes[node.0].name, &parents)?;
        self.nodes[node.0].parents = parents;
        Ok(())
    }

    pub fn add_utility(&mut self, name: impl Into<String>, parents: Vec<NodeId>, values: Vec<f64>) -> Result<NodeId, DecisionError> {
        let name = name.into();
        self.check_parents(&name, &parents)?;
        self.push(IdNode {
            name,
            kind: NodeKind::Utility,
            domain: Vec::new(),
            parents,
            rows: Vec::new(),
            values,
        })
    }

    /// Replace a utility node's table (parents unchanged).
    pub fn set_utility_values(&mut self, node: NodeId, values: Vec<f64>) -> Result<(), DecisionError> {
        self.check_kind(node, NodeKind::Utility)?;
        self.nodes[node.0].values = values;
        Ok(())
    }

    pub fn nodes(&self) -> &[IdNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &IdNode {
        &self.nodes[id.0]
    }

    pub fn id_of(&self, name: &str) -> Option<NodeId> {
        self.by_name.get(name).copied()
    }

    /// Decisions in the order they are made.
    pub fn decisions(&self) -> &[NodeId] {
        &self.order
    }

    pub fn utilities(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.ids_of_kind(NodeKind::Utility)
    }

    pub fn chance_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.ids_of_kind(NodeKind::Chance)
    }

    fn ids_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(move |(_, n)| n.kind == kind)
            .map(|(i, _)| NodeId(i))
    }

    fn card(&self, id: NodeId) -> usize {
        self.nodes[id.0].domain.len()
    }

    fn parent_rows(&self, parents: &[NodeId]) -> usize {
        parents.iter().map(|&p| self.card(p)).product()
    }

    /// Add every arc required for no-forgetting: each decision observes all
    /// earlier decisions and everything they observed. Returns the arcs
    /// added as `(parent, decision)`.
    pub fn complete_no_forgetting(&mut self) -> Vec<(NodeId, NodeId)> {
        let mut added = Vec::new();
        let mut known: Vec<NodeId> = Vec::new();
        for &d in &self.order.clone() {
            for &k in &known {
                if !self.nodes[d.0].parents.contains(&k) {
                    self.nodes[d.0].parents.push(k);
                    added.push((k, d));
                }
            }
            for &p in &self.nodes[d.0].parents {
                if !known.contains(&p) {
                    known.push(p);
                }
            }
            known.push(d);
        }
        added
    }

    /// Add a discrete root chance node encoding the decision maker's
    /// preferences. It becomes the last parent of each affected utility,
    /// whose table is repeated across the new parent's values until the
    /// caller supplies one that depends on it, and a parent of every
    /// decision.
    pub fn add_preference_node(
        &mut self,
        name: impl Into<String>,
        domain: Vec<String>,
        prior: Vec<f64>,
        affected_utilities: &[NodeId],
    ) -> Result<NodeId, DecisionError> {
        for &u in affected_utilities {
            self.check(u)
                .and_then(|_| self.check_kind(u, NodeKind::Utility))
                .map_err(|_| DecisionError::UnknownNode(alloc::format!("utility #{}", u.0)))?;
        }
        let k = domain.len();
        let pref = self.add_chance(name, domain)?;
        self.nodes[pref.0].rows = vec![prior];
        for &u in affected_utilities {
            let node = &mut self.nodes[u.0];
            node.parents.push(pref);
            node.values = node.values.iter().flat_map(|&v| core::iter::repeat_n(v, k)).collect();
        }
        for &d in &self.order {
            if !self.nodes[d.0].parents.contains(&pref) {
                self.nodes[d.0].parents.push(pref);
            }
        }
        Ok(pref)
    }

    fn ancestors_via(&self, from: impl IntoIterator<Item = NodeId>, parents: impl Fn(NodeId) -> Vec<NodeId>) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<NodeId> = from.into_iter().collect();
        while let Some(n) = stack.pop() {
            if seen.insert(n) {
                stack.extend(parents(n));
            }
        }
        seen
    }

    fn cycle_members(&self) -> Vec<String> {
        let n = self.nodes.len();
        let mut indegree: Vec<usize> = self.nodes.iter().map(|x| x.parents.len()).collect();
        let mut children = vec![Vec::new(); n];
        for (i, node) in self.nodes.iter().enumerate() {
            for p in &node.parents {
                children[p.0].push(i);
            }
        }
        let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        while let Some(v) = ready.pop() {
            for &c in &children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(c);
                }
            }
        }
        (0..n).filter(|&i| indegree[i] > 0).map(|i| self.nodes[i].name.clone()).collect()
    }

    fn chance_factor(&self, node: NodeId) -> Factor {
        let n = &self.nodes[node.0];
        let mut scope: Vec<VarId> = n.parents.iter().map(|p| p.var()).collect();
        scope.push(node.var());
        let mut cards: Vec<usize> = n.parents.iter().map(|&p| self.card(p)).collect();
        cards.push(self.card(node));
        Factor::new(scope, cards, n.rows.iter().flatten().copied().collect())
    }

    fn rule_factor(&self, rule: &DecisionRule) -> Factor {
        let a = self.card(rule.decision);
        let mut scope: Vec<VarId> = rule.parents.iter().map(|p| p.var()).collect();
        scope.push(rule.decision.var());
        let mut cards: Vec<usize> = rule.parents.iter().map(|&p| self.card(p)).collect();
        cards.push(a);
        let mut values = vec![0.0; rule.actions.len() * a];
        for (row, &act) in rule.actions.iter().enumerate() {
            values[row * a + act] = 1.0;
        }
        Factor::new(scope, cards, values)
    }

    fn utility_factor(&self, node: NodeId) -> Factor {
        let n = &self.nodes[node.0];
        let scope = n.parents.iter().map(|p| p.var()).collect();
        let cards = n.parents.iter().map(|&p| self.card(p)).collect();
        Factor::new(scope, cards, n.values.clone())
    }

    /// `Σ P(x) · U(x)` with everything outside `scope` summed out. Chance
    /// nodes contribute their CPDs, decisions with a rule in `solved`
    /// contribute it, and unsolved decisions must lie in `scope`.
    fn utility_table(&self, utility: NodeId, scope: &[NodeId], solved: &BTreeMap<NodeId, DecisionRule>) -> Factor {
        let parents_of = |n: NodeId| -> Vec<NodeId> {
            match self.nodes[n.0].kind {
                NodeKind::Chance => self.nodes[n.0].parents.clone(),
                NodeKind::Decision => solved.get(&n).map(|r| r.parents.clone()).unwrap_or_default(),
                NodeKind::Utility => Vec::new(),
            }
        };
        let roots = scope.iter().copied().chain(self.nodes[utility.0].parents.iter().copied());
        let mut factors = Vec::new();
        for n in self.ancestors_via(roots, parents_of) {
            match self.nodes[n.0].kind {
                NodeKind::Chance => factors.push(self.chance_factor(n)),
                NodeKind::Decision => match solved.get(&n) {
                    Some(rule) => factors.push(self.rule_factor(rule)),
                    None => debug_assert!(scope.contains(&n), "unsolved decision outside scope"),
                },
                NodeKind::Utility => {}
            }
        }
        factors.push(self.utility_factor(utility));
        let vars: Vec<VarId> = scope.iter().map(|s| s.var()).collect();
        let cards: Vec<usize> = scope.iter().map(|&s| self.card(s)).collect();
        factors.push(Factor::constant(vars.clone(), cards, 1.0));
        eliminate(factors, &vars)
    }
}

/// Structural and numerical problems: malformed tables, cycles, utility
/// nodes with children, decision order inconsistent with the graph, and
/// missing no-forgetting arcs.
pub fn validate_id(id: &InfluenceDiagram) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for node in &id.nodes {
        for &p in &node.parents {
            if id.nodes[p.0].kind == NodeKind::Utility {
                out.push(Diagnostic::UtilityHasChild {
                    utility: id.nodes[p.0].name.clone(),
                    child: node.name.clone(),
                });
            }
        }
        let rows = id.parent_rows(&node.parents);
        match node.kind {
            NodeKind::Chance => {
                if node.rows.len() != rows {
                    out.push(Diagnostic::RowCountMismatch {
                        variable: node.name.clone(),
                        expected: rows,
                        found: node.rows.len(),
                    });
                    continue;
                }
                for (r, row) in node.rows.iter().enumerate() {
                    if row.len() != node.domain.len() {
                        out.push(Diagnostic::RowLengthMismatch {
                            variable: node.name.clone(),
                            row: r,
                            expected: node.domain.len(),
                            found: row.len(),
                        });
                    } else if let Some(&value) = row.iter().find(|&&p| p < 0.0) {
                        out.push(Diagnostic::NegativeEntry { variable: node.name.clone(), row: r, value });
                    } else {
                        let sum: f64 = row.iter().sum();
                        if sum.is_nan() || (sum - 1.0).abs() > ROW_TOLERANCE {
                            out.push(Diagnostic::RowNotNormalized { variable: node.name.clone(), row: r, sum });
                        }
                    }
                }
            }
            NodeKind::Decision => {
                if !node.rows.is_empty() {
                    out.push(Diagnostic::DecisionHasCpd { decision: node.name.clone() });
                }
            }
            NodeKind::Utility => {
                if node.values.len() != rows {
                    out.push(Diagnostic::UtilityTableSize {
                        utility: node.name.clone(),
                        expected: rows,
                        found: node.values.len(),
                    });
                }
            }
        }
    }
    let cyclic = id.cycle_members();
    if !cyclic.is_empty() {
        out.push(Diagnostic::Cycle { variables: cyclic });
        return out;
    }
    for (i, &earlier) in id.order.iter().enumerate() {
        for &later in &id.order[i + 1..] {
            let ancestors = id.ancestors_via([earlier], |n| id.nodes[n.0].parents.clone());
            if ancestors.contains(&later) {
                out.push(Diagnostic::DecisionOrder {
                    earlier: id.nodes[earlier.0].name.clone(),
                    later: id.nodes[later.0].name.clone(),
                });
            }
            let later_parents = &id.nodes[later.0].parents;
            for &known in id.nodes[earlier.0].parents.iter().chain(core::iter::once(&earlier)) {
                if !later_parents.contains(&known) {
                    out.push(Diagnostic::NoForgetting {
                        earlier: id.nodes[earlier.0].name.clone(),
                        later: id.nodes[later.0].name.clone(),
                        missing: id.nodes[known.0].name.clone(),
                    });
                }
            }
        }
    }
    out
}

/// Optimal policy by backward induction. Missing no-forgetting arcs are
/// completed first; the returned rules are over the completed parent sets.
pub fn solve_id(id: &InfluenceDiagram) -> Result<Policy, DecisionError> {
    let mut id = id.clone();
    id.complete_no_forgetting();
    let diagnostics = validate_id(&id);
    if !diagnostics.is_empty() {
        return Err(DecisionError::Invalid(diagnostics));
    }
    for &d in &id.order {
        let rows = id.parent_rows(&id.nodes[d.0].parents);
        if rows > MAX_DECISION_ROWS {
            return Err(DecisionError::InfeasibleSize {
                decision: id.nodes[d.0].name.clone(),
                rows,
                max: MAX_DECISION_ROWS,
            });
        }
    }
    let utilities: Vec<NodeId> = id.utilities().collect();
    let mut solved: BTreeMap<NodeId, DecisionRule> = BTreeMap::new();
    let mut meu = 0.0;
    for (i, &d) in id.order.iter().enumerate().rev() {
        let parents = id.nodes[d.0].parents.clone();
        let mut scope = parents.clone();
        scope.push(d);
        let vars: Vec<VarId> = scope.iter().map(|s| s.var()).collect();
        let cards: Vec<usize> = scope.iter().map(|&s| id.card(s)).collect();
        let table = utilities
            .iter()
            .fold(Factor::constant(vars, cards, 0.0), |acc, &u| acc.add(&id.utility_table(u, &scope, &solved)));
        let actions = id.card(d);
        let rows = id.parent_rows(&parents);
        let values = table.values();
        let mut chosen = Vec::with_capacity(rows);
        for row in 0..rows {
            let eu = &values[row * actions..(row + 1) * actions];
            let best = best_action(eu);
            if i == 0 {
                meu += eu[best];
            }
            chosen.push(best);
        }
        solved.insert(d, DecisionRule { decision: d, parents, actions: chosen });
    }
    if id.order.is_empty() {
        meu = utilities.iter().map(|&u| id.utility_table(u, &[], &solved).total()).sum();
    }
    let rules = id.order.iter().map(|d| solved.remove(d).expect("every decision solved")).collect();
    Ok(Policy { rules, meu })
}

/// Earliest action whose value is within tolerance of the maximum.
fn best_action(values: &[f64]) -> usize {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = TIE_TOLERANCE * (1.0 + max.abs());
    values.iter().position(|&v| v >= max - slack).unwrap_or(0)
}

/// Convert the diagram to a network: utilities are dropped and each
/// decision becomes a chance variable whose CPD puts probability one on
/// the policy's action. Variables keep the diagram's names and node order.
pub fn id_to_bn(id: &InfluenceDiagram, policy: &Policy) -> Result<Network, DecisionError> {
    let mut net = Network::new();
    let mut var_of: BTreeMap<NodeId, VarId> = BTreeMap::new();
    for (i, node) in id.nodes.iter().enumerate() {
        if node.kind != NodeKind::Utility {
            var_of.insert(NodeId(i), net.add_variable(node.name.clone(), node.domain.clone())?);
        }
    }
    let map = |parents: &[NodeId]| -> Result<Vec<VarId>, DecisionError> {
        parents
            .iter()
            .map(|p| var_of.get(p).copied().ok_or_else(|| DecisionError::UnknownNode(id.nodes[p.0].name.clone())))
            .collect()
    };
    for (i, node) in id.nodes.iter().enumerate() {
        let nid = NodeId(i);
        match node.kind {
            NodeKind::Chance => {
                net.set_cpd(var_of[&nid], map(&node.parents)?, node.rows.clone())?;
            }
            NodeKind::Decision => {
                let incomplete = || DecisionError::IncompletePolicy(node.name.clone());
                let rule = policy.rule(nid).ok_or_else(incomplete)?;
                let a = node.domain.len();
                if rule.actions.len() != id.parent_rows(&rule.parents) || rule.actions.iter().any(|&x| x >= a) {
                    return Err(incomplete());
                }
                let rows = rule
                    .actions
                    .iter()
                    .map(|&act| {
                        let mut row = vec![0.0; a];
                        row[act] = 1.0;
                        row
                    })
                    .collect();
                net.set_cpd(var_of[&nid], map(&rule.parents)?, rows)?;
            }
            NodeKind::Utility => {}
        }
    }
    Ok(net)
}

/// Expected total utility of `policy`, by enumerating the joint of the
/// converted network.
pub fn expected_utility(id: &InfluenceDiagram, policy: &Policy, cap: usize) -> Result<f64, DecisionError> {
    let net = id_to_bn(id, policy)?;
    let joint = enumerate_joint(&net, cap)?;
    let utilities: Vec<(Vec<VarId>, Vec<usize>, &[f64])> = id
        .utilities()
        .map(|u| {
            let node = &id.nodes[u.0];
            let vars: Vec<VarId> = node.parents.iter().map(|p| net.id_of(&id.nodes[p.0].name).expect("converted")).collect();
            let cards = vars.iter().map(|&v| net.cardinality(v)).collect();
            (vars, cards, node.values.as_slice())
        })
        .collect();
    let mut total = 0.0;
    for (state, p) in joint.iter() {
        if p == 0.0 {
            continue;
        }
        let u: f64 = utilities
            .iter()
            .map(|(vars, cards, values)| {
                let row = vars.iter().zip(cards).fold(0, |acc, (v, c)| acc * c + state.value(*v));
                values[row]
            })
            .sum();
        total += p * u;
    }
    Ok(total)
}

/// Every instantiation of `parents`, in row order.
pub fn parent_instantiations(id: &InfluenceDiagram, parents: &[NodeId]) -> Vec<Vec<usize>> {
    let cards: Vec<usize> = parents.iter().map(|&p| id.card(p)).collect();
    (0..id.parent_rows(parents)).map(|r| row_instantiation(&cards, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::matching_game;
    use crate::graph::labels;

    fn single_decision(fa: f64, fb: f64) -> (InfluenceDiagram, NodeId) {
        let mut id = InfluenceDiagram::new();
        let d = id.add_decision("D", labels(&["a", "b"]), vec![]).unwrap();
        id.add_utility("U", vec![d], vec![fa, fb]).unwrap();
        (id, d)
    }

    #[test]
    fn single_decision_picks_best_action() {
        let (id, d) = single_decision(1.0, 0.0);
        let policy = solve_id(&id).unwrap();
        assert_eq!(policy.rule(d).unwrap().actions, vec![0]);
        assert_eq!(policy.meu, 1.0);
        let net = id_to_bn(&id, &policy).unwrap();
        assert_eq!(net.cpd(net.id_of("D").unwrap()).unwrap().rows, vec![vec![1.0, 0.0]]);
    }

    #[test]
    fn ties_go_to_first_action() {
        let (id, d) = single_decision(3.0, 3.0);
        assert_eq!(solve_id(&id).unwrap().rule(d).unwrap().actions, vec![0]);
        let (id, _, d) = {
            let (mut id, x, d) = matching_game();
            let u = id.utilities().next().unwrap();
            id.set_utility_values(u, vec![2.0; 4]).unwrap();
            (id, x, d)
        };
        assert_eq!(solve_id(&id).unwrap().rule(d).unwrap().actions, vec![0, 0]);
    }

    #[test]
    fn matching_game_solution() {
        let (id, _, d) = matching_game();
        let policy = solve_id(&id).unwrap();
        assert_eq!(policy.rule(d).unwrap().actions, vec![0, 1]);
        assert!((policy.meu - 1.0).abs() < 1e-12);
        assert!((expected_utility(&id, &policy, 1 << 20).unwrap() - 1.0).abs() < 1e-12);

        let mismatched = Policy {
            rules: vec![DecisionRule { decision: d, parents: policy.rules[0].parents.clone(), actions: vec![1, 0] }],
            meu: 0.0,
        };
        assert_eq!(expected_utility(&id, &mismatched, 1 << 20).unwrap(), 0.0);
    }

    #[test]
    fn empty_utility_diagram_has_zero_value() {
        let mut id = InfluenceDiagram::new();
        let d = id.add_decision("D", labels(&["a", "b"]), vec![]).unwrap();
        let policy = solve_id(&id).unwrap();
        assert_eq!(policy.meu, 0.0);
        assert_eq!(policy.rule(d).unwrap().actions, vec![0]);
        assert_eq!(expected_utility(&id, &policy, 1 << 20).unwrap(), 0.0);
    }

    #[test]
    fn validation_findings() {
        let (id, _, _) = matching_game();
        assert!(validate_id(&id).is_empty());

        let mut id = InfluenceDiagram::new();
        let x = id.add_chance("X", labels(&["0", "1"])).unwrap();
        id.set_cpd(x, vec![], vec![vec![0.5, 0.5]]).unwrap();
        let d1 = id.add_decision("D1", labels(&["a", "b"]), vec![x]).unwrap();
        let d2 = id.add_decision("D2", labels(&["a", "b"]), vec![x]).unwrap();
        id.add_utility("U", vec![d1, d2], vec![0.0; 4]).unwrap();
        assert_eq!(
            validate_id(&id),
            vec![Diagnostic::NoForgetting { earlier: "D1".into(), later: "D2".into(), missing: "D1".into() }]
        );
        assert_eq!(id.complete_no_forgetting(), vec![(d1, d2)]);
        assert!(validate_id(&id).is_empty());

        let u = id.utilities().next().unwrap();
        let y = id.add_chance("Y", labels(&["0", "1"])).unwrap();
        id.set_cpd(y, vec![u], vec![vec![0.5, 0.5]]).unwrap();
        assert!(validate_id(&id).contains(&Diagnostic::UtilityHasChild { utility: "U".into(), child: "Y".into() }));
    }

    #[test]
    fn decision_order_must_follow_graph() {
        let mut id = InfluenceDiagram::new();
        let d1 = id.add_decision("D1", labels(&["a", "b"]), vec![]).unwrap();
        let d2 = id.add_decision("D2", labels(&["a", "b"]), vec![d1]).unwrap();
        // D1 now depends on D2 through a chance node, while D2 observes D1
        let c = id.add_chance("C", labels(&["0", "1"])).unwrap();
        id.set_cpd(c, vec![d2], vec![vec![0.5, 0.5]; 2]).unwrap();
        id.nodes[d1.0].parents.push(c);
        let diags = validate_id(&id);
        assert!(diags.iter().any(|d| matches!(d, Diagnostic::Cycle { .. })));
    }

    #[test]
    fn preference_node_extends_tables() {
        let (mut id, _, d) = matching_game();
        let u = id.utilities().next().unwrap();
        let a = id.add_preference_node("A", labels(&["high", "low"]), vec![1.0, 0.0], &[u]).unwrap();
        assert_eq!(id.node(u).parents.last(), Some(&a));
        assert_eq!(id.node(u).values, vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
        assert!(id.node(d).parents.contains(&a));
        assert!(validate_id(&id).is_empty());
        assert!(matches!(
            id.add_preference_node("B", labels(&["x"]), vec![1.0], &[NodeId(99)]),
            Err(DecisionError::UnknownNode(_))
        ));
        assert!(matches!(
            id.add_preference_node("A", labels(&["x"]), vec![1.0], &[u]),
            Err(DecisionError::DuplicateName(_))
        ));
    }

    #[test]
    fn incomplete_policy_rejected() {
        let (id, _, _) = matching_game();
        let empty = Policy { rules: vec![], meu: 0.0 };
        assert!(matches!(id_to_bn(&id, &empty), Err(DecisionError::IncompletePolicy(_))));
    }
}
