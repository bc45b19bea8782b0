//! Exact inference: a joint-enumeration oracle, variable elimination,
//! Bayes-ball d-separation and requisite-observation sets.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::diagnostics::Diagnostic;
use crate::factor::{eliminate, Factor};
use crate::graph::{row_instantiation, Network, VarId, WorldState};

/// Default bound on the number of joint states the enumeration oracle
/// will visit.
pub const DEFAULT_STATE_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("joint state space has {states} states, above the cap of {cap}")]
    StateSpaceTooLarge { states: u128, cap: usize },
    #[error("evidence has probability zero")]
    ZeroProbabilityEvidence,
    #[error("network is not valid: {0:?}")]
    InvalidNetwork(Vec<Diagnostic>),
    #[error("unknown variable {0}")]
    UnknownVariable(VarId),
    #[error("value {value} out of range for variable {var}")]
    ValueOutOfRange { var: VarId, value: usize },
    #[error("variable {0} is both a query target and evidence")]
    TargetIsEvidence(VarId),
}

/// A partial assignment of value indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence(BTreeMap<VarId, usize>);

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: VarId, value: usize) -> Self {
        self.0.insert(var, value);
        self
    }

    /// Record `var = value`; returns false (and keeps the old value) when
    /// `var` already carries a different value.
    pub fn insert(&mut self, var: VarId, value: usize) -> bool {
        match self.0.get(&var) {
            Some(&old) => old == value,
            None => {
                self.0.insert(var, value);
                true
            }
        }
    }

    /// Union of two evidence sets, or `None` if they disagree on a variable.
    pub fn merged(&self, other: &Evidence) -> Option<Evidence> {
        let mut out = self.clone();
        for (&var, &value) in &other.0 {
            if !out.insert(var, value) {
                return None;
            }
        }
        Some(out)
    }

    pub fn get(&self, var: VarId) -> Option<usize> {
        self.0.get(&var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.0.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(VarId, usize)> for Evidence {
    fn from_iter<T: IntoIterator<Item = (VarId, usize)>>(iter: T) -> Self {
        Evidence(iter.into_iter().collect())
    }
}

/// Probability of every complete world state, indexed in mixed radix over
/// the network's variables in id order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    cards: Vec<usize>,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn state(&self, index: usize) -> WorldState {
        WorldState(row_instantiation(&self.cards, index))
    }

    pub fn probability(&self, state: &WorldState) -> f64 {
        let idx = state.0.iter().zip(&self.cards).fold(0, |acc, (v, c)| acc * c + v);
        self.probs[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = (WorldState, f64)> + '_ {
        self.probs.iter().enumerate().map(|(i, &p)| (self.state(i), p))
    }
}

fn state_count(network: &Network) -> u128 {
    network
        .variables()
        .iter()
        .map(|v| v.cardinality() as u128)
        .fold(1u128, |acc, c| acc.saturating_mul(c))
}

/// Brute-force joint: each entry is the product of the CPD entries the
/// state selects.
pub fn enumerate_joint(network: &Network, cap: usize) -> Result<JointTable, InferenceError> {
    let diagnostics = network.validate();
    if !diagnostics.is_empty() {
        return Err(InferenceError::InvalidNetwork(diagnostics));
    }
    let states = state_count(network);
    if states > cap as u128 {
        return Err(InferenceError::StateSpaceTooLarge { states, cap });
    }
    let cards: Vec<usize> = network.variables().iter().map(|v| v.cardinality()).collect();
    let mut probs = Vec::with_capacity(states as usize);
    let mut state = vec![0; cards.len()];
    loop {
        let p = network.ids().map(|v| network.cpd_entry(v, &state)).product();
        probs.push(p);
        let mut i = cards.len();
        let more = loop {
            if i == 0 {
                break false;
            }
            i -= 1;
            state[i] += 1;
            if state[i] < cards[i] {
                break true;
            }
            state[i] = 0;
        };
        if !more {
            break;
        }
    }
    Ok(JointTable { cards, probs })
}

fn check_evidence(network: &Network, evidence: &Evidence) -> Result<(), InferenceError> {
    for (var, value) in evidence.iter() {
        if var.index() >= network.len() {
            return Err(InferenceError::UnknownVariable(var));
        }
        if value >= network.cardinality(var) {
            return Err(InferenceError::ValueOutOfRange { var, value });
        }
    }
    Ok(())
}

/// Unnormalized sum-product over the ancestral closure of `targets` and
/// the evidence, reduced by the evidence.
fn unnormalized(network: &Network, targets: &[VarId], evidence: &Evidence) -> Result<Factor, InferenceError> {
    for &t in targets {
        if t.index() >= network.len() {
            return Err(InferenceError::UnknownVariable(t));
        }
        if evidence.get(t).is_some() {
            return Err(InferenceError::TargetIsEvidence(t));
        }
    }
    check_evidence(network, evidence)?;
    let relevant = network.ancestors(targets.iter().copied().chain(evidence.vars()));
    let mut factors = Vec::with_capacity(relevant.len());
    for &var in &relevant {
        if network.cpd(var).is_none() {
            return Err(InferenceError::InvalidNetwork(vec![Diagnostic::MissingCpd {
                variable: network.name(var).into(),
            }]));
        }
        let mut f = Factor::from_cpd(network, var);
        for (e, value) in evidence.iter() {
            f = f.reduce(e, value);
        }
        factors.push(f);
    }
    Ok(eliminate(factors, targets))
}

/// Posterior joint over `targets` (in the given order) given `evidence`.
pub fn query(network: &Network, targets: &[VarId], evidence: &Evidence) -> Result<Factor, InferenceError> {
    unnormalized(network, targets, evidence)?
        .normalized()
        .ok_or(InferenceError::ZeroProbabilityEvidence)
}

/// Prior probability of a partial assignment.
pub fn evidence_probability(network: &Network, evidence: &Evidence) -> Result<f64, InferenceError> {
    Ok(unnormalized(network, &[], evidence)?.total())
}

/// A conditional probability, or `Undefined` when the conditioning event
/// has probability zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conditional {
    Value(f64),
    Undefined,
}

impl Conditional {
    pub fn value(self) -> Option<f64> {
        match self {
            Conditional::Value(p) => Some(p),
            Conditional::Undefined => None,
        }
    }
}

/// `Pr(event | given)`.
pub fn probability_of(network: &Network, event: &Evidence, given: &Evidence) -> Result<Conditional, InferenceError> {
    check_evidence(network, event)?;
    let mut targets = Vec::new();
    let mut values = Vec::new();
    let mut contradicts = false;
    for (var, value) in event.iter() {
        match given.get(var) {
            Some(g) => contradicts |= g != value,
            None => {
                targets.push(var);
                values.push(value);
            }
        }
    }
    match query(network, &targets, given) {
        Ok(_) if contradicts => Ok(Conditional::Value(0.0)),
        Ok(posterior) => Ok(Conditional::Value(posterior.value(&values))),
        Err(InferenceError::ZeroProbabilityEvidence) => Ok(Conditional::Undefined),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Default)]
struct Ball {
    /// Unobserved nodes on an active trail from the sources.
    reachable: BTreeSet<VarId>,
    /// Observed nodes the ball arrives at.
    observed_hits: BTreeSet<VarId>,
}

/// Bayes-ball from `sources` with `given` observed. The ball passes an
/// unobserved node in any direction except back up out of a node entered
/// from a parent; an observed node bounces a ball arriving from a parent
/// back to its parents and blocks one arriving from a child.
fn bayes_ball(network: &Network, sources: &BTreeSet<VarId>, given: &BTreeSet<VarId>) -> Ball {
    let children = network.children_lists();
    // ancestors of evidence make colliders active
    let active_colliders = network.ancestors(given.iter().copied());
    let mut visited = vec![[false; 2]; network.len()];
    const UP: usize = 0; // arrived from a child
    const DOWN: usize = 1; // arrived from a parent
    let mut stack: Vec<(VarId, usize)> = sources.iter().map(|&s| (s, UP)).collect();
    let mut ball = Ball::default();
    while let Some((v, dir)) = stack.pop() {
        if visited[v.index()][dir] {
            continue;
        }
        visited[v.index()][dir] = true;
        let observed = given.contains(&v);
        if observed {
            ball.observed_hits.insert(v);
        } else {
            ball.reachable.insert(v);
        }
        if dir == UP && !observed {
            stack.extend(network.parents(v).iter().map(|&p| (p, UP)));
            stack.extend(children[v.index()].iter().map(|&c| (c, DOWN)));
        } else if dir == DOWN {
            if !observed {
                stack.extend(children[v.index()].iter().map(|&c| (c, DOWN)));
            }
            if active_colliders.contains(&v) {
                stack.extend(network.parents(v).iter().map(|&p| (p, UP)));
            }
        }
    }
    ball
}

/// True iff every trail between `from` and `to` is blocked by `given`.
pub fn d_separated(
    network: &Network,
    from: &BTreeSet<VarId>,
    to: &BTreeSet<VarId>,
    given: &BTreeSet<VarId>,
) -> bool {
    let ball = bayes_ball(network, from, given);
    ball.reachable.is_disjoint(to)
}

/// Requisite members of `observations` for beliefs about `target` given
/// `conditioning` and the observations: the observed nodes the Bayes-ball
/// from `target` reaches. The remaining observations are d-separated from
/// `target` given the result plus `conditioning`.
pub fn relevant_observations(
    network: &Network,
    observations: &BTreeSet<VarId>,
    target: VarId,
    conditioning: &BTreeSet<VarId>,
) -> BTreeSet<VarId> {
    let given: BTreeSet<VarId> = observations.union(conditioning).copied().collect();
    let sources = BTreeSet::from([target]);
    let ball = bayes_ball(network, &sources, &given);
    ball.observed_hits
        .intersection(observations)
        .copied()
        .collect()
}
