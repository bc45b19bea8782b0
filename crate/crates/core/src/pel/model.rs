//! The augmented network: indicator nodes for formulas, assertion and
//! querying, and the uncertain-observation transformation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use super::formula::{Formula, TRUE_LABEL, TRUE_VAR};
use super::meets_threshold;
use super::parser::ParseError;
use super::schedule::ObservationSchedule;
use crate::diagnostics::Diagnostic;
use crate::graph::{labels, row_instantiation, GraphError, Network, VarId};
use crate::inference::{probability_of, query, relevant_observations, Conditional, Evidence, InferenceError};

/// Default bound on the number of relevant observations a belief
/// indicator may take as parents.
pub const DEFAULT_MAX_RELEVANT: usize = 16;

const IND_TRUE: usize = 0;
const IND_FALSE: usize = 1;
const UNKNOWN_LABEL: &str = "unknown";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{var}` has no value `{value}`")]
    UnknownValue { var: String, value: String },
    #[error("`{0}` is an indicator variable and cannot appear in formulas")]
    IndicatorInFormula(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("agent `{agent}` has {max} stages, stage {stage} is out of range")]
    StageOutOfRange { agent: String, stage: usize, max: usize },
    #[error("threshold {0} is outside [0, 1]")]
    ThresholdOutOfRange(f64),
    #[error("{count} relevant observations for `{formula}` exceed the cap of {cap}")]
    InferenceInfeasible { formula: String, count: usize, cap: usize },
    #[error("asserted formulas have probability zero: {0}")]
    InconsistentAssertion(String),
    #[error("`{parent}` is a descendant of `{variable}` and cannot influence whether it is observed")]
    DescendantParent { variable: String, parent: String },
    #[error("agent `{agent}` does not observe `{variable}` at stage {stage}")]
    NotObservedAtStage { agent: String, stage: usize, variable: String },
    #[error("agent `{agent}` already observes `{variable}` before stage {stage}")]
    ObservedEarlier { agent: String, stage: usize, variable: String },
    #[error("observation uncertainty must be added before any indicator node exists")]
    IndicatorsPresent,
    #[error("reserved variable `{0}` has an unexpected definition")]
    ReservedVariable(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

/// Counters for the inference work done while building indicators.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InferenceStats {
    /// Belief indicators created.
    pub belief_nodes: usize,
    /// Inference batches issued; one per belief indicator.
    pub batches: usize,
    /// Individual network queries inside those batches.
    pub queries: usize,
}

/// A network, observation schedule and the registry of indicator nodes.
#[derive(Debug, Clone)]
pub struct PelModel {
    network: Network,
    schedule: ObservationSchedule,
    indicators: BTreeMap<String, VarId>,
    indicator_ids: BTreeSet<VarId>,
    max_relevant: usize,
    batched: bool,
    stats: InferenceStats,
}

impl PelModel {
    /// Wrap a network and schedule, adding the reserved constant variable
    /// that backs the `true` formula if the network lacks it.
    pub fn new(mut network: Network, schedule: ObservationSchedule) -> Result<Self, PelError> {
        match network.id_of(TRUE_VAR) {
            None => {
                let t = network.add_variable(TRUE_VAR, labels(&[TRUE_LABEL]))?;
                network.set_cpd(t, vec![], vec![vec![1.0]])?;
            }
            Some(t) => {
                let ok = network.variable(t)?.domain == labels(&[TRUE_LABEL])
                    && network.cpd(t).is_some_and(|c| c.parents.is_empty());
                if !ok {
                    return Err(PelError::ReservedVariable(TRUE_VAR.into()));
                }
            }
        }
        Ok(PelModel {
            network,
            schedule,
            indicators: BTreeMap::new(),
            indicator_ids: BTreeSet::new(),
            max_relevant: DEFAULT_MAX_RELEVANT,
            batched: false,
            stats: InferenceStats::default(),
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn schedule(&self) -> &ObservationSchedule {
        &self.schedule
    }

    pub fn stats(&self) -> InferenceStats {
        self.stats
    }

    pub fn reset_stats(&mut self) {
        self.stats = InferenceStats::default();
    }

    pub fn set_max_relevant(&mut self, cap: usize) {
        self.max_relevant = cap;
    }

    /// Compute each belief indicator's CPD from one joint query over the
    /// belief target and its relevant observations instead of one query
    /// per observation instantiation.
    pub fn set_batched(&mut self, batched: bool) {
        self.batched = batched;
    }

    pub fn indicator(&self, formula: &Formula) -> Option<VarId> {
        self.indicators.get(&alloc::format!("{formula}")).copied()
    }

    pub fn indicator_count(&self) -> usize {
        self.indicators.len()
    }

    pub fn is_indicator(&self, var: VarId) -> bool {
        self.indicator_ids.contains(&var)
    }

    /// Every non-indicator variable, including the reserved constant.
    pub fn base_variables(&self) -> BTreeSet<VarId> {
        self.network.ids().filter(|v| !self.is_indicator(*v)).collect()
    }

    /// Network diagnostics, then schedule diagnostics.
    pub fn validate_model(&self) -> Vec<Diagnostic> {
        let mut out = self.network.validate();
        out.extend(self.schedule.validate(&self.network));
        out
    }

    /// Check that every variable, value, agent, stage and threshold the
    /// formula mentions exists in this model.
    pub fn bind(&self, formula: &Formula) -> Result<(), PelError> {
        match formula {
            Formula::Atom { var, value } => {
                let id = self.network.id_of(var).ok_or_else(|| PelError::UnknownVariable(var.clone()))?;
                if self.is_indicator(id) {
                    return Err(PelError::IndicatorInFormula(var.clone()));
                }
                if self.network.variable(id)?.value_index(value).is_none() {
                    return Err(PelError::UnknownValue { var: var.clone(), value: value.clone() });
                }
                Ok(())
            }
            Formula::Not(inner) => self.bind(inner),
            Formula::Or(a, b) => {
                self.bind(a)?;
                self.bind(b)
            }
            Formula::BelCond { agent, stage, threshold, body, condition } => {
                let max = self
                    .schedule
                    .stage_count(agent)
                    .ok_or_else(|| PelError::UnknownAgent(agent.clone()))?;
                if *stage == 0 || *stage > max {
                    return Err(PelError::StageOutOfRange { agent: agent.clone(), stage: *stage, max });
                }
                if !(0.0..=1.0).contains(threshold) {
                    return Err(PelError::ThresholdOutOfRange(*threshold));
                }
                self.bind(body)?;
                self.bind(condition)
            }
        }
    }

    pub(crate) fn observation_ids(&self, agent: &str, stage: usize) -> Result<BTreeSet<VarId>, PelError> {
        let names = self
            .schedule
            .observations(agent, stage)
            .ok_or_else(|| PelError::UnknownAgent(agent.into()))?;
        names
            .iter()
            .map(|n| self.network.id_of(n).ok_or_else(|| PelError::UnknownVariable(n.clone())))
            .collect()
    }

    /// Return the indicator node for `formula`, creating it and the
    /// indicators of its subformulas as needed. The augmented network's
    /// joint over the original variables and all indicators agrees with
    /// the PEL model's.
    pub fn create_node(&mut self, formula: &Formula) -> Result<VarId, PelError> {
        self.bind(formula)?;
        self.create_bound(formula)
    }

    fn create_bound(&mut self, formula: &Formula) -> Result<VarId, PelError> {
        let key = alloc::format!("{formula}");
        if let Some(&id) = self.indicators.get(&key) {
            return Ok(id);
        }
        let (parents, rows) = match formula {
            Formula::Atom { var, value } => {
                let x = self.network.id_of(var).expect("bound");
                let v = self.network.variable(x)?.value_index(value).expect("bound");
                let rows = (0..self.network.cardinality(x)).map(|j| indicator_row(j == v)).collect();
                (vec![x], rows)
            }
            Formula::Not(inner) => {
                let a = self.create_bound(inner)?;
                (vec![a], vec![indicator_row(false), indicator_row(true)])
            }
            Formula::Or(left, right) => {
                let a = self.create_bound(left)?;
                let b = self.create_bound(right)?;
                if a == b {
                    return self.finish_indicator(key, vec![a], vec![indicator_row(true), indicator_row(false)]);
                }
                // rows: (t,t) (t,f) (f,t) (f,f)
                let rows = vec![indicator_row(true), indicator_row(true), indicator_row(true), indicator_row(false)];
                (vec![a, b], rows)
            }
            Formula::BelCond { agent, stage, threshold, body, condition } => {
                let target = self.create_bound(body)?;
                let given = self.create_bound(condition)?;
                let observations = self.observation_ids(agent, *stage)?;
                let mut rel = relevant_observations(&self.network, &observations, target, &BTreeSet::from([given]));
                if !condition.is_truth() {
                    // the belief is false wherever the condition has no
                    // mass, so observations that can rule it out matter too
                    let support = relevant_observations(&self.network, &observations, given, &BTreeSet::new());
                    if !support.is_subset(&rel) && self.condition_can_vanish(given, &support)? {
                        rel.extend(support);
                    }
                }
                let rel: Vec<VarId> = rel.into_iter().collect();
                if rel.len() > self.max_relevant {
                    return Err(PelError::InferenceInfeasible { formula: key, count: rel.len(), cap: self.max_relevant });
                }
                let rows = if self.batched {
                    self.belief_rows_batched(target, given, &rel, *threshold)?
                } else {
                    self.belief_rows(target, given, &rel, *threshold)?
                };
                self.stats.belief_nodes += 1;
                self.stats.batches += 1;
                (rel, rows)
            }
        };
        self.finish_indicator(key, parents, rows)
    }

    fn finish_indicator(&mut self, key: String, parents: Vec<VarId>, rows: Vec<Vec<f64>>) -> Result<VarId, PelError> {
        let id = self.network.add_variable(alloc::format!("eta[{key}]"), labels(&["true", "false"]))?;
        self.network.set_cpd(id, parents, rows)?;
        self.indicators.insert(key, id);
        self.indicator_ids.insert(id);
        Ok(id)
    }

    /// Whether some positive-probability instantiation of `observed`
    /// gives the condition indicator probability zero.
    fn condition_can_vanish(&mut self, given: VarId, observed: &BTreeSet<VarId>) -> Result<bool, PelError> {
        let mut targets: Vec<VarId> = observed.iter().copied().collect();
        targets.push(given);
        self.stats.queries += 1;
        let joint = query(&self.network, &targets, &Evidence::new())?;
        Ok(joint
            .values()
            .chunks(2)
            .any(|cell| cell[IND_TRUE] == 0.0 && cell[IND_FALSE] > 0.0))
    }

    fn belief_rows(&mut self, target: VarId, given: VarId, rel: &[VarId], threshold: f64) -> Result<Vec<Vec<f64>>, PelError> {
        let cards: Vec<usize> = rel.iter().map(|&v| self.network.cardinality(v)).collect();
        let count: usize = cards.iter().product();
        let event = Evidence::new().with(target, IND_TRUE);
        let mut rows = Vec::with_capacity(count);
        for row in 0..count {
            let inst = row_instantiation(&cards, row);
            let evidence: Evidence = rel
                .iter()
                .copied()
                .zip(inst)
                .chain(core::iter::once((given, IND_TRUE)))
                .collect();
            self.stats.queries += 1;
            let holds = match probability_of(&self.network, &event, &evidence)? {
                Conditional::Value(p) => meets_threshold(p, threshold),
                Conditional::Undefined => false,
            };
            rows.push(indicator_row(holds));
        }
        Ok(rows)
    }

    fn belief_rows_batched(
        &mut self,
        target: VarId,
        given: VarId,
        rel: &[VarId],
        threshold: f64,
    ) -> Result<Vec<Vec<f64>>, PelError> {
        let cards: Vec<usize> = rel.iter().map(|&v| self.network.cardinality(v)).collect();
        let count: usize = cards.iter().product();
        let mut targets = Vec::with_capacity(rel.len() + 1);
        if target != given {
            targets.push(target);
        }
        targets.extend_from_slice(rel);
        self.stats.queries += 1;
        let joint = match query(&self.network, &targets, &Evidence::new().with(given, IND_TRUE)) {
            Ok(f) => f,
            Err(InferenceError::ZeroProbabilityEvidence) => return Ok(vec![indicator_row(false); count]),
            Err(e) => return Err(e.into()),
        };
        let values = joint.values();
        let rows = (0..count)
            .map(|row| {
                let (yes, no) = if target == given {
                    (values[row], 0.0)
                } else {
                    (values[IND_TRUE * count + row], values[IND_FALSE * count + row])
                };
                let total = yes + no;
                indicator_row(total > 0.0 && meets_threshold(yes / total, threshold))
            })
            .collect();
        Ok(rows)
    }

    /// Evidence `eta[formula] = true`.
    pub fn assert_formula(&mut self, formula: &Formula) -> Result<Evidence, PelError> {
        self.assert_formula_onto(formula, &Evidence::new())
    }

    /// Add `eta[formula] = true` to existing evidence, failing if the
    /// combination has probability zero.
    pub fn assert_formula_onto(&mut self, formula: &Formula, evidence: &Evidence) -> Result<Evidence, PelError> {
        let id = self.create_node(formula)?;
        let inconsistent = || PelError::InconsistentAssertion(alloc::format!("{formula}"));
        let combined = evidence.merged(&Evidence::new().with(id, IND_TRUE)).ok_or_else(inconsistent)?;
        if crate::inference::evidence_probability(&self.network, &combined)? == 0.0 {
            return Err(inconsistent());
        }
        Ok(combined)
    }

    /// `Pr(eta[formula] = true | evidence)` on the augmented network.
    pub fn query_formula(&mut self, formula: &Formula, evidence: &Evidence) -> Result<f64, PelError> {
        let id = self.create_node(formula)?;
        match probability_of(&self.network, &Evidence::new().with(id, IND_TRUE), evidence)? {
            Conditional::Value(p) => Ok(p),
            Conditional::Undefined => Err(InferenceError::ZeroProbabilityEvidence.into()),
        }
    }

    /// Model uncertainty about whether `agent` observes `variable` at
    /// `stage`: adds a binary `Observes_<agent>_<stage>_<var>` node with
    /// the given parents and CPD, and an `ObservedValue_<agent>_<stage>_<var>`
    /// node that copies the variable when observed and reads `unknown`
    /// otherwise. Both replace the variable in the agent's observation sets
    /// from `stage` on.
    pub fn add_observation_uncertainty(
        &mut self,
        agent: &str,
        stage: usize,
        variable: VarId,
        observes_parents: Vec<VarId>,
        observes_rows: Vec<Vec<f64>>,
    ) -> Result<(VarId, VarId), PelError> {
        if !self.indicators.is_empty() {
            return Err(PelError::IndicatorsPresent);
        }
        let var = self.network.variable(variable)?.clone();
        let max = self.schedule.stage_count(agent).ok_or_else(|| PelError::UnknownAgent(agent.into()))?;
        if stage == 0 || stage > max {
            return Err(PelError::StageOutOfRange { agent: agent.into(), stage, max });
        }
        let observed_here = self.schedule.observations(agent, stage).is_some_and(|s| s.contains(&var.name));
        if !observed_here {
            return Err(PelError::NotObservedAtStage { agent: agent.into(), stage, variable: var.name });
        }
        if stage > 1 && self.schedule.observations(agent, stage - 1).is_some_and(|s| s.contains(&var.name)) {
            return Err(PelError::ObservedEarlier { agent: agent.into(), stage, variable: var.name });
        }
        let descendants = self.network.descendants(variable);
        for &p in &observes_parents {
            self.network.variable(p)?;
            if descendants.contains(&p) || self.is_indicator(p) {
                return Err(PelError::DescendantParent { variable: var.name, parent: self.network.name(p).into() });
            }
        }

        let mut network = self.network.clone();
        let observes_name = alloc::format!("Observes_{agent}_{stage}_{}", var.name);
        let value_name = alloc::format!("ObservedValue_{agent}_{stage}_{}", var.name);
        let observes = network.add_variable(observes_name.clone(), labels(&["true", "false"]))?;
        network.set_cpd(observes, observes_parents, observes_rows)?;
        let mut domain = var.domain.clone();
        domain.push(UNKNOWN_LABEL.into());
        let value = network.add_variable(value_name.clone(), domain)?;
        let width = var.cardinality() + 1;
        let mut rows = Vec::with_capacity(var.cardinality() * 2);
        for v in 0..var.cardinality() {
            rows.push(one_hot(width, v)); // observed: copy
            rows.push(one_hot(width, width - 1)); // not observed: unknown
        }
        network.set_cpd(value, vec![variable, observes], rows)?;

        let stages = self.schedule.stages_mut(agent).expect("agent checked");
        for set in stages.iter_mut().skip(stage - 1) {
            if set.remove(&var.name) {
                set.insert(observes_name.clone());
                set.insert(value_name.clone());
            }
        }
        self.network = network;
        Ok((observes, value))
    }
}

fn indicator_row(holds: bool) -> Vec<f64> {
    if holds {
        vec![1.0, 0.0]
    } else {
        vec![0.0, 1.0]
    }
}

fn one_hot(width: usize, at: usize) -> Vec<f64> {
    let mut row = vec![0.0; width];
    row[at] = 1.0;
    row
}
