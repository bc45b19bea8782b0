//! Satisfaction by exhaustive enumeration of world states. Exponential in
//! the number of variables; this is the reference the indicator
//! construction is checked against.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::formula::Formula;
use super::meets_threshold;
use super::model::{PelError, PelModel};
use super::schedule::ObservationSchedule;
use crate::graph::{Network, VarId, WorldState};
use crate::inference::{enumerate_joint, Conditional, JointTable};

/// The PEL model spelled out state by state over the non-indicator
/// variables of a [`PelModel`].
#[derive(Debug, Clone)]
pub struct Oracle {
    network: Network,
    schedule: ObservationSchedule,
    joint: JointTable,
    states: Vec<WorldState>,
    /// Model variable id of each oracle variable, in oracle id order.
    source_ids: Vec<VarId>,
}

impl Oracle {
    pub fn new(model: &PelModel, cap: usize) -> Result<Self, PelError> {
        let base: BTreeSet<VarId> = model.base_variables();
        let network = model.network().sub_network(&base)?;
        let joint = enumerate_joint(&network, cap)?;
        let states = (0..joint.len()).map(|i| joint.state(i)).collect();
        Ok(Oracle {
            network,
            schedule: model.schedule().clone(),
            joint,
            states,
            source_ids: base.into_iter().collect(),
        })
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, index: usize) -> &WorldState {
        &self.states[index]
    }

    pub fn prior(&self, index: usize) -> f64 {
        self.joint.probabilities()[index]
    }

    /// Index of the oracle state agreeing with a state of the model's
    /// (possibly augmented) network on every original variable.
    pub fn index_of(&self, model_state: &WorldState) -> usize {
        self.source_ids
            .iter()
            .zip(self.network.variables())
            .fold(0, |acc, (id, var)| acc * var.cardinality() + model_state.value(*id))
    }

    /// `[formula]`: which states satisfy the formula.
    pub fn extension(&self, formula: &Formula) -> Result<Vec<bool>, PelError> {
        match formula {
            Formula::Atom { var, value } => {
                let id = self.network.id_of(var).ok_or_else(|| PelError::UnknownVariable(var.clone()))?;
                let v = self.network.variable(id)?.value_index(value).ok_or_else(|| PelError::UnknownValue {
                    var: var.clone(),
                    value: value.clone(),
                })?;
                Ok(self.states.iter().map(|s| s.value(id) == v).collect())
            }
            Formula::Not(inner) => Ok(self.extension(inner)?.into_iter().map(|b| !b).collect()),
            Formula::Or(a, b) => {
                let a = self.extension(a)?;
                let b = self.extension(b)?;
                Ok(a.into_iter().zip(b).map(|(x, y)| x || y).collect())
            }
            Formula::BelCond { agent, stage, threshold, body, condition } => {
                let beliefs = self.belief(agent, *stage, body, condition)?;
                Ok(beliefs
                    .into_iter()
                    .map(|b| match b {
                        Conditional::Value(p) => meets_threshold(p, *threshold),
                        Conditional::Undefined => false,
                    })
                    .collect())
            }
        }
    }

    /// `p_{a,i,s}([body] | [condition])` at every state `s`: the prior
    /// restricted to states that agree with `s` on the agent's
    /// observations, then conditioned on the condition.
    pub fn belief(&self, agent: &str, stage: usize, body: &Formula, condition: &Formula) -> Result<Vec<Conditional>, PelError> {
        let observed: Vec<VarId> = self
            .schedule
            .observations(agent, stage)
            .ok_or_else(|| PelError::StageOutOfRange {
                agent: agent.into(),
                stage,
                max: self.schedule.stage_count(agent).unwrap_or(0),
            })?
            .iter()
            .map(|n| self.network.id_of(n).ok_or_else(|| PelError::UnknownVariable(n.clone())))
            .collect::<Result<_, _>>()?;
        let body = self.extension(body)?;
        let cond = self.extension(condition)?;
        let key = |s: &WorldState| observed.iter().map(|&v| s.value(v)).collect::<Vec<usize>>();
        let mut mass: BTreeMap<Vec<usize>, (f64, f64)> = BTreeMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if cond[i] {
                let entry = mass.entry(key(s)).or_default();
                let p = self.prior(i);
                entry.0 += p;
                if body[i] {
                    entry.1 += p;
                }
            }
        }
        Ok(self
            .states
            .iter()
            .map(|s| match mass.get(&key(s)) {
                Some(&(c, both)) if c > 0.0 => Conditional::Value(both / c),
                _ => Conditional::Undefined,
            })
            .collect())
    }

    /// Total prior probability of the states satisfying `formula`.
    pub fn probability(&self, formula: &Formula) -> Result<f64, PelError> {
        let ext = self.extension(formula)?;
        Ok(ext
            .iter()
            .zip(self.joint.probabilities())
            .filter(|(sat, _)| **sat)
            .map(|(_, p)| p)
            .sum())
    }
}

/// Whether `formula` holds at `state`, a state of the model's network
/// (indicator entries are ignored).
pub fn eval_state(model: &PelModel, formula: &Formula, state: &WorldState, cap: usize) -> Result<bool, PelError> {
    model.bind(formula)?;
    let oracle = Oracle::new(model, cap)?;
    Ok(oracle.extension(formula)?[oracle.index_of(state)])
}

/// Sum of the prior over states satisfying `formula`, by enumeration.
pub fn formula_probability_oracle(model: &PelModel, formula: &Formula, cap: usize) -> Result<f64, PelError> {
    model.bind(formula)?;
    Oracle::new(model, cap)?.probability(formula)
}
