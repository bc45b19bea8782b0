use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::diagnostics::Diagnostic;
use crate::graph::Network;

/// For each agent, the variables observed by the end of each stage.
/// Stage `i` (1-based) is stored at index `i - 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ObservationSchedule {
    agents: BTreeMap<String, Vec<BTreeSet<String>>>,
}

impl ObservationSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    /// Set (or replace) an agent's stage observation sets.
    pub fn set_agent<I, S>(&mut self, agent: impl Into<String>, stages: I)
    where
        I: IntoIterator<Item = Vec<S>>,
        S: Into<String>,
    {
        let stages = stages
            .into_iter()
            .map(|set| set.into_iter().map(Into::into).collect())
            .collect();
        self.agents.insert(agent.into(), stages);
    }

    pub fn with_agent<I, S>(mut self, agent: impl Into<String>, stages: I) -> Self
    where
        I: IntoIterator<Item = Vec<S>>,
        S: Into<String>,
    {
        self.set_agent(agent, stages);
        self
    }

    pub fn agents(&self) -> impl Iterator<Item = (&str, &[BTreeSet<String>])> {
        self.agents.iter().map(|(a, s)| (a.as_str(), s.as_slice()))
    }

    pub fn stage_count(&self, agent: &str) -> Option<usize> {
        self.agents.get(agent).map(Vec::len)
    }

    pub fn observations(&self, agent: &str, stage: usize) -> Option<&BTreeSet<String>> {
        self.agents.get(agent)?.get(stage.checked_sub(1)?)
    }

    pub(crate) fn stages_mut(&mut self, agent: &str) -> Option<&mut Vec<BTreeSet<String>>> {
        self.agents.get_mut(agent)
    }

    /// Unknown variables and perfect-recall violations between consecutive
    /// stages.
    pub fn validate(&self, network: &Network) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (agent, stages) in &self.agents {
            for (i, set) in stages.iter().enumerate() {
                for name in set {
                    if network.id_of(name).is_none() {
                        out.push(Diagnostic::UnknownVariable {
                            context: alloc::format!("observation set of {agent} at stage {}", i + 1),
                            name: name.clone(),
                        });
                    }
                }
            }
            for (i, pair) in stages.windows(2).enumerate() {
                for name in pair[0].difference(&pair[1]) {
                    out.push(Diagnostic::PerfectRecall {
                        agent: agent.clone(),
                        earlier: i + 1,
                        later: i + 2,
                        variable: name.clone(),
                    });
                }
            }
        }
        out
    }
}
