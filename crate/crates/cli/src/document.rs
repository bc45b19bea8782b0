//! The `pel-1` JSON model format.
//!
//! A document holds a network (`variables`, `cpds`) and agents' stage
//! observation sets. If it declares `decisions` or `utilities` it is an
//! influence diagram: `variables` and `cpds` then describe the chance
//! nodes only.

use std::fs;
use std::path::Path;

use pel_core::graph::GraphError;
use pel_core::{
    DecisionError, InfluenceDiagram, Network, NodeId, NodeKind, ObservationSchedule, PelError, PelModel,
    VarId, TRUE_VAR,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const VERSION: &str = "pel-1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub variables: Vec<VariableDecl>,
    #[serde(default)]
    pub cpds: Vec<CpdDecl>,
    #[serde(default)]
    pub agents: Vec<AgentDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub decisions: Vec<DecisionDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub utilities: Vec<UtilityDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observation_uncertainty: Vec<UncertaintyDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub preferences: Vec<PreferenceDecl>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDecl {
    pub name: String,
    pub domain: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CpdDecl {
    pub child: String,
    #[serde(default)]
    pub parents: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentDecl {
    pub name: String,
    /// Observation set at the end of each stage, stage 1 first.
    pub stages: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionDecl {
    pub name: String,
    pub domain: Vec<String>,
    #[serde(default)]
    pub parents: Vec<String>,
    /// Position in the decision sequence; listing order when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityDecl {
    pub name: String,
    #[serde(default)]
    pub parents: Vec<String>,
    pub table: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UncertaintyDecl {
    pub agent: String,
    pub stage: usize,
    pub variable: String,
    #[serde(default)]
    pub parents: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceDecl {
    pub name: String,
    pub domain: Vec<String>,
    pub prior: Vec<f64>,
    /// Replacement tables for the utilities the preference affects; the
    /// preference becomes their last parent.
    pub utilities: Vec<PreferenceTable>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceTable {
    pub name: String,
    pub table: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("{path}: schema error: {message}")]
    Schema { path: String, message: String },
}

/// What a document describes once loaded.
#[derive(Debug, Clone)]
pub enum Loaded {
    Model(PelModel),
    Diagram(Diagram),
}

/// An influence diagram plus the agent declarations that apply to the
/// network it converts to. Solving is left to the caller.
#[derive(Debug, Clone)]
pub struct Diagram {
    pub id: InfluenceDiagram,
    pub schedule: ObservationSchedule,
    pub uncertainty: Vec<UncertaintyDecl>,
}

impl ModelDocument {
    pub fn is_diagram(&self) -> bool {
        !self.decisions.is_empty() || !self.utilities.is_empty()
    }

    pub fn schedule(&self) -> ObservationSchedule {
        let mut schedule = ObservationSchedule::new();
        for agent in &self.agents {
            schedule.set_agent(agent.name.clone(), agent.stages.clone());
        }
        schedule
    }

    /// Build the in-memory objects. Structural problems that validation
    /// can describe (missing CPDs, bad rows, cycles) are kept for the
    /// validators; references to undeclared names are schema errors.
    pub fn build(&self) -> Result<Loaded, String> {
        if self.version != VERSION {
            return Err(format!("version: expected \"{VERSION}\", found \"{}\"", self.version));
        }
        if self.is_diagram() {
            return self.build_diagram().map(Loaded::Diagram);
        }
        if !self.preferences.is_empty() {
            return Err("preferences: only allowed in documents with decisions or utilities".into());
        }
        let network = self.build_network()?;
        let model = PelModel::new(network, self.schedule()).map_err(|e| e.to_string())?;
        apply_uncertainty(model, &self.observation_uncertainty).map(Loaded::Model)
    }

    fn build_network(&self) -> Result<Network, String> {
        let mut net = Network::new();
        for (i, v) in self.variables.iter().enumerate() {
            net.add_variable(v.name.clone(), v.domain.clone())
                .map_err(|e| format!("variables[{i}]: {e}"))?;
        }
        for (i, cpd) in self.cpds.iter().enumerate() {
            let at = |field: &str| format!("cpds[{i}].{field}");
            let child = net.id_of(&cpd.child).ok_or_else(|| format!("{}: unknown variable `{}`", at("child"), cpd.child))?;
            if net.cpd(child).is_some() {
                return Err(format!("{}: second CPD for `{}`", at("child"), cpd.child));
            }
            let parents = names_to_vars(&net, &cpd.parents).map_err(|n| format!("{}: unknown variable `{n}`", at("parents")))?;
            net.set_cpd_unchecked(child, parents, cpd.rows.clone())
                .map_err(|e: GraphError| format!("{}: {e}", at("parents")))?;
        }
        Ok(net)
    }

    fn build_diagram(&self) -> Result<Diagram, String> {
        let mut id = InfluenceDiagram::new();
        let err = |field: String| move |e: DecisionError| format!("{field}: {e}");
        for (i, v) in self.variables.iter().enumerate() {
            id.add_chance(v.name.clone(), v.domain.clone()).map_err(err(format!("variables[{i}]")))?;
        }
        let mut decisions: Vec<(usize, &DecisionDecl)> = self.decisions.iter().enumerate().collect();
        decisions.sort_by_key(|(i, d)| (d.order.unwrap_or(*i), *i));
        for (i, d) in &decisions {
            id.add_decision(d.name.clone(), d.domain.clone(), vec![]).map_err(err(format!("decisions[{i}]")))?;
        }
        let lookup = |id: &InfluenceDiagram, names: &[String], field: String| -> Result<Vec<NodeId>, String> {
            names
                .iter()
                .map(|n| {
                    id.id_of(n)
                        .filter(|&x| id.node(x).kind != NodeKind::Utility)
                        .ok_or_else(|| format!("{field}: unknown chance or decision node `{n}`"))
                })
                .collect()
        };
        for (i, d) in &decisions {
            let node = id.id_of(&d.name).expect("added above");
            let parents = lookup(&id, &d.parents, format!("decisions[{i}].parents"))?;
            id.set_decision_parents(node, parents).map_err(err(format!("decisions[{i}].parents")))?;
        }
        for (i, cpd) in self.cpds.iter().enumerate() {
            let child = id
                .id_of(&cpd.child)
                .filter(|&x| id.node(x).kind == NodeKind::Chance)
                .ok_or_else(|| format!("cpds[{i}].child: unknown chance node `{}`", cpd.child))?;
            if !id.node(child).rows.is_empty() {
                return Err(format!("cpds[{i}].child: second CPD for `{}`", cpd.child));
            }
            let parents = lookup(&id, &cpd.parents, format!("cpds[{i}].parents"))?;
            id.set_cpd(child, parents, cpd.rows.clone()).map_err(err(format!("cpds[{i}]")))?;
        }
        for (i, u) in self.utilities.iter().enumerate() {
            let parents = lookup(&id, &u.parents, format!("utilities[{i}].parents"))?;
            id.add_utility(u.name.clone(), parents, u.table.clone()).map_err(err(format!("utilities[{i}]")))?;
        }
        for (i, p) in self.preferences.iter().enumerate() {
            let mut affected = Vec::new();
            for (j, t) in p.utilities.iter().enumerate() {
                let u = id
                    .id_of(&t.name)
                    .filter(|&x| id.node(x).kind == NodeKind::Utility)
                    .ok_or_else(|| format!("preferences[{i}].utilities[{j}].name: unknown utility `{}`", t.name))?;
                affected.push(u);
            }
            id.add_preference_node(p.name.clone(), p.domain.clone(), p.prior.clone(), &affected)
                .map_err(err(format!("preferences[{i}]")))?;
            for (&u, t) in affected.iter().zip(&p.utilities) {
                id.set_utility_values(u, t.table.clone()).map_err(err(format!("preferences[{i}].utilities")))?;
            }
        }
        Ok(Diagram { id, schedule: self.schedule(), uncertainty: self.observation_uncertainty.clone() })
    }

    /// The network and schedule of `model` as a plain document: the
    /// reserved constant and indicator nodes are left out, and uncertain
    /// observations appear as ordinary variables.
    pub fn from_model(model: &PelModel, description: Option<String>) -> Self {
        let net = model.network();
        let keep: Vec<VarId> = model.base_variables().into_iter().filter(|&v| net.name(v) != TRUE_VAR).collect();
        Self::from_network(net, &keep, model.schedule(), description)
    }

    pub fn from_network(
        net: &Network,
        keep: &[VarId],
        schedule: &ObservationSchedule,
        description: Option<String>,
    ) -> Self {
        let variables = keep
            .iter()
            .map(|&v| VariableDecl { name: net.name(v).into(), domain: net.variables()[v.index()].domain.clone() })
            .collect();
        let cpds = keep
            .iter()
            .filter_map(|&v| net.cpd(v))
            .map(|c| CpdDecl {
                child: net.name(c.child).into(),
                parents: c.parents.iter().map(|&p| net.name(p).into()).collect(),
                rows: c.rows.clone(),
            })
            .collect();
        ModelDocument {
            version: VERSION.into(),
            description,
            variables,
            cpds,
            agents: agents_of(schedule),
            decisions: vec![],
            utilities: vec![],
            observation_uncertainty: vec![],
            preferences: vec![],
        }
    }

    /// A diagram as a document; preference nodes appear as ordinary chance
    /// nodes with the extended utility tables.
    pub fn from_diagram(id: &InfluenceDiagram, schedule: &ObservationSchedule, description: Option<String>) -> Self {
        let name = |n: &NodeId| id.node(*n).name.clone();
        let names = |ps: &[NodeId]| ps.iter().map(name).collect::<Vec<_>>();
        let chance: Vec<NodeId> = id.chance_nodes().collect();
        ModelDocument {
            version: VERSION.into(),
            description,
            variables: chance
                .iter()
                .map(|&c| VariableDecl { name: name(&c), domain: id.node(c).domain.clone() })
                .collect(),
            cpds: chance
                .iter()
                .map(|&c| CpdDecl { child: name(&c), parents: names(&id.node(c).parents), rows: id.node(c).rows.clone() })
                .collect(),
            agents: agents_of(schedule),
            decisions: id
                .decisions()
                .iter()
                .map(|&d| DecisionDecl {
                    name: name(&d),
                    domain: id.node(d).domain.clone(),
                    parents: names(&id.node(d).parents),
                    order: None,
                })
                .collect(),
            utilities: id
                .utilities()
                .map(|u| UtilityDecl { name: name(&u), parents: names(&id.node(u).parents), table: id.node(u).values.clone() })
                .collect(),
            observation_uncertainty: vec![],
            preferences: vec![],
        }
    }

    /// Pretty JSON with arrays of numbers or strings kept on one line.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("documents always serialize");
        let mut text = String::new();
        write_value(&value, 0, &mut text);
        text.push('\n');
        text
    }
}

fn write_value(value: &serde_json::Value, indent: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |n: usize| "  ".repeat(n);
    match value {
        Value::Array(items) if items.iter().all(|v| !v.is_array() && !v.is_object()) => {
            let parts: Vec<String> = items.iter().map(|v| serde_json::to_string(v).expect("scalars serialize")).collect();
            out.push('[');
            out.push_str(&parts.join(", "));
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(key).expect("keys serialize"));
                out.push_str(": ");
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => out.push_str(&serde_json::to_string(scalar).expect("scalars serialize")),
    }
}

fn agents_of(schedule: &ObservationSchedule) -> Vec<AgentDecl> {
    schedule
        .agents()
        .map(|(name, stages)| AgentDecl {
            name: name.into(),
            stages: stages.iter().map(|s| s.iter().cloned().collect()).collect(),
        })
        .collect()
}

fn names_to_vars(net: &Network, names: &[String]) -> Result<Vec<VarId>, String> {
    names.iter().map(|n| net.id_of(n).ok_or_else(|| n.clone())).collect()
}

/// Apply observation-uncertainty declarations in order.
pub fn apply_uncertainty(mut model: PelModel, decls: &[UncertaintyDecl]) -> Result<PelModel, String> {
    for (i, d) in decls.iter().enumerate() {
        let at = |field: &str| format!("observation_uncertainty[{i}].{field}");
        let var = model
            .network()
            .id_of(&d.variable)
            .ok_or_else(|| format!("{}: unknown variable `{}`", at("variable"), d.variable))?;
        let parents = names_to_vars(model.network(), &d.parents)
            .map_err(|n| format!("{}: unknown variable `{n}`", at("parents")))?;
        model
            .add_observation_uncertainty(&d.agent, d.stage, var, parents, d.rows.clone())
            .map_err(|e: PelError| format!("observation_uncertainty[{i}]: {e}"))?;
    }
    Ok(model)
}

pub fn parse_document(text: &str, path: &str) -> Result<ModelDocument, LoadError> {
    serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => LoadError::Schema { path: path.into(), message: e.to_string() },
            _ => LoadError::Parse { path: path.into(), line: e.line(), column: e.column(), message: e.to_string() },
        }
    })
}

pub fn read_document(path: &Path) -> Result<ModelDocument, LoadError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io { path: shown.clone(), source })?;
    parse_document(&text, &shown)
}

pub fn load_model(path: &Path) -> Result<(ModelDocument, Loaded), LoadError> {
    let doc = read_document(path)?;
    let loaded = doc
        .build()
        .map_err(|message| LoadError::Schema { path: path.display().to_string(), message })?;
    Ok((doc, loaded))
}

pub fn save_document(doc: &ModelDocument, path: &Path) -> std::io::Result<()> {
    fs::write(path, doc.to_json())
}
