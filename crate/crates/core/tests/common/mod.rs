//! Random model generators and brute-force reference implementations
//! shared by the integration suites. Nothing here calls into the library's
//! inference code.
#![allow(dead_code)]

use std::collections::BTreeMap;

use pel_core::graph::labels;
use pel_core::{
    Formula, InfluenceDiagram, Network, NodeId, NodeKind, ObservationSchedule, PelModel, Policy, VarId,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_row<R: Rng>(rng: &mut R, width: usize) -> Vec<f64> {
    if rng.gen_bool(0.15) {
        let mut row = vec![0.0; width];
        row[rng.gen_range(0..width)] = 1.0;
        return row;
    }
    let raw: Vec<f64> = (0..width).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut row: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // make the row sum exactly to one within float rounding
    let rest: f64 = row[..width - 1].iter().sum();
    row[width - 1] = 1.0 - rest;
    row
}

/// A random network of `n` binary variables `X0..` whose ids follow a
/// topological order, each with at most three parents.
pub fn random_network<R: Rng>(rng: &mut R, n: usize) -> Network {
    let mut net = Network::new();
    let ids: Vec<VarId> = (0..n)
        .map(|i| net.add_variable(format!("X{i}"), labels(&["true", "false"])).unwrap())
        .collect();
    for i in 0..n {
        let mut parents: Vec<VarId> = ids[..i].iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
        parents.shuffle(rng);
        parents.truncate(3);
        let rows = (0..1usize << parents.len()).map(|_| random_row(rng, 2)).collect();
        net.set_cpd(ids[i], parents, rows).unwrap();
    }
    net
}

/// One or two agents with one or two stages each and growing observation
/// sets.
pub fn random_schedule<R: Rng>(rng: &mut R, n: usize) -> ObservationSchedule {
    let mut schedule = ObservationSchedule::new();
    for agent in ["a", "b"].iter().take(rng.gen_range(1..=2)) {
        let mut stages = Vec::new();
        let mut seen: Vec<String> = Vec::new();
        for _ in 0..rng.gen_range(1..=2) {
            for i in 0..n {
                let name = format!("X{i}");
                if !seen.contains(&name) && rng.gen_bool(0.35) {
                    seen.push(name);
                }
            }
            stages.push(seen.clone());
        }
        schedule.set_agent(*agent, stages);
    }
    schedule
}

pub fn random_model<R: Rng>(rng: &mut R) -> PelModel {
    let n = rng.gen_range(1..=7);
    let net = random_network(rng, n);
    let schedule = random_schedule(rng, n);
    PelModel::new(net, schedule).unwrap()
}

pub fn random_threshold<R: Rng>(rng: &mut R) -> f64 {
    *[0.0, 0.25, 0.5, 0.8, 1.0, 0.3, 0.7, 0.9].choose(rng).unwrap()
}

/// A formula of depth at most `depth` with at most `beliefs` belief
/// operators, over the model's original variables and agents.
pub fn random_formula<R: Rng>(rng: &mut R, model: &PelModel, depth: usize, beliefs: &mut usize) -> Formula {
    let vars: Vec<String> = model
        .network()
        .variables()
        .iter()
        .map(|v| v.name.clone())
        .filter(|n| n.starts_with('X'))
        .collect();
    let atom = |rng: &mut R| {
        let var = vars.choose(rng).unwrap().clone();
        let value = if rng.gen_bool(0.5) { "true" } else { "false" };
        Formula::atom(var, value)
    };
    if depth == 0 {
        return atom(rng);
    }
    let choice = rng.gen_range(0..if *beliefs > 0 { 6 } else { 4 });
    match choice {
        0 => atom(rng),
        1 => Formula::not(random_formula(rng, model, depth - 1, beliefs)),
        2 => {
            let a = random_formula(rng, model, depth - 1, beliefs);
            Formula::or(a, random_formula(rng, model, depth - 1, beliefs))
        }
        3 => {
            let a = random_formula(rng, model, depth - 1, beliefs);
            Formula::and(a, random_formula(rng, model, depth - 1, beliefs))
        }
        _ => {
            *beliefs -= 1;
            let agents: Vec<(String, usize)> = model
                .schedule()
                .agents()
                .map(|(a, s)| (a.to_string(), s.len()))
                .collect();
            let (agent, stages) = agents.choose(rng).unwrap().clone();
            let stage = rng.gen_range(1..=stages);
            let threshold = random_threshold(rng);
            let body = random_formula(rng, model, depth - 1, beliefs);
            if rng.gen_bool(0.5) {
                Formula::bel(agent, stage, threshold, body)
            } else {
                let cond = random_formula(rng, model, depth - 1, beliefs);
                Formula::bel_cond(agent, stage, threshold, body, cond)
            }
        }
    }
}

/// Brute-force PEL semantics written directly from the definitions: the
/// prior is the product of CPD entries, and an agent's belief at a state
/// is the prior restricted to states agreeing on its observations.
pub struct Reference {
    names: Vec<String>,
    domains: Vec<Vec<String>>,
    states: Vec<Vec<usize>>,
    prior: Vec<f64>,
    schedule: ObservationSchedule,
}

impl Reference {
    /// Over the variables of `model` that are not indicators.
    pub fn new(model: &PelModel) -> Self {
        let net = model.network();
        let keep: Vec<VarId> = model.base_variables().into_iter().collect();
        let names: Vec<String> = keep.iter().map(|&v| net.name(v).to_string()).collect();
        let domains: Vec<Vec<String>> = keep.iter().map(|&v| net.variable(v).unwrap().domain.clone()).collect();
        let position: BTreeMap<VarId, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut states = vec![vec![]];
        for d in &domains {
            states = states
                .into_iter()
                .flat_map(|s| {
                    (0..d.len()).map(move |x| {
                        let mut t = s.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        let prior = states
            .iter()
            .map(|s| {
                keep.iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let cpd = net.cpd(v).unwrap();
                        let row = cpd.parents.iter().fold(0, |acc, p| acc * net.cardinality(*p) + s[position[p]]);
                        cpd.rows[row][s[i]]
                    })
                    .product()
            })
            .collect();
        Reference { names, domains, states, prior, schedule: model.schedule().clone() }
    }

    fn index(&self, name: &str) -> usize {
        self.names.iter().position(|n| n == name).unwrap()
    }

    pub fn extension(&self, f: &Formula) -> Vec<bool> {
        match f {
            Formula::Atom { var, value } => {
                let i = self.index(var);
                let v = self.domains[i].iter().position(|d| d == value).unwrap();
                self.states.iter().map(|s| s[i] == v).collect()
            }
            Formula::Not(a) => self.extension(a).into_iter().map(|b| !b).collect(),
            Formula::Or(a, b) => self.extension(a).into_iter().zip(self.extension(b)).map(|(x, y)| x || y).collect(),
            Formula::BelCond { agent, stage, threshold, body, condition } => self
                .belief(agent, *stage, body, condition)
                .into_iter()
                .map(|b| b.is_some_and(|p| p >= threshold - 1e-12))
                .collect(),
        }
    }

    /// Belief at every state; `None` where the condition has no mass in
    /// the agent's information cell.
    pub fn belief(&self, agent: &str, stage: usize, body: &Formula, condition: &Formula) -> Vec<Option<f64>> {
        let observed: Vec<usize> = self
            .schedule
            .observations(agent, stage)
            .unwrap()
            .iter()
            .map(|n| self.index(n))
            .collect();
        let body = self.extension(body);
        let cond = self.extension(condition);
        (0..self.states.len())
            .map(|s| {
                let (mut c, mut both) = (0.0, 0.0);
                for t in 0..self.states.len() {
                    if cond[t] && observed.iter().all(|&o| self.states[s][o] == self.states[t][o]) {
                        c += self.prior[t];
                        if body[t] {
                            both += self.prior[t];
                        }
                    }
                }
                (c > 0.0).then(|| both / c)
            })
            .collect()
    }

    pub fn probability(&self, f: &Formula) -> f64 {
        self.extension(f).iter().zip(&self.prior).filter(|(s, _)| **s).map(|(_, p)| p).sum()
    }

    /// Prior of each state, in the order used by `extension` and `belief`.
    pub fn priors(&self) -> &[f64] {
        &self.prior
    }

    pub fn prior_of(&self, var: &str, value: &str) -> f64 {
        self.probability(&Formula::atom(var, value))
    }
}

/// A random influence diagram: up to four binary chance nodes, up to two
/// decisions with two or three actions, and one to three utilities.
pub fn random_id<R: Rng>(rng: &mut R) -> InfluenceDiagram {
    let chance = rng.gen_range(0..=4);
    let decisions = rng.gen_range(if chance == 0 { 1 } else { 0 }..=2);
    let mut kinds: Vec<bool> = std::iter::repeat_n(true, chance).chain(std::iter::repeat_n(false, decisions)).collect();
    kinds.shuffle(rng);
    let mut id = InfluenceDiagram::new();
    let mut made: Vec<NodeId> = Vec::new();
    for (i, is_chance) in kinds.into_iter().enumerate() {
        let mut parents: Vec<NodeId> = made.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
        parents.truncate(3);
        let node = if is_chance {
            let n = id.add_chance(format!("C{i}"), labels(&["t", "f"])).unwrap();
            let rows = parents.iter().map(|&p| id.node(p).domain.len()).product::<usize>();
            let rows = (0..rows).map(|_| random_row(rng, 2)).collect();
            id.set_cpd(n, parents, rows).unwrap();
            n
        } else {
            let actions = rng.gen_range(2..=3);
            let domain = (0..actions).map(|a| format!("a{a}")).collect();
            id.add_decision(format!("D{i}"), domain, parents).unwrap()
        };
        made.push(node);
    }
    for u in 0..rng.gen_range(1..=3) {
        let mut parents: Vec<NodeId> = made.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        parents.shuffle(rng);
        parents.truncate(3);
        let rows = parents.iter().map(|&p| id.node(p).domain.len()).product::<usize>();
        let values = (0..rows).map(|_| (rng.gen_range(-10.0f64..10.0) * 4.0).round() / 4.0).collect();
        id.add_utility(format!("U{u}"), parents, values).unwrap();
    }
    id
}

fn card(id: &InfluenceDiagram, n: NodeId) -> usize {
    id.node(n).domain.len()
}

fn row_of(id: &InfluenceDiagram, parents: &[NodeId], assignment: &BTreeMap<NodeId, usize>) -> usize {
    parents.iter().fold(0, |acc, p| acc * card(id, *p) + assignment[p])
}

/// Every joint assignment of chance and decision nodes with its chance
/// probability and total utility.
pub struct IdTable {
    decisions: Vec<NodeId>,
    entries: Vec<(BTreeMap<NodeId, usize>, f64, f64)>,
}

impl IdTable {
    pub fn new(id: &InfluenceDiagram) -> Self {
        let vars: Vec<NodeId> = (0..id.nodes().len())
            .map(|i| id.id_of(&id.nodes()[i].name).unwrap())
            .filter(|&n| id.node(n).kind != NodeKind::Utility)
            .collect();
        let mut assignments = vec![BTreeMap::new()];
        for &v in &vars {
            assignments = assignments
                .into_iter()
                .flat_map(|a| {
                    (0..card(id, v)).map(move |x| {
                        let mut b = a.clone();
                        b.insert(v, x);
                        b
                    })
                })
                .collect();
        }
        let entries = assignments
            .into_iter()
            .map(|a| {
                let p: f64 = vars
                    .iter()
                    .filter(|&&v| id.node(v).kind == NodeKind::Chance)
                    .map(|&v| id.node(v).rows[row_of(id, &id.node(v).parents, &a)][a[&v]])
                    .product();
                let u: f64 = id
                    .utilities()
                    .map(|u| id.node(u).values[row_of(id, &id.node(u).parents, &a)])
                    .sum();
                (a, p, u)
            })
            .collect();
        IdTable { decisions: id.decisions().to_vec(), entries }
    }

    /// Expected utility of rules given as `(parents, actions)` per decision
    /// in decision order.
    pub fn value(&self, id: &InfluenceDiagram, rules: &[(Vec<NodeId>, Vec<usize>)]) -> f64 {
        self.entries
            .iter()
            .filter(|(a, p, _)| {
                *p > 0.0
                    && self
                        .decisions
                        .iter()
                        .zip(rules)
                        .all(|(d, (parents, actions))| actions[row_of(id, parents, a)] == a[d])
            })
            .map(|(_, p, u)| p * u)
            .sum()
    }
}

pub fn policy_rules(policy: &Policy) -> Vec<(Vec<NodeId>, Vec<usize>)> {
    policy.rules.iter().map(|r| (r.parents.clone(), r.actions.clone())).collect()
}

/// Number of deterministic policies over the given decision parent sets.
pub fn policy_count(id: &InfluenceDiagram, parents: &[Vec<NodeId>]) -> f64 {
    id.decisions()
        .iter()
        .zip(parents)
        .map(|(&d, ps)| {
            let rows: usize = ps.iter().map(|&p| card(id, p)).product();
            (card(id, d) as f64).powi(rows as i32)
        })
        .product()
}

/// Best expected utility over every deterministic policy with the given
/// decision parent sets.
pub fn exhaustive_meu(id: &InfluenceDiagram, parents: &[Vec<NodeId>]) -> f64 {
    let table = IdTable::new(id);
    let shapes: Vec<(usize, usize)> = id
        .decisions()
        .iter()
        .zip(parents)
        .map(|(&d, ps)| (ps.iter().map(|&p| card(id, p)).product(), card(id, d)))
        .collect();
    let mut best = f64::NEG_INFINITY;
    let mut digits: Vec<Vec<usize>> = shapes.iter().map(|&(rows, _)| vec![0; rows]).collect();
    loop {
        let rules: Vec<(Vec<NodeId>, Vec<usize>)> = parents.iter().cloned().zip(digits.iter().cloned()).collect();
        best = best.max(table.value(id, &rules));
        // odometer increment over all rule tables
        let mut carried = true;
        'outer: for (k, &(_, actions)) in shapes.iter().enumerate() {
            for x in digits[k].iter_mut() {
                *x += 1;
                if *x < actions {
                    carried = false;
                    break 'outer;
                }
                *x = 0;
            }
        }
        if carried {
            return best;
        }
    }
}
