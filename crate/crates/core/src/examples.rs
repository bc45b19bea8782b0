//! Small ready-made models: the cyber-crisis network with its two agents,
//! the crisis as an influence diagram, and a two-action matching game.

use alloc::vec;
use alloc::vec::Vec;

use crate::decision::{InfluenceDiagram, NodeId};
use crate::graph::{labels, Network};
use crate::pel::{ObservationSchedule, PelModel};

const TF: [&str; 2] = ["true", "false"];

/// Rows of `C | V, M, A`, parents in that order.
fn casualty_rows() -> Vec<Vec<f64>> {
    let quiet = vec![0.0, 0.05, 0.95];
    let mut rows = vec![quiet; 8];
    rows[0] = vec![0.1, 0.3, 0.6]; // V, M, A all true
    rows[4] = vec![0.7, 0.25, 0.05]; // V false, M and A true
    rows
}

/// Variables, in order: V (vulnerability present), P (purchase), B
/// (develop), F (foreign intelligence reports), M (malware deployed), A
/// (attack), C (casualties: high, medium, low).
pub fn crisis_network() -> Network {
    let mut n = Network::new();
    let tf = || labels(&TF);
    let v = n.add_variable("V", tf()).unwrap();
    let p = n.add_variable("P", tf()).unwrap();
    let b = n.add_variable("B", tf()).unwrap();
    let f = n.add_variable("F", tf()).unwrap();
    let m = n.add_variable("M", tf()).unwrap();
    let a = n.add_variable("A", tf()).unwrap();
    let c = n.add_variable("C", labels(&["high", "medium", "low"])).unwrap();
    n.set_cpd(v, vec![], vec![vec![0.8, 0.2]]).unwrap();
    n.set_cpd(p, vec![v], vec![vec![0.1, 0.9], vec![1.0, 0.0]]).unwrap();
    n.set_cpd(b, vec![p], vec![vec![1.0, 0.0], vec![0.2, 0.8]]).unwrap();
    n.set_cpd(f, vec![b], vec![vec![0.3, 0.7], vec![0.0, 1.0]]).unwrap();
    n.set_cpd(m, vec![b, p], vec![vec![0.8, 0.2], vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0]])
        .unwrap();
    n.set_cpd(
        a,
        vec![v, m],
        vec![vec![0.6, 0.4], vec![0.05, 0.95], vec![0.95, 0.05], vec![0.05, 0.95]],
    )
    .unwrap();
    n.set_cpd(c, vec![v, m, a], casualty_rows()).unwrap();
    n
}

/// Agent `i` (the intruder) learns V, then its own moves; agent `u` (the
/// United States) sees nothing, then F, then F, A and C.
pub fn crisis_schedule() -> ObservationSchedule {
    ObservationSchedule::new()
        .with_agent(
            "i",
            vec![
                vec!["V"],
                vec!["V", "P"],
                vec!["V", "P", "B"],
                vec!["V", "P", "B", "F", "M"],
                vec!["V", "P", "B", "F", "M", "A"],
                vec!["V", "P", "B", "F", "M", "A", "C"],
            ],
        )
        .with_agent("u", vec![vec![], vec!["F"], vec!["F", "A", "C"]])
}

pub fn crisis_model() -> PelModel {
    PelModel::new(crisis_network(), crisis_schedule()).unwrap()
}

/// The crisis with the intruder's three moves as decisions. Utilities:
/// purchase costs 20, development 10, an attack 5, and casualties are
/// worth 100 / 50 / 0.
pub fn crisis_influence_diagram() -> InfluenceDiagram {
    let mut id = InfluenceDiagram::new();
    let tf = || labels(&TF);
    let v = id.add_chance("V", tf()).unwrap();
    id.set_cpd(v, vec![], vec![vec![0.8, 0.2]]).unwrap();
    let p = id.add_decision("P", tf(), vec![v]).unwrap();
    let b = id.add_decision("B", tf(), vec![v, p]).unwrap();
    let f = id.add_chance("F", tf()).unwrap();
    id.set_cpd(f, vec![b], vec![vec![0.3, 0.7], vec![0.0, 1.0]]).unwrap();
    let m = id.add_chance("M", tf()).unwrap();
    id.set_cpd(m, vec![b, p], vec![vec![0.8, 0.2], vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0]])
        .unwrap();
    let a = id.add_decision("A", tf(), vec![v, p, b, f, m]).unwrap();
    let c = id.add_chance("C", labels(&["high", "medium", "low"])).unwrap();
    id.set_cpd(c, vec![v, m, a], casualty_rows()).unwrap();
    id.add_utility("U_purchase", vec![p], vec![-20.0, 0.0]).unwrap();
    id.add_utility("U_develop", vec![b], vec![-10.0, 0.0]).unwrap();
    id.add_utility("U_attack", vec![a], vec![-5.0, 0.0]).unwrap();
    id.add_utility("U_casualties", vec![c], vec![100.0, 50.0, 0.0]).unwrap();
    id
}

/// The crisis diagram with a preference node `Aversion` (high, low) on the
/// purchase cost: with high aversion buying costs 60 instead of 20.
pub fn crisis_with_preferences() -> InfluenceDiagram {
    let mut id = crisis_influence_diagram();
    let u = id.id_of("U_purchase").unwrap();
    id.add_preference_node("Aversion", labels(&["high", "low"]), vec![0.5, 0.5], &[u])
        .unwrap();
    // parents (P, Aversion)
    id.set_utility_values(u, vec![-60.0, -20.0, 0.0, 0.0]).unwrap();
    id
}

/// A fair coin `X` and a decision `D` that observes it; utility one when
/// they match.
pub fn matching_game() -> (InfluenceDiagram, NodeId, NodeId) {
    let mut id = InfluenceDiagram::new();
    let x = id.add_chance("X", labels(&["0", "1"])).unwrap();
    id.set_cpd(x, vec![], vec![vec![0.5, 0.5]]).unwrap();
    let d = id.add_decision("D", labels(&["0", "1"]), vec![x]).unwrap();
    id.add_utility("U", vec![x, d], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    (id, x, d)
}
