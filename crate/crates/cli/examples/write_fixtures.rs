//! Regenerate the JSON fixtures from the built-in example models:
//! `cargo run -p pel-cli --example write_fixtures -- crates/cli/fixtures`.

use std::path::PathBuf;

use pel_cli::document::{save_document, ModelDocument, PreferenceDecl, PreferenceTable};
use pel_core::examples::{
    crisis_influence_diagram, crisis_model, crisis_schedule, matching_game,
};
use pel_core::ObservationSchedule;

const CRISIS: &str = "Cyber-crisis scenario. Binary variables use [true, false]; C (casualties) is \
[high, medium, low]. P(V=true) = 0.8 is the stated vaccine effectiveness. Every other table is a \
fixture choice: purchasing is optimal only after observing V=false, and \
Pr(Bel[i,4] >= 0.8 (C=high or C=medium)) is 0.16, rising to 0.8 once V=false is asserted.";

const CRISIS_ID: &str = "Cyber-crisis scenario as an influence diagram for the intruder: P (purchase), \
B (develop) and A (attack) are decisions. P(V=true) = 0.8 is the stated vaccine effectiveness; the \
other chance tables match crisis.pel.json. Utilities are fixture choices: purchase -20, development \
-10, attack -5, casualties 100 / 50 / 0. The optimal policy buys only when V=false (meu 8.5).";

const CRISIS_PREF: &str = "The crisis influence diagram with a preference node Aversion observed by \
the intruder. High aversion makes the purchase cost 60 instead of 20, which removes the purchase.";

const MATCHING: &str = "A fair coin X and a decision D that observes it; utility 1 when they match.";

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "crates/cli/fixtures".into()));
    let write = |name: &str, doc: ModelDocument| save_document(&doc, &dir.join(name)).expect("write fixture");

    write("crisis.pel.json", ModelDocument::from_model(&crisis_model(), Some(CRISIS.into())));
    write(
        "crisis_id.pel.json",
        ModelDocument::from_diagram(&crisis_influence_diagram(), &crisis_schedule(), Some(CRISIS_ID.into())),
    );
    let mut preferences =
        ModelDocument::from_diagram(&crisis_influence_diagram(), &crisis_schedule(), Some(CRISIS_PREF.into()));
    preferences.preferences.push(PreferenceDecl {
        name: "Aversion".into(),
        domain: vec!["high".into(), "low".into()],
        prior: vec![0.5, 0.5],
        // parents (P, Aversion)
        utilities: vec![PreferenceTable { name: "U_purchase".into(), table: vec![-60.0, -20.0, 0.0, 0.0] }],
    });
    write("crisis_preferences.pel.json", preferences);
    let (game, _, _) = matching_game();
    write(
        "matching_game.pel.json",
        ModelDocument::from_diagram(&game, &ObservationSchedule::new(), Some(MATCHING.into())),
    );
}
