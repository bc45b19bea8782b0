use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn pel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pel")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn first_number(o: &Output) -> f64 {
    stdout(o).lines().next().unwrap().trim().parse().unwrap()
}

const PHI: &str = "Bel[i,4] >= 0.8 (C=high or C=medium)";

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fixtures_validate() {
    for name in ["crisis.pel.json", "crisis_id.pel.json", "crisis_preferences.pel.json", "matching_game.pel.json"] {
        let out = pel(&["validate", s(&fixture(name))]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stdout(&out));
        assert_eq!(stdout(&out).trim(), "OK");
    }
}

#[test]
fn query_with_check_and_explain() {
    let out = pel(&["query", s(&fixture("crisis.pel.json")), PHI, "--check", "--explain"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!((first_number(&out) - 0.16).abs() < 1e-6);
    assert!(text.contains("oracle 0.160000"));
    assert!(text.contains("Rel = {V, M}"), "{text}");
    assert!(text.contains("  M -> eta[Bel[i,4] >= 0.8 (C=high or C=medium)]"));
}

#[test]
fn query_paths_and_evidence() {
    let path = fixture("crisis.pel.json");
    let fast = pel(&["query", s(&path), PHI, "--evidence", "V=false"]);
    let oracle = pel(&["query", s(&path), PHI, "--evidence", "V=false", "--oracle"]);
    assert!(fast.status.success() && oracle.status.success());
    assert_eq!(stdout(&fast), stdout(&oracle));
    assert!((first_number(&fast) - 0.8).abs() < 1e-6);

    let capped = pel(&["query", s(&path), PHI, "--oracle", "--max-states", "10"]);
    assert_eq!(capped.status.code(), Some(2));
    assert!(stderr(&capped).contains("above the cap of 10"), "{}", stderr(&capped));
}

#[test]
fn bind_errors_exit_nonzero() {
    let out = pel(&["query", s(&fixture("crisis.pel.json")), "X=missing"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown variable `X`"));
    let out = pel(&["query", s(&fixture("crisis.pel.json")), "V=true or"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot parse"));
}

#[test]
fn assertions() {
    let path = fixture("crisis.pel.json");
    let before = first_number(&pel(&["query", s(&path), PHI]));
    let after = pel(&["assert-query", s(&path), "V=false", PHI]);
    assert!(after.status.success());
    assert!(first_number(&after) > before);

    let tautology = pel(&["assert-query", s(&path), "V=true or !(V=true)", PHI]);
    assert!((first_number(&tautology) - before).abs() < 1e-6);

    let itself = pel(&["assert-query", s(&path), "V=false", "V=false"]);
    assert_eq!(stdout(&itself).trim(), "1.000000");

    let bad = pel(&["assert-query", s(&path), "V=false", PHI, "--evidence", "V=true"]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(stderr(&bad).contains("inconsistent assertion"));
}

#[test]
fn solve_matching_game() {
    let out = pel(&["solve", s(&fixture("matching_game.pel.json"))]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("  X=0 -> 0\n  X=1 -> 1\n"), "{text}");
    assert!(text.contains("meu 1.000000"));
}

#[test]
fn exported_crisis_network_keeps_identity() {
    let dir = tempfile::tempdir().unwrap();
    let export = dir.path().join("converted.pel.json");
    let out = pel(&["solve", s(&fixture("crisis_id.pel.json")), "--export-bn", s(&export)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("meu 8.500000"));
    assert_eq!(stdout(&pel(&["validate", s(&export)])).trim(), "OK");
    let belief = first_number(&pel(&["query", s(&export), "Bel[u,2] >= 0.8 (V=true)", "--check"]));
    let report = first_number(&pel(&["query", s(&export), "F=false"]));
    assert!((belief - report).abs() < 1e-6);
    let everywhere = first_number(&pel(&["query", s(&export), "Bel[u,1] >= 0.8 (V=true)"]));
    assert_eq!(everywhere, 1.0);
}

#[test]
fn solve_completes_no_forgetting_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        &dir,
        "forgetful.pel.json",
        r#"{
  "version": "pel-1",
  "variables": [{"name": "X", "domain": ["0", "1"]}],
  "cpds": [{"child": "X", "rows": [[0.3, 0.7]]}],
  "decisions": [
    {"name": "D1", "domain": ["a", "b"], "parents": ["X"]},
    {"name": "D2", "domain": ["a", "b"]}
  ],
  "utilities": [{"name": "U", "parents": ["X", "D2"], "table": [1, 0, 0, 1]}]
}"#,
    );
    let check = pel(&["validate", s(&path)]);
    assert_eq!(check.status.code(), Some(1));
    assert!(stdout(&check).contains("no-forgetting: D2 does not observe"));
    let out = pel(&["solve", s(&path)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("warning: added no-forgetting arc X -> D2"));
    assert!(stdout(&out).contains("meu 1.000000"));
}

#[test]
fn validate_reports_problems() {
    let dir = tempfile::tempdir().unwrap();
    let recall = write(
        &dir,
        "recall.pel.json",
        r#"{"version": "pel-1",
            "variables": [{"name": "X", "domain": ["0", "1"]}],
            "cpds": [{"child": "X", "rows": [[0.5, 0.5]]}],
            "agents": [{"name": "a", "stages": [["X"], []]}]}"#,
    );
    let out = pel(&["validate", s(&recall)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("perfect-recall: agent a observes X at stage 1 but not at stage 2"));

    let cyclic = write(
        &dir,
        "cyclic.pel.json",
        r#"{"version": "pel-1",
            "variables": [{"name": "X", "domain": ["0", "1"]}, {"name": "Y", "domain": ["0", "1"]}],
            "cpds": [{"child": "X", "parents": ["Y"], "rows": [[0.5, 0.5], [0.5, 0.5]]},
                     {"child": "Y", "parents": ["X"], "rows": [[0.5, 0.5], [0.5, 0.5]]}]}"#,
    );
    let out = pel(&["validate", s(&cyclic)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("cycle: X, Y"), "{}", stdout(&out));

    let unnormalized = write(
        &dir,
        "rows.pel.json",
        r#"{"version": "pel-1",
            "variables": [{"name": "X", "domain": ["0", "1"]}],
            "cpds": [{"child": "X", "rows": [[0.5, 0.6]]}]}"#,
    );
    let out = pel(&["validate", s(&unnormalized)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("row-not-normalized"), "{}", stdout(&out));
    let query = pel(&["query", s(&unnormalized), "X=0"]);
    assert_eq!(query.status.code(), Some(2));
}

#[test]
fn load_errors() {
    let missing = pel(&["validate", "/nonexistent/model.pel.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("cannot read"));

    let dir = tempfile::tempdir().unwrap();
    let broken = write(&dir, "broken.pel.json", "{\n  \"version\": \"pel-1\",\n  \"variables\": [\n}");
    let out = pel(&["validate", s(&broken)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("broken.pel.json:4:1"), "{}", stderr(&out));

    let unknown_field = write(&dir, "field.pel.json", r#"{"version": "pel-1", "variables": [], "cpd": []}"#);
    let out = pel(&["validate", s(&unknown_field)]);
    assert!(stderr(&out).contains("schema error") && stderr(&out).contains("`cpd`"), "{}", stderr(&out));

    let bad_parent = write(
        &dir,
        "parent.pel.json",
        r#"{"version": "pel-1", "variables": [{"name": "X", "domain": ["0"]}],
            "cpds": [{"child": "X", "parents": ["Q"], "rows": [[1.0]]}]}"#,
    );
    let out = pel(&["validate", s(&bad_parent)]);
    assert!(stderr(&out).contains("cpds[0].parents: unknown variable `Q`"), "{}", stderr(&out));
}
