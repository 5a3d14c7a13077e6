//! End-to-end behavior of the `domlab` binary: exit codes, the JSON shapes
//! each subcommand prints when stdout is not a terminal, and the artifact
//! files written by `--out`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value as Json;

const PD: &str = r#"{
  "name": "pd",
  "players": ["r", "c"],
  "strategies": {"r": ["C", "D"], "c": ["C", "D"]},
  "payoffs": {
    "r": [[2, 0], [3, 1]],
    "c": [[2, 3], [0, 1]]
  }
}"#;

fn domlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_domlab"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code (killed by signal?)")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

/// Parses the single JSON document a subcommand prints on success.
fn json(out: &Output) -> Json {
    serde_json::from_str(stdout(out).trim()).unwrap_or_else(|e| {
        panic!("stdout is not one JSON document: {e}\n--- stdout ---\n{}", stdout(out))
    })
}

fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).expect("fixture written");
    path
}

fn pd_file(dir: &Path) -> PathBuf {
    write_file(dir, "pd.json", PD)
}

#[test]
fn maximal_run_exits_zero_and_streams_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let game = pd_file(dir.path());
    let out = domlab(&["run", "--game", game.to_str().unwrap(), "--mode", "gkz", "--policy", "remove-one"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let lines: Vec<Json> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).expect("every line is JSON"))
        .collect();
    assert!(lines.len() >= 3, "expected header, stages, outcome; got {} lines", lines.len());
    assert_eq!(lines[0]["type"], "header");
    assert_eq!(lines[0]["mode"], "gkz");
    let last = lines.last().unwrap();
    assert_eq!(last["type"], "outcome");
    assert_eq!(last["status"], "maximal");
    // Both players keep exactly their dominant strategy.
    let stages: Vec<&Json> = lines.iter().filter(|l| l["type"] == "stage").collect();
    let final_parts = &stages.last().unwrap()["reduction"];
    assert_eq!(final_parts["r"], serde_json::json!([{"type": "atom", "label": "D"}]));
    assert_eq!(final_parts["c"], serde_json::json!([{"type": "atom", "label": "D"}]));
}

#[test]
fn script_that_stops_short_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let game = pd_file(dir.path());
    // Removes row C and then stops; column C is still dominated.
    let script = write_file(dir.path(), "script.json", r#"[{"r": "{C}"}]"#);
    let out = domlab(&[
        "run",
        "--game", game.to_str().unwrap(),
        "--policy", "scripted",
        "--script", script.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
    let last: Json = serde_json::from_str(stdout(&out).lines().last().unwrap()).unwrap();
    assert_eq!(last["status"], "script_ended");
    assert_eq!(last["maximal"], false);
}

#[test]
fn invalid_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();

    // Not JSON at all.
    let garbled = write_file(dir.path(), "garbled.json", "{ not json");
    let out = domlab(&["run", "--game", garbled.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).starts_with("error:"), "stderr: {}", stderr(&out));

    // Well-formed JSON, ill-formed game.
    let solo = write_file(dir.path(), "solo.json", r#"{"players": ["a"], "strategies": {"a": ["x"]}, "payoffs": {"a": [0]}}"#);
    let out = domlab(&["run", "--game", solo.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("at least two players"), "stderr: {}", stderr(&out));

    // Unknown catalog id.
    let out = domlab(&["run", "--catalog", "no_such_game"]);
    assert_eq!(code(&out), 2);

    // A script naming a player the game does not have.
    let game = pd_file(dir.path());
    let script = write_file(dir.path(), "bad_script.json", r#"[{"z": "{C}"}]"#);
    let out = domlab(&[
        "run",
        "--game", game.to_str().unwrap(),
        "--policy", "scripted",
        "--script", script.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("z"), "stderr: {}", stderr(&out));

    // --script only makes sense with the scripted policy.
    let out = domlab(&[
        "run",
        "--game", game.to_str().unwrap(),
        "--script", script.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_from_the_parser_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let game = pd_file(dir.path());

    // --game and --catalog are mutually exclusive.
    let out = domlab(&["run", "--game", game.to_str().unwrap(), "--catalog", "intro_open_interval"]);
    assert_eq!(code(&out), 2);

    // --trunc requires --catalog.
    let out = domlab(&["run", "--game", game.to_str().unwrap(), "--trunc", "4"]);
    assert_eq!(code(&out), 2);

    // A game source is required.
    let out = domlab(&["run"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn exhausted_limit_budget_exits_three_and_keeps_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("partial.jsonl");
    let out = domlab(&[
        "run",
        "--catalog", "ex2_order_indep_not_equal",
        "--max-limits", "0",
        "--out", trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("budget"), "stderr: {}", stderr(&out));

    let text = fs::read_to_string(&trace).expect("partial trace written");
    let last: Json = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["type"], "outcome");
    assert_eq!(last["status"], "truncated");
}

#[test]
fn unsupported_queries_exit_four() {
    // The empty reduction is unreachable by survivor-scoped steps here:
    // every candidate step leaves the removed strategy's dominators out of
    // scope, so interpolation must give up rather than guess.
    let out = domlab(&["interpolate-gkz", "--catalog", "gkz_omega_plus_one", "--to", "∅", "--to", "∅"]);
    assert_eq!(code(&out), 4, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("unsupported"), "stderr: {}", stderr(&out));

    // remove-all has no canonical survivor-scoped stage on this game.
    let out = domlab(&["run", "--catalog", "gkz_omega_plus_one", "--mode", "gkz", "--policy", "remove-all"]);
    assert_eq!(code(&out), 4, "stderr: {}", stderr(&out));
}

#[test]
fn validate_round_trips_a_recorded_trace() {
    let dir = tempfile::tempdir().unwrap();
    let game = pd_file(dir.path());
    let trace = dir.path().join("trace.jsonl");
    let out = domlab(&["run", "--game", game.to_str().unwrap(), "--out", trace.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let summary = json(&out);
    assert_eq!(summary["outcome"], "maximal");
    assert_eq!(summary["final"], "{D} × {D}");

    let out = domlab(&[
        "validate",
        "--game", game.to_str().unwrap(),
        "--trace", trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(json(&out)["valid"], true);
}

#[test]
fn catalog_list_names_every_built_in_game() {
    let out = domlab(&["catalog", "list"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    let entries = doc["entries"].as_array().expect("entries array");
    assert_eq!(entries.len(), 8);
    let ids: Vec<&str> = entries.iter().map(|e| e["id"].as_str().unwrap()).collect();
    for id in [
        "intro_open_interval",
        "ex1_unbounded_at_limit",
        "ex2_order_indep_not_equal",
        "ex3_not_all_bounded",
        "ex4_apt_property_C",
        "ex5_closure_star",
        "gkz_omega_plus_one",
        "closed_interval_identity",
    ] {
        assert!(ids.contains(&id), "missing catalog id {id}; got {ids:?}");
        let summary = entries.iter().find(|e| e["id"] == id).unwrap()["summary"]
            .as_str()
            .unwrap();
        assert!(!summary.is_empty(), "{id} has an empty summary");
    }
}

#[test]
fn analyze_reports_the_failing_witness() {
    let out = domlab(&[
        "analyze",
        "--catalog", "ex1_unbounded_at_limit",
        "--reduction", "[0, 1/2] ∪ {1}",
        "--reduction", "{Left, Right}",
        "--check", "complete",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let verdict = &json(&out)["checks"]["completely_bounded"];
    assert_eq!(verdict["holds"], false);
    assert_eq!(verdict["witness"]["player"], "row");

    // The same analyzer passes where it should: the full strategy space of
    // the constant-column game.
    let out = domlab(&[
        "analyze",
        "--catalog", "ex3_not_all_bounded",
        "--reduction", "[0, 1]",
        "--reduction", "{Left, Right}",
        "--check", "complete",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(json(&out)["checks"]["completely_bounded"]["holds"], true);
}

#[test]
fn enumerate_writes_the_class_file() {
    let dir = tempfile::tempdir().unwrap();
    let game = pd_file(dir.path());
    let class = dir.path().join("class.json");
    let out = domlab(&[
        "enumerate",
        "--game", game.to_str().unwrap(),
        "--out", class.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let summary = json(&out);
    assert_eq!(summary["sequences"], 3);
    assert_eq!(summary["reductions"], 4);
    assert_eq!(summary["maximal"], serde_json::json!(["{D} × {D}"]));

    let doc: Json = serde_json::from_str(&fs::read_to_string(&class).unwrap()).unwrap();
    assert_eq!(doc["game"], "pd");
    assert!(doc["sequences"].as_array().is_some(), "class file lists the sequences");
}

#[test]
fn check_theorems_covers_a_seed_range() {
    let out = domlab(&["check-theorems", "--seeds", "3"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc = json(&out);
    assert_eq!(doc["games"], 3);
    assert_eq!(doc["all_pass"], true);
    assert_eq!(doc["failures"], serde_json::json!([]));

    let dir = tempfile::tempdir().unwrap();
    let game = pd_file(dir.path());
    let out = domlab(&["check-theorems", "--game", game.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(json(&out)["all_pass"], true);
}

#[test]
fn interpolation_reaches_the_fixpoint_in_one_stage() {
    // Both dominated strategies can leave in one survivor-scoped stage:
    // each dominator survives the removal.
    let dir = tempfile::tempdir().unwrap();
    let game = pd_file(dir.path());
    let out = domlab(&[
        "interpolate-gkz",
        "--game", game.to_str().unwrap(),
        "--to", "{D}",
        "--to", "{D}",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc = json(&out);
    assert_eq!(doc["steps"], 1);
    assert_eq!(doc["chain"], serde_json::json!(["{C, D} × {C, D}", "{D} × {D}"]));
}

#[test]
fn truncated_catalog_games_load_like_files() {
    let out = domlab(&["enumerate", "--catalog", "ex2_order_indep_not_equal", "--trunc", "3"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc = json(&out);
    assert_eq!(doc["game"], "ex2_order_indep_not_equal@3");
    // Only one strategy is removable at each stage, so the elimination
    // sequence is unique and stops at the top two points of each side.
    assert_eq!(doc["sequences"], 1);
    assert_eq!(doc["reductions"], 5);
    assert_eq!(doc["maximal"], serde_json::json!(["{4/5, 1} × {5/6, 1}"]));
}
