use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn predlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_predlab")).args(args).env_remove("PREDLAB_FUEL").output().expect("spawn predlab")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn diagnostic(out: &Output) -> Value {
    let err = String::from_utf8_lossy(&out.stderr);
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 1, "expected one diagnostic line, got {err:?}");
    serde_json::from_str(lines[0]).expect("diagnostic is JSON")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const DYADIC: &str = include_str!("../configs/dyadic.json");

#[test]
fn dyadic_demo_attains_k() {
    let out = predlab(&["demo", "dyadic"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["report"]["verdict"], "ATTAINED_K");
    assert_eq!(report["report"]["counts"]["correct"], 100);
    assert_eq!(report["report"]["counts"]["incorrect"], 0);
}

#[test]
fn run_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), DYADIC);
    let out_path = dir.path().join("report.json");
    let out = predlab(&["run", "--config", &config, "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(report["report"]["verdict"], "ATTAINED_K");
}

#[test]
fn unknown_predictor_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &DYADIC.replace("\"identity\"", "\"oracle-x\""));
    let out = predlab(&["run", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    let diag = diagnostic(&out);
    assert_eq!(diag["exit"], 2);
    assert!(diag["message"].as_str().unwrap().contains("oracle-x"));
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "{\"name\": \"x\"");
    let out = predlab(&["run", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    diagnostic(&out);

    let out = predlab(&["run", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    diagnostic(&out);
}

#[test]
fn refuted_still_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &DYADIC.replace("\"identity\"", "\"constant-0\""));
    let out = predlab(&["run", "--config", &config]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_stdout(&out)["report"]["verdict"], "REFUTED");
}

#[test]
fn mealy_demo_csv_alternates_and_has_period_two() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("em.csv");
    let out = predlab(&["demo", "mealy-em", "--trials-csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,extracted,prediction,outcome,classification"));
    let outcomes: Vec<u8> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(outcomes.len(), 20);
    for (i, o) in outcomes.iter().enumerate() {
        assert_eq!(*o, if i % 2 == 0 { 1 } else { 0 }, "trial {}", i + 1);
    }

    let out = predlab(&["analyze", "--bits", csv.to_str().unwrap(), "--cycle"]);
    assert_eq!(out.status.code(), Some(0));
    let cycle = &json_stdout(&out)["cycle"];
    assert_eq!(cycle["found"], true);
    assert_eq!(cycle["period"], 2);
    assert_eq!(cycle["transient"], 0);
}

#[test]
fn qubit_demo_runs_both_scenarios_into_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("reports");
    let out = predlab(&["demo", "qubit-ec", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let born: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("qubit-ec-born.json")).unwrap()).unwrap();
    assert_eq!(born["report"]["verdict"], "REFUTED");
    let scripted: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("qubit-ec-scripted.json")).unwrap()).unwrap();
    assert_eq!(scripted["report"]["verdict"], "INCONCLUSIVE");
}

#[test]
fn show_config_prints_the_embedded_config() {
    let out = predlab(&["demo", "dyadic", "--show-config"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), DYADIC);
}

fn conjunction_count(report: &Value, predicates: &[&str]) -> u64 {
    report["totals"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["predicates"].as_array().unwrap().iter().map(|p| p.as_str().unwrap()).eq(predicates.iter().copied()))
        .unwrap_or_else(|| panic!("no conjunction {predicates:?}"))["count"]
        .as_u64()
        .unwrap()
}

#[test]
fn enumerate_single_state() {
    let out = predlab(&["enumerate", "--q-max", "1", "--strict"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(conjunction_count(&json_stdout(&out), &["strict"]), 0);

    let out = predlab(&["enumerate", "--q-max", "1", "--output-stable"]);
    assert_eq!(conjunction_count(&json_stdout(&out), &["output-stable"]), 4);
}

#[test]
fn enumerate_q2_matches_golden_totals() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counts.json");
    let out = predlab(&["enumerate", "--q-max", "2", "--all", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let golden: Value = serde_json::from_str(include_str!("../../core/tests/golden/enumeration_q2.json")).unwrap();
    assert_eq!(report["totals"], golden["totals"]);
    assert_eq!(conjunction_count(&report, &["output-stable"]), 104);
}

#[test]
fn enumerate_rejects_q_max_above_four() {
    let out = predlab(&["enumerate", "--q-max", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(diagnostic(&out)["exit"], 2);
}

#[test]
fn analyze_alternating_fails_normality() {
    let out = predlab(&["analyze", "--rule", "alternating", "--n", "16384", "--blocks", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["normality"]["pass"], false);
    assert!(report.get("cycle").is_none());
}

#[test]
fn analyze_constant_rule_has_period_one() {
    let out = predlab(&["analyze", "--rule", "constant-0", "--n", "100", "--cycle"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_stdout(&out)["cycle"]["period"], 1);
}

#[test]
fn analyze_needs_an_input() {
    let out = predlab(&["analyze", "--cycle"]);
    assert_eq!(out.status.code(), Some(2));
    diagnostic(&out);
    let out = predlab(&["analyze", "--rule", "no-such-rule", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
    diagnostic(&out);
}

#[test]
fn usage_errors_exit_two() {
    let out = predlab(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(diagnostic(&out)["exit"], 2);
    assert_eq!(predlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn fuel_override_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_predlab")).args(["demo", "dyadic"]).env("PREDLAB_FUEL", "lots").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    diagnostic(&out);

    let out = Command::new(env!("CARGO_BIN_EXE_predlab")).args(["demo", "dyadic"]).env("PREDLAB_FUEL", "5000").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_stdout(&out)["components"]["fuel"], 5000);
}

fn strip_wall_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

#[test]
fn reports_are_deterministic_modulo_wall_time() {
    for demo in ["dyadic", "mealy-em"] {
        let a = strip_wall_time(json_stdout(&predlab(&["demo", demo])));
        let b = strip_wall_time(json_stdout(&predlab(&["demo", demo])));
        assert_eq!(a, b, "{demo}");
    }
    let a = strip_wall_time(json_stdout(&predlab(&["demo", "dyadic", "--seed", "7"])));
    let b = strip_wall_time(json_stdout(&predlab(&["demo", "dyadic", "--seed", "7"])));
    assert_eq!(a, b);
    assert_eq!(a["scenario"]["seed"], 7);
}

#[test]
fn inadmissible_extractor_is_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"name":"peek","experiment":{"kind":"mealy-em","automaton":"canonical"},
            "extractor":{"kind":"automaton-state"},"predictor":"identity",
            "repetition":{"kind":"same-box"},"k":1,"n_max":5}"#,
    );
    let out = predlab(&["run", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(diagnostic(&out)["error"], "SCOPE_VIOLATION");
}
