use std::path::Path;
use std::process::Command as Process;

use gluedyn_cli::config::preset;
use gluedyn_cli::verify::reverify_report;
use gluedyn_cli::{run, Command, Construction, GlueMode, Report, RunConfig};

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_gluedyn"))
}

fn gluedyn(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn config(command: Command, system: &str) -> RunConfig {
    RunConfig::new(command, Some(preset(system).unwrap()))
}

fn read_report(dir: &Path) -> Report {
    Report::from_json(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn identical_configs_give_identical_bodies() {
    let mut est = config(Command::Glue { mode: GlueMode::Estimate }, "full-shift");
    est.params.epsilon = Some(0.125);
    est.params.seed = 9;
    for cfg in [config(Command::Analyze, "sturmian"), est] {
        let a = run(&cfg).unwrap().report;
        let b = run(&cfg).unwrap().report;
        assert_eq!(a.body(), b.body());
    }
}

#[test]
fn seed_changes_the_sample() {
    let mut a = config(Command::Glue { mode: GlueMode::Estimate }, "full-shift");
    a.params.epsilon = Some(0.125);
    let mut b = a.clone();
    b.params.seed = 1;
    assert_ne!(run(&a).unwrap().report.body(), run(&b).unwrap().report.body());
}

#[test]
fn reports_round_trip_and_reverify() {
    let mut refute = config(Command::Glue { mode: GlueMode::Refute }, "sturmian");
    refute.params.epsilon = Some(0.25);
    refute.params.bigm = Some(3);
    let mut family = config(Command::Construct { construction: Construction::Family }, "full-shift");
    family.params.levels = Some(3);
    let mut lambda = config(Command::Construct { construction: Construction::Lambda }, "full-shift");
    lambda.params.epsilon = Some(0.125);
    for cfg in [config(Command::Analyze, "golden-rotation"), refute, family, lambda] {
        let report = run(&cfg).unwrap().report;
        let back = Report::from_json(&report.to_json()).unwrap();
        assert_eq!(back.body(), report.body());
        assert!(reverify_report(&back).unwrap(), "{}", report.command);
    }
}

#[test]
fn tampered_certificates_fail_reverification() {
    let mut cfg = config(Command::Glue { mode: GlueMode::Refute }, "sturmian");
    cfg.params.epsilon = Some(0.25);
    cfg.params.bigm = Some(3);
    let mut report = run(&cfg).unwrap().report;
    let checks = report.result.pointer_mut("/outcome/spot_checks/0/max_distance").unwrap();
    *checks = serde_json::json!(0.0);
    assert!(!reverify_report(&report).unwrap());
}

#[test]
fn newer_major_versions_are_rejected() {
    let report = run(&config(Command::Analyze, "golden-mean")).unwrap().report;
    let text = report.to_json().replace("\"schema_version\": \"1.0.0\"", "\"schema_version\": \"2.0.0\"");
    assert!(Report::from_json(&text).is_err());
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(gluedyn(&["analyze", "--preset", "nope"]).0, 2);
    assert_eq!(gluedyn(&["analyze"]).0, 2);
    assert_eq!(gluedyn(&["glue", "refute", "--preset", "sturmian"]).0, 2);
    assert_eq!(gluedyn(&["glue", "check", "--preset", "full-shift", "--epsilon", "0.25", "--sequence", "12:x"]).0, 2);
    assert_eq!(gluedyn(&["analyze", "--preset", "full-shift", "--budget", "lots"]).0, 2);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"command": {"name": "analyze"}, "params": {"epsilom": 0.1}}"#).unwrap();
    assert_eq!(gluedyn(&["analyze", "--config", path.to_str().unwrap()]).0, 2);
}

#[test]
fn budget_exhaustion_exits_3() {
    let (code, _, err) = gluedyn(&["glue", "refute", "--preset", "skew-product", "--epsilon", "0.1", "--bigm", "5", "--budget", "tiny"]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("budget exhausted"));
    assert_eq!(gluedyn(&["construct", "family", "--preset", "full-shift", "--levels", "21"]).0, 3);
}

#[test]
fn staged_failure_exits_4_with_partial_report() {
    let (code, out, _) = gluedyn(&["construct", "proper-subsystem", "--preset", "golden-rotation"]);
    assert_eq!(code, 4);
    let report = Report::from_json(&out).unwrap();
    let stages = report.result.pointer("/demo/stages").unwrap().as_array().unwrap();
    assert_eq!(stages[0]["name"], "entropy");
    assert_eq!(stages[0]["ok"], false);
}

#[test]
fn construct_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _, err) = gluedyn(&["construct", "family", "--preset", "full-shift", "--levels", "6", "--out", out, "--format", "csv"]);
    assert_eq!(code, 0, "{err}");
    let pairs = std::fs::read_to_string(dir.path().join("pairs.csv")).unwrap();
    assert_eq!(pairs.lines().count(), 1 + 64 * 63 / 2);
    let report = read_report(dir.path());
    assert_eq!(report.result.pointer("/family/members").unwrap().as_array().unwrap().len(), 64);
    assert!(reverify_report(&report).unwrap());

    let (code, out, _) = gluedyn(&["construct", "proper-subsystem", "--preset", "full-shift", "--beta", "0.3"]);
    assert_eq!(code, 0);
    let report = Report::from_json(&out).unwrap();
    assert_eq!(report.result.pointer("/demo/completed").unwrap(), true);
}

#[test]
fn glue_examples() {
    let (code, out, _) = gluedyn(&["glue", "estimate", "--preset", "full-shift", "--epsilon", "0.25"]);
    assert_eq!(code, 0);
    assert_eq!(Report::from_json(&out).unwrap().result.pointer("/estimate/bigm").unwrap(), 1);

    let (code, out, _) = gluedyn(&["glue", "refute", "--preset", "sturmian", "--epsilon", "0.25", "--bigm", "3"]);
    assert_eq!(code, 0);
    let report = Report::from_json(&out).unwrap();
    assert_eq!(report.status.outcome, "refuted");
    assert!(reverify_report(&report).unwrap());

    let (code, out, _) = gluedyn(&["glue", "estimate", "--preset", "golden-rotation", "--epsilon", "0.1"]);
    assert_eq!(code, 0);
    let report = Report::from_json(&out).unwrap();
    assert!(report.result.pointer("/estimate/bigm").unwrap().as_u64().is_some());
    assert_eq!(report.tables[0].rows.len(), 50);

    // 12 then 21 glue with a unit gap at the first-symbol scale: z = 1221
    let args = ["glue", "check", "--preset", "full-shift", "--epsilon", "0.25", "--sequence", "12:2,21:2", "--gap", "1", "--point", "122111"];
    let (code, out, err) = gluedyn(&args);
    assert_eq!(code, 0, "{err}");
    let report = Report::from_json(&out).unwrap();
    assert_eq!(report.result.pointer("/certificate/pass").unwrap(), true);
}

#[test]
fn analyze_writes_table_and_figure() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = gluedyn(&["analyze", "--preset", "golden-rotation", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let report = read_report(dir.path());
    let rows = report.result["rows"].as_array().unwrap();
    assert!(rows.iter().all(|r| r["verdict"] == "holds-at-scale"));
    let svg = std::fs::read_to_string(dir.path().join("entropy_counts.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));

    let (code, out, _) = gluedyn(&["analyze", "--preset", "skew-product", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.contains("# conditions") && out.contains("equicontinuous"));
}

#[test]
fn demo_budget_and_negative_control() {
    let (code, out, err) = gluedyn(&["demo-theorem", "--budget", "tiny"]);
    assert_eq!(code, 0, "{err}");
    let report = Report::from_json(&out).unwrap();
    assert!(!report.notes.is_empty());
    assert!(err.contains("inconclusive"));

    let (code, out, _) = gluedyn(&["demo-theorem", "--budget", "tiny", "--tau-rig", "1e-9"]);
    assert_eq!(code, 1);
    let report = Report::from_json(&out).unwrap();
    let rows = report.result.pointer("/systems/0/analysis/rows").unwrap().as_array().unwrap();
    assert_eq!(rows[3]["verdict"], "fails-with-witness");
    assert!(rows.iter().enumerate().all(|(i, r)| i == 3 || r["verdict"] == "holds-at-scale"));
}
