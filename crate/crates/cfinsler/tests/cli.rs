use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL: &str = r#""samples": {"points": 3, "base_points": 2, "fibers": 3, "curvature_points": 3, "kahler_points": 10, "norm_samples": 200}"#;

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn verify(config: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfinsler"))
        .arg("verify")
        .arg("--config")
        .arg(config)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn heisenberg(dir: &TempDir, perturbation: f64) -> PathBuf {
    let body = format!(
        r#"{{"model": {{"name": "heisenberg3"}}, "norm": {{"kind": "pnorm", "p": 1.5}}, "perturbation": {perturbation}, {SMALL}}}"#
    );
    write_config(dir, "heisenberg.json", &body)
}

#[test]
fn passing_run_exits_zero_with_json() {
    let dir = TempDir::new().unwrap();
    let out = verify(&heisenberg(&dir, 0.0), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["pass"], true);
    assert_eq!(report["suites"].as_array().unwrap().len(), 7);
    assert!(report["suites"][0].get("runtime_ms").is_none());
    let row = &report["suites"][0]["rows"][0];
    for key in ["label", "value", "tolerance", "expect", "threshold", "samples", "pass", "worst"] {
        assert!(row.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn broken_metric_exits_one() {
    let dir = TempDir::new().unwrap();
    let out = verify(&heisenberg(&dir, 0.1), &["--suite", "curvature"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = heisenberg(&dir, 0.0);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let run = verify(&cfg, &["--suite", "connection", "--suite", "kahler", "--out", out.to_str().unwrap()]);
        assert_eq!(run.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let other = verify(&cfg, &["--suite", "connection", "--suite", "kahler", "--seed", "7"]);
    assert_ne!(other.stdout, std::fs::read(&a).unwrap());
}

#[test]
fn suite_results_do_not_depend_on_selection() {
    let dir = TempDir::new().unwrap();
    let cfg = heisenberg(&dir, 0.0);
    let alone: serde_json::Value = serde_json::from_slice(&verify(&cfg, &["--suite", "spray"]).stdout).unwrap();
    let all: serde_json::Value = serde_json::from_slice(&verify(&cfg, &[]).stdout).unwrap();
    let spray = all["suites"].as_array().unwrap().iter().find(|s| s["suite"] == "spray").unwrap();
    assert_eq!(&alone["suites"][0], spray);
}

#[test]
fn markdown_and_timings() {
    let dir = TempDir::new().unwrap();
    let cfg = heisenberg(&dir, 0.0);
    let out = verify(&cfg, &["--suite", "frames", "--format", "markdown", "--timings"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# Verification report"));
    assert!(text.contains("## frames: PASS ("));
    assert!(text.contains("| check | value | tolerance |"));
}

#[test]
fn tolerance_scale_can_force_failure() {
    let dir = TempDir::new().unwrap();
    let out = verify(&heisenberg(&dir, 0.0), &["--suite", "connection", "--tol-scale", "1e-12"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_errors_exit_two_and_name_the_problem() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("bad_p.json", r#"{"model": {"name": "heisenberg3"}, "norm": {"kind": "pnorm", "p": 0.5}}"#, "norm.p"),
        ("unknown_key.json", "{\n  \"model\": {\"name\": \"heisenberg3\"},\n  \"norm\": {\"kind\": \"hermitian\"},\n  \"sead\": 1\n}", "line 4"),
        ("bad_model.json", r#"{"model": {"name": "sl2"}, "norm": {"kind": "hermitian"}}"#, "model.name"),
        (
            "indefinite.json",
            r#"{"model": {"name": "affine1"}, "norm": {"kind": "hermitian", "matrix": [[[1,0],[0,0]],[[0,0],[-1,0]]]}}"#,
            "norm.matrix",
        ),
        ("bad_suite.json", r#"{"model": {"name": "affine1"}, "norm": {"kind": "hermitian"}, "suites": ["ricci"]}"#, "suites"),
    ];
    for (name, body, needle) in cases {
        let out = verify(&write_config(&dir, name, body), &[]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{name}: {err}");
    }
    let missing = verify(&dir.path().join("absent.json"), &[]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_scale = verify(&heisenberg(&dir, 0.0), &["--tol-scale", "-1"]);
    assert_eq!(bad_scale.status.code(), Some(2));
}
