use std::path::PathBuf;
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn hexsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hexsub"))
        .args(args)
        .env_remove("HEXSUB_MAX_T")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn radial() -> String {
    config("monge_ampere_radial.json").display().to_string()
}

#[test]
fn check_exit_codes() {
    let ok = hexsub(&["--config", &radial(), "check"]);
    assert_eq!(code(&ok), 0);
    assert!(String::from_utf8_lossy(&ok.stdout).contains("admissible"));
    let off = config("hessian_off_level.json");
    let bad = hexsub(&["--config", off.to_str().unwrap(), "check"]);
    assert_eq!(code(&bad), 1);
}

#[test]
fn exponent_reports_delta_range() {
    let ok = hexsub(&["--config", &radial(), "--json", "exponent", "--delta", "0.5"]);
    assert_eq!(code(&ok), 0);
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert!((v["alpha"].as_f64().unwrap() - 1.2).abs() < 1e-12, "{v}");
    let big = hexsub(&["--config", &radial(), "exponent", "--delta", "5"]);
    assert_eq!(code(&big), 1);
    assert!(String::from_utf8_lossy(&big.stdout).contains("delta range [0, 1"));
}

#[test]
fn subsolve_then_verify_profile() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let s = hexsub(&["--config", &radial(), "--out", csv.to_str().unwrap(), "subsolve"]);
    assert_eq!(code(&s), 0, "{}", String::from_utf8_lossy(&s.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("s,w,u"));
    assert!(dir.path().join("p.json").exists());
    let v = hexsub(&["--config", &radial(), "--json", "verify", "--profile", csv.to_str().unwrap()]);
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stderr));
    let rep: serde_json::Value = serde_json::from_slice(&v.stdout).unwrap();
    assert_eq!(rep["certified"], true, "{rep}");

    // a profile built with another c2 is rejected
    let other = dir.path().join("q.csv");
    hexsub(&["--config", &radial(), "--out", other.to_str().unwrap(), "subsolve", "--c2", "3"]);
    let mismatch = hexsub(&["--config", &radial(), "verify", "--profile", other.to_str().unwrap()]);
    assert_ne!(code(&mismatch), 0);
}

#[test]
fn reproduce_examples_json() {
    let o = hexsub(&["reproduce-examples", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["examples"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["family"] == "M" && r["status"] == "pass"));
    assert!(v["thresholds"].as_array().unwrap().len() >= 4);
}

#[test]
fn perron_with_unit_ball() {
    let dom = config("unit_ball.json");
    let o = hexsub(&["--config", &radial(), "perron", "--domain", dom.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("0 violations"));
}

#[test]
fn run_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = hexsub(&["--config", &radial(), "--out", dir.path().to_str().unwrap(), "--quiet", "run"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["check.json", "profile.csv", "subsolve.json", "verify.json", "glue_report.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn missing_config_is_an_error() {
    let o = hexsub(&["check"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}
