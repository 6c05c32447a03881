use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(scenario: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dispersive"))
        .arg("--scenario")
        .arg(scenario)
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .args(extra)
        .output()
        .expect("spawn dispersive")
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

fn edited(name: &str, from: &str, to: &str, dir: &Path) -> PathBuf {
    let text = std::fs::read_to_string(scenario(name)).unwrap();
    assert!(text.contains(from), "{from}");
    let path = dir.join(name);
    std::fs::write(&path, text.replace(from, to)).unwrap();
    path
}

#[test]
fn fock_decay_matches_exponential_law() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&scenario("fock_decay.json"), out.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let csv = std::fs::read_to_string(out.path().join("observables.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,mean_photon,inversion,trace_check"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 11);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 5.0);
    assert!((last[1] - (-1.0f64).exp()).abs() < 1e-9, "{}", last[1]);

    let report: Value = serde_json::from_str(&std::fs::read_to_string(out.path().join("verification.json")).unwrap())
        .unwrap();
    assert!(report["blocks"]["ee"]["max_distance"].as_f64().unwrap() < 1e-8);
    assert_eq!(report["all_pass"], Value::Bool(true));

    let snap: Value = serde_json::from_str(&std::fs::read_to_string(out.path().join("blocks_t0.json")).unwrap())
        .unwrap();
    assert_eq!(snap["t"], 5.0);
    assert_eq!(snap["rho_ee"].as_array().unwrap().len(), 33);
    assert_eq!(snap["rho_ee"][0][0].as_array().unwrap().len(), 2);
}

#[test]
fn negative_gamma_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let path = edited("fock_decay.json", "\"gamma\": 0.1", "\"gamma\": -0.1", dir.path());
    let o = run(&path, &dir.path().join("out"), &[]);
    assert!(!o.status.success());
    let e = stderr_json(&o);
    assert!(e["error"]["field"].as_str().unwrap().contains("gamma"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn zero_t_max_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path =
        edited("fock_decay.json", "\"t_max\": 5.0, \"steps\": 10", "\"t_max\": 0.0, \"steps\": 1", dir.path());
    let o = run(&path, &dir.path().join("out"), &["--method", "analytic"]);
    assert!(!o.status.success());
    assert_eq!(stderr_json(&o)["error"]["field"], "times.t_max");
}

#[test]
fn parse_error_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = edited("fock_decay.json", "\"fock\"", "\"fok\"", dir.path());
    let o = run(&path, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"]["kind"], "parse");
    assert_eq!(e["error"]["line"], 6);
}

#[test]
fn guard_refusal_suggests_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let path = edited("fock_decay.json", "\"gamma\": 0.1", "\"gamma\": 1.0", dir.path());
    let o = run(&path, &dir.path().join("out"), &["--method", "analytic", "--truncation", "16"]);
    assert_eq!(o.status.code(), Some(3));
    let e = stderr_json(&o);
    assert_eq!(e["error"]["kind"], "overflow_guard");
    assert!(e["error"]["suggestion"].as_str().unwrap().contains("oracle"));
}

#[test]
fn truncation_and_method_flags_override_file() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&scenario("fock_decay.json"), out.path(), &["--truncation", "6", "--method", "analytic"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.path().join("verification.json").exists());
    let snap: Value = serde_json::from_str(&std::fs::read_to_string(out.path().join("blocks_t0.json")).unwrap())
        .unwrap();
    assert_eq!(snap["n_max"], 6);
    assert_eq!(snap["source"], "analytic");
}
