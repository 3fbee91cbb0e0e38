//! End-to-end checks of the binary: exit codes, artifacts, determinism.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_metriclat"))
}

fn read_json(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    serde_json::from_str(&text).unwrap()
}

#[test]
fn riesz_run_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["riesz", "--dim", "12", "--seed", "7"])
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let doc = read_json(&dir.path().join("riesz/result.json"));
    assert_eq!(doc["schema"], "metriclat/1");
    assert_eq!(doc["seed"], 7);
    assert_eq!(doc["passed"], true);
    assert!(doc["checks"].as_array().unwrap().len() >= 5);
}

#[test]
fn identical_invocations_differ_only_in_timestamp() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let status = bin()
            .args(["similarity", "--trials", "3", "--dim", "6", "--seed", "11"])
            .arg("--out")
            .arg(d.path())
            .status()
            .unwrap();
        assert!(status.success());
    }
    let mut a = read_json(&d1.path().join("similarity/result.json"));
    let mut b = read_json(&d2.path().join("similarity/result.json"));
    for doc in [&mut a, &mut b] {
        let obj = doc.as_object_mut().unwrap();
        obj.remove("timestamp");
        // the out paths differ by tempdir; normalize
        obj.get_mut("params")
            .unwrap()
            .as_object_mut()
            .unwrap()
            .remove("out");
    }
    assert_eq!(a, b);
}

#[test]
fn usage_errors_exit_two() {
    let status = bin().args(["scenario", "no-such-model"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = bin().args(["klmn", "--example", "bogus"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn failed_checks_exit_one() {
    // equal truncations cannot show cross growth
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["lattice", "--truncations", "32,32"])
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let doc = read_json(&dir.path().join("lattice/result.json"));
    assert_eq!(doc["passed"], false);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "dim = 8\nseed = 3\n").unwrap();
    let status = bin()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .arg("riesz")
        .status()
        .unwrap();
    assert!(status.success());
    let doc = read_json(&dir.path().join("riesz/result.json"));
    assert_eq!(doc["params"]["dim"], 8);
    assert_eq!(doc["seed"], 3);
}

#[test]
fn riesz_imports_t_and_alpha_from_files() {
    let dir = tempfile::tempdir().unwrap();
    // diagonal T in the matrix text format
    let t_path = dir.path().join("t.mat");
    std::fs::write(&t_path, "2\n2+0i 0+0i\n0+0i 0.5+0i\n").unwrap();
    let a_path = dir.path().join("alpha.csv");
    std::fs::write(&a_path, "1, 0.25\n").unwrap();
    let status = bin()
        .arg("riesz")
        .arg("--t-file")
        .arg(&t_path)
        .arg("--alpha-file")
        .arg(&a_path)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let doc = read_json(&dir.path().join("riesz/result.json"));
    assert_eq!(doc["params"]["effective_dim"], 2);
    assert_eq!(doc["passed"], true);
}

#[test]
fn scenario_artifacts_are_emitted() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["scenario", "shifted-oscillator", "--n", "32", "--alpha", "0.25"])
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let base = dir.path().join("scenario-shifted-oscillator");
    assert!(base.join("result.json").exists());
    let csv = std::fs::read_to_string(base.join("spectra.csv")).unwrap();
    assert!(csv.starts_with("index,re,im,residual"));
    assert_eq!(csv.lines().count(), 33); // header + 32 modes
}
