use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn eta(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eta"))
        .args(args)
        .current_dir(dir)
        .env_remove("ETA_HOME")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// A temp dir holding a freshly derived eta.json.
fn derived() -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let out = eta(dir.path(), &["derive-eta", "--out", "eta.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let path = dir.path().join("eta.json");
    (dir, path)
}

#[test]
fn derive_eta_reports_target() {
    let (_dir, path) = derived();
    let doc = read_json(&path);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["manifest"]["command"], "derive-eta");
    let p = doc["report"]["p_gagb"].as_f64().unwrap();
    assert!((p - 9.0 / 112.0).abs() <= 1e-9);
    assert_eq!(doc["report"]["nullspace_dimension"], 1);
}

#[test]
fn derive_eta_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&eta(dir.path(), &["derive-eta", "--out", "a.json"])), 0);
    assert_eq!(code(&eta(dir.path(), &["derive-eta", "--out", "b.json"])), 0);
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    // The manifests differ only in the recorded output path.
    let strip = |v: Vec<u8>| String::from_utf8(v).unwrap().replace("a.json", "").replace("b.json", "");
    assert_eq!(strip(a), strip(b));
}

#[test]
fn derive_eta_with_tiny_tolerance_finds_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = eta(dir.path(), &["derive-eta", "--tol", "1e-30"]);
    assert_eq!(code(&out), 1);
    assert!(!dir.path().join("eta.json").exists());
}

#[test]
fn default_output_goes_to_eta_home() {
    let dir = tempfile::tempdir().unwrap();
    let home = dir.path().join("home");
    std::fs::create_dir(&home).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_eta"))
        .arg("derive-eta")
        .current_dir(dir.path())
        .env("ETA_HOME", &home)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(home.join("eta.json").exists());
}

#[test]
fn timestamps_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&eta(dir.path(), &["derive-eta"])), 0);
    assert!(read_json(&dir.path().join("eta.json"))["manifest"].get("timestamps").map_or(true, Value::is_null));
    assert_eq!(code(&eta(dir.path(), &["--timestamps", "derive-eta"])), 0);
    assert!(read_json(&dir.path().join("eta.json"))["manifest"]["timestamps"].is_object());
}

#[test]
fn verify_passes_on_derived_state() {
    let (dir, path) = derived();
    let out = eta(dir.path(), &["verify", "--eta", path.to_str().unwrap(), "--rotations", "100", "--seed", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let doc = read_json(&dir.path().join("certification.json"));
    assert_eq!(doc["report"]["certification"]["pass"], true);
    assert_eq!(doc["report"]["certification"]["records"].as_array().unwrap().len(), 101);
}

#[test]
fn verify_with_no_rotations_checks_aligned_only() {
    let (dir, path) = derived();
    let out = eta(dir.path(), &["verify", "--eta", path.to_str().unwrap(), "--rotations", "0"]);
    assert_eq!(code(&out), 0);
    let doc = read_json(&dir.path().join("certification.json"));
    assert_eq!(doc["report"]["certification"]["records"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_rejects_unnormalized_state() {
    let (dir, path) = derived();
    let mut doc = read_json(&path);
    let amps = doc["report"]["amplitudes"].as_array_mut().unwrap();
    let size = |a: &Value| a[0].as_f64().unwrap().abs();
    let idx = (0..amps.len()).max_by(|&i, &j| size(&amps[i]).total_cmp(&size(&amps[j]))).unwrap();
    amps[idx][0] = Value::from(amps[idx][0].as_f64().unwrap() * 2.0);
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(code(&eta(dir.path(), &["verify", "--eta", path.to_str().unwrap()])), 65);
}

#[test]
fn verify_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    assert_eq!(code(&eta(dir.path(), &["verify", "--eta", "bad.json"])), 65);
}

#[test]
fn verify_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&eta(dir.path(), &["verify", "--eta", "nope.json"])), 66);
}

#[test]
fn malformed_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&eta(dir.path(), &["verify", "--eta", "x.json", "--rotations", "lots"])), 64);
    assert_eq!(code(&eta(dir.path(), &["frobnicate"])), 64);
    assert_eq!(code(&eta(dir.path(), &["lhv-check", "--flip-entry", "Q:0011"])), 64);
}

#[test]
fn lhv_check_finds_contradiction() {
    let dir = tempfile::tempdir().unwrap();
    let out = eta(dir.path(), &["lhv-check"]);
    assert_eq!(code(&out), 0);
    let doc = read_json(&dir.path().join("lhv.json"));
    let cert = &doc["report"]["certificate"];
    assert_eq!(cert["n_strategies"], 65536);
    assert_eq!(cert["n_satisfying_all_zero_constraints_with_gg"], 0);
    assert_eq!(doc["report"]["lhv_bound"]["max_gg"].as_f64(), Some(0.0));
}

#[test]
fn lhv_check_with_mutation_finds_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = eta(dir.path(), &["lhv-check", "--flip-entry", "G:0011"]);
    assert_eq!(code(&out), 1);
    let doc = read_json(&dir.path().join("lhv.json"));
    assert!(!doc["report"]["certificate"]["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn sample_million_shots_passes() {
    let (dir, path) = derived();
    let out = eta(
        dir.path(),
        &["sample", "--eta", path.to_str().unwrap(), "--shots", "1000000", "--policy", "fresh-per-block", "--block", "1000"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let doc = read_json(&dir.path().join("estimates.json"));
    assert_eq!(doc["report"]["zero_cell_hits"], 0);
    assert_eq!(doc["report"]["pass"], true);
}

#[test]
fn sample_single_shot_warns() {
    let (dir, path) = derived();
    let out = eta(dir.path(), &["sample", "--eta", path.to_str().unwrap(), "--shots", "1"]);
    assert_eq!(code(&out), 0);
    let doc = read_json(&dir.path().join("estimates.json"));
    assert!(!doc["report"]["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn sample_rejects_zero_shots() {
    let (dir, path) = derived();
    assert_eq!(code(&eta(dir.path(), &["sample", "--eta", path.to_str().unwrap(), "--shots", "0"])), 64);
}

#[test]
fn sample_writes_event_log() {
    let (dir, path) = derived();
    let out = eta(dir.path(), &["sample", "--eta", path.to_str().unwrap(), "--shots", "10", "--events", "events.csv"]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_path(dir.path().join("events.csv")).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["block", "setting_pair", "outcome_a", "outcome_b"]);
    assert_eq!(reader.records().count(), 40);
}

#[test]
fn sample_policies_agree() {
    let (dir, path) = derived();
    let mut estimates = Vec::new();
    for policy in ["identity", "fixed-random"] {
        let out_file = format!("{policy}.json");
        let out = eta(
            dir.path(),
            &["sample", "--eta", path.to_str().unwrap(), "--shots", "200000", "--policy", policy, "--out", &out_file],
        );
        assert_eq!(code(&out), 0);
        let doc = read_json(&dir.path().join(&out_file));
        let q = doc["report"]["quantities"]
            .as_array()
            .unwrap()
            .iter()
            .find(|q| q["name"] == "P(G_A=1,G_B=1)")
            .unwrap()
            .clone();
        estimates.push((q["estimate"].as_f64().unwrap(), q["std_error"].as_f64().unwrap()));
    }
    let (a, b) = (estimates[0], estimates[1]);
    assert!((a.0 - b.0).abs() / (a.1.powi(2) + b.1.powi(2)).sqrt() <= 4.0);
}

#[test]
fn unwritable_output() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("occupied"), "").unwrap();
    let out = eta(dir.path(), &["derive-eta", "--out", "occupied/eta.json"]);
    assert_eq!(code(&out), 73);
}
