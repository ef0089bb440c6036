//! Command-line behavior that needs no MNIST data.

use std::path::Path;
use std::process::{Command, Output};

fn thermonet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermonet"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn compare_models_prints_and_records_odds() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.json", r#"{"f": -10.0, "f_std": 0.3, "log_volume": 5.0, "dataset": "D50-seed1"}"#);
    write(dir.path(), "b.json", r#"{"f": -8.0, "f_std": 0.4, "log_volume": 4.0, "dataset": "D50-seed1"}"#);
    let out = thermonet(
        &["compare-models", "--a", "a.json", "--b", "b.json", "--log-prior-ratio", "-0.5", "--out", "cmp.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // log evidences 5 and 4, prior ratio -0.5
    assert_eq!(v["log_odds"], 0.5);
    assert!((v["std_error"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let saved: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("cmp.json")).unwrap()).unwrap();
    assert_eq!(saved, v);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("cmp.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "compare-models");
}

#[test]
fn compare_models_refuses_different_datasets() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.json", r#"{"f": 1.0, "log_volume": 0.0, "dataset": "D50-seed1"}"#);
    write(dir.path(), "b.json", r#"{"f": 1.0, "log_volume": 0.0, "dataset": "D50-seed2"}"#);
    let out = thermonet(&["compare-models", "--a", "a.json", "--b", "b.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("D50-seed2"));
}

#[test]
fn show_config_applies_presets_files_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "cfg.json", r#"{"remd": {"sweeps": 77}}"#);
    let out = thermonet(
        &["--preset", "fig2-smoke", "--config", "cfg.json", "--set", "remd.steps=7", "show-config"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["remd"]["n_t"], 8);
    assert_eq!(v["remd"]["sweeps"], 77);
    assert_eq!(v["remd"]["steps"], 7);
}

#[test]
fn configuration_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["--preset", "nope", "show-config"][..],
        &["--set", "remd.n_t=0", "show-config"][..],
        &["--set", "remd.unknown=1", "show-config"][..],
        &["--set", "data.size=55", "show-config"][..],
    ] {
        let out = thermonet(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn missing_input_files_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = thermonet(&["compare-models", "--a", "none.json", "--b", "none.json"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("none.json"));
}
