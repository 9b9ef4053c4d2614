//! CLI contract tests: validation exit codes, config/flag layering,
//! reproducible artifacts, and manifest contents.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_loschmidt")
}

fn run(args: &[&str]) -> Output {
    Command::new(binary()).args(args).output().expect("launch")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("loschmidt-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn negative_gain_fails_validation_with_exit_2() {
    let out = run(&[
        "--scenario",
        "two_band_rate",
        "--gamma-l",
        "0.2",
        "--gamma-g",
        "-0.1",
        "--out",
        "/tmp/unused",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("nonnegative"), "stderr: {err}");
}

#[test]
fn missing_gamma_l_fails_validation() {
    let out = run(&["--scenario", "two_band_rate", "--out", "/tmp/unused"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("gamma_l"), "stderr: {err}");
}

#[test]
fn oversized_chain_fails_with_capacity_exit_4() {
    let out = run(&[
        "--scenario",
        "many_body_flux",
        "--gamma-l",
        "0.4",
        "--n-cells",
        "12",
        "--out",
        "/tmp/unused",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = temp_dir("config");
    let config_path = dir.join("run.toml");
    std::fs::write(
        &config_path,
        r#"
scenario = "toy_cusp"
seed = 9

[grid]
t_max = 0.5
dt = 0.01

[scan]
delta = 2.0

[output]
dir = "unused"
"#,
    )
    .unwrap();
    let out_dir = dir.join("out");
    // The --delta flag must win over the file value.
    let out = run(&[
        "--config",
        config_path.to_str().unwrap(),
        "--delta",
        "1.0",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["resolved_config"]["scan"]["delta"], 1.0);
    assert_eq!(manifest["scenario"], "toy_cusp");
    assert!(manifest["library_version"].is_string());
    assert!(manifest["wall_time_s"].is_number());
    let files: Vec<String> = manifest["data_files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert!(files.contains(&"toy.csv".to_string()));
    assert!(files.contains(&"summary.json".to_string()));
}

#[test]
fn identical_seed_and_config_give_byte_identical_data() {
    let args = |out: &str| {
        vec![
            "--scenario".to_string(),
            "many_body_flux".to_string(),
            "--n-cells".to_string(),
            "2".to_string(),
            "--gamma-l".to_string(),
            "0.4".to_string(),
            "--gamma-g".to_string(),
            "0.04".to_string(),
            "--flux-samples".to_string(),
            "3".to_string(),
            "--t-max".to_string(),
            "1.0".to_string(),
            "--dt".to_string(),
            "0.01".to_string(),
            "--engine".to_string(),
            "mcwf".to_string(),
            "--trajectories".to_string(),
            "50".to_string(),
            "--seed".to_string(),
            "21".to_string(),
            "--out".to_string(),
            out.to_string(),
        ]
    };
    let d1 = temp_dir("repro1");
    let d2 = temp_dir("repro2");
    for d in [&d1, &d2] {
        let out = Command::new(binary())
            .args(args(d.to_str().unwrap()))
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    for file in ["rate.csv", "statistic.csv", "summary.json"] {
        let a = std::fs::read(d1.join(file)).unwrap();
        let b = std::fs::read(d2.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn json_format_emits_json_tables() {
    let dir = temp_dir("json");
    let out = run(&[
        "--scenario",
        "toy_cusp",
        "--delta",
        "1.0",
        "--t-max",
        "0.2",
        "--dt",
        "0.05",
        "--format",
        "json",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let table: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("toy.json")).unwrap()).unwrap();
    assert_eq!(table["columns"][0], "tau");
    assert!(table["rows"].as_array().unwrap().len() >= 9);
}

#[test]
fn backflow_scenario_reports_positive_coefficient() {
    let dir = temp_dir("backflow");
    let out = run(&[
        "--scenario",
        "backflow_check",
        "--gamma-l",
        "1.0",
        "--k0",
        "1.0",
        "--t-max",
        "2.0",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert!(summary["min_backflow_re"].as_f64().unwrap() >= -1e-8);
    assert_eq!(summary["vanishing_criterion"], false);
}
