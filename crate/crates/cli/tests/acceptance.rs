//! Scenario-level acceptance suite; each criterion drives the CLI binary the
//! way a user would and checks the emitted artifacts. Run with
//! `cargo test -p loschmidt-cli --test acceptance -- --nocapture`.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_loschmidt")
}

fn run_scenario(dir: &Path, args: &[&str]) -> Value {
    let out_dir = dir.to_str().unwrap();
    let status = Command::new(binary())
        .args(args)
        .args(["--out", out_dir])
        .status()
        .expect("failed to launch the CLI");
    assert!(status.success(), "scenario {args:?} exited with {status:?}");
    let summary = std::fs::read_to_string(dir.join("summary.json")).expect("summary.json");
    serde_json::from_str(&summary).expect("summary parses")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "loschmidt-acceptance-{tag}-{}",
        std::process::id()
    ));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read_csv_columns(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).expect("csv");
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("header")
        .split(',')
        .map(|s| s.to_string())
        .collect();
    let mut columns = vec![Vec::new(); header.len()];
    for line in lines {
        for (i, field) in line.split(',').enumerate() {
            columns[i].push(field.parse::<f64>().unwrap_or(f64::NAN));
        }
    }
    (header, columns)
}

fn as_f64_vec(value: &Value) -> Vec<f64> {
    value
        .as_array()
        .expect("array")
        .iter()
        .map(|v| v.as_f64().expect("number"))
        .collect()
}

/// Largest cusp statistic within ±`window` grid points of time `t0`.
fn statistic_near(dir: &Path, t0: f64, window: usize) -> f64 {
    let (_, cols) = read_csv_columns(&dir.join("statistic.csv"));
    let (ts, ss) = (&cols[0], &cols[1]);
    let mut nearest = 0usize;
    let mut best = f64::INFINITY;
    for (i, t) in ts.iter().enumerate() {
        if (t - t0).abs() < best {
            best = (t - t0).abs();
            nearest = i;
        }
    }
    let lo = nearest.saturating_sub(window);
    let hi = (nearest + window).min(ss.len() - 1);
    ss[lo..=hi].iter().cloned().fold(0.0, f64::max)
}

#[test]
fn criterion_3_smearing_of_the_rate_function() {
    // Recorded floor from the reference dense run of this configuration:
    // min g = 9.61e-4 on the refined grid; assert half of it.
    const GAIN_FLOOR: f64 = 4e-4;
    let dir = temp_dir("c3");
    let summary = run_scenario(
        &dir,
        &[
            "--scenario",
            "two_band_rate",
            "--gamma-l",
            "0.2",
            "--gamma-g",
            "0.01",
            "--k-points",
            "400",
            "--t-max",
            "4.0",
            "--dt",
            "0.005",
        ],
    );
    let series = summary["series"].as_array().unwrap();
    assert_eq!(series.len(), 2);
    let loss_only = &series[0];
    let with_gain = &series[1];
    assert_eq!(loss_only["gamma_g"].as_f64().unwrap(), 0.0);

    let min_g_loss = loss_only["min_g"]["g"].as_f64().unwrap();
    let cusps_loss = as_f64_vec(&loss_only["cusp_times"]);
    assert!(
        min_g_loss < 1e-6,
        "pure-loss refined min g = {min_g_loss:.3e}"
    );
    assert!(!cusps_loss.is_empty(), "no cusp detected in the pure-loss run");

    let min_g_gain = with_gain["min_g"]["g"].as_f64().unwrap();
    let cusps_gain = as_f64_vec(&with_gain["cusp_times"]);
    assert!(
        min_g_gain > GAIN_FLOOR,
        "gain floor violated: {min_g_gain:.3e} ≤ {GAIN_FLOOR:.1e}"
    );
    assert!(
        cusps_gain.is_empty(),
        "detector fired on the smeared series: {cusps_gain:?}"
    );
    println!(
        "[acceptance] criterion 3 (smearing): PASS (loss: {} cusps, min g {min_g_loss:.1e}; \
         gain: 0 cusps, min g {min_g_gain:.1e} > {GAIN_FLOOR:.0e})",
        cusps_loss.len()
    );
}

#[test]
fn criterion_5_crossover_scaling() {
    let dir = temp_dir("c5");
    let summary = run_scenario(
        &dir,
        &[
            "--scenario",
            "two_band_crossover",
            "--gamma-l",
            "0.2",
            "--k0",
            "1.0",
            "--dt",
            "0.01",
        ],
    );
    let slope_err = summary["slope_rel_err"].as_f64().unwrap();
    assert!(
        slope_err <= 0.10,
        "t* vs ln γ_g slope off by {:.1}%",
        slope_err * 100.0
    );
    let late_err = summary["late_slope_rel_err"].as_f64().unwrap();
    assert!(
        late_err <= 0.05,
        "long-time slope difference off by {:.1}%",
        late_err * 100.0
    );
    println!(
        "[acceptance] criterion 5 (crossover scaling at k = 1): PASS \
         (slope err {:.1}%, late-slope err {:.1}%)",
        slope_err * 100.0,
        late_err * 100.0
    );
}

#[test]
fn criteria_6_and_7_fisher_zeros_vs_cusps() {
    // Fine momentum grid for the crossing curves; the rate run uses 800
    // momenta and dt = 0.01 so that two grid steps cover the intrinsic
    // smearing width of the late, nearly axis-parallel zero curves.
    let fisher_dir = temp_dir("c6-fisher");
    let fisher = run_scenario(
        &fisher_dir,
        &[
            "--scenario",
            "hk_fisher",
            "--hk-gamma-gain",
            "0.5",
            "--k-points",
            "3000",
        ],
    );
    let max_residual = fisher["max_residual"].as_f64().unwrap();
    assert!(max_residual <= 1e-8, "back-substitution residual {max_residual:.2e}");
    let crossings: Vec<f64> = as_f64_vec(&fisher["crossings"])
        .into_iter()
        .filter(|t| *t <= 8.5)
        .collect();
    assert!(crossings.len() >= 4, "crossings: {crossings:?}");

    let dt = 0.01;
    let rate_dir = temp_dir("c6-rate");
    let rate = run_scenario(
        &rate_dir,
        &[
            "--scenario",
            "hk_rate",
            "--u",
            "80",
            "--hk-gamma-gain",
            "0.5",
            "--k-points",
            "800",
            "--t-max",
            "8.0",
            "--dt",
            "0.01",
        ],
    );
    let cusps = as_f64_vec(&rate["series"][0]["cusp_times"]);
    assert!(cusps.len() >= 3, "cusps detected: {cusps:?}");
    let mut worst = 0.0_f64;
    for c in &cusps {
        let d = crossings
            .iter()
            .map(|x| (c - x).abs())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
        assert!(
            d <= 2.0 * dt + 1e-12,
            "cusp at {c} is {d:.4} from the nearest crossing (> 2Δt = {})",
            2.0 * dt
        );
    }
    println!(
        "[acceptance] criterion 6 (Fisher zeros vs cusps): PASS \
         ({} cusps within 2Δt of crossings, worst {:.4}, residual {max_residual:.1e})",
        cusps.len(),
        worst
    );

    // Criterion 7: adding γ↑_l = 1/200 removes every detected cusp.
    let loss_dir = temp_dir("c7");
    let smeared = run_scenario(
        &loss_dir,
        &[
            "--scenario",
            "hk_rate",
            "--u",
            "80",
            "--hk-gamma-gain",
            "0.5",
            "--hk-gamma-loss",
            "0.005",
            "--k-points",
            "800",
            "--t-max",
            "8.0",
            "--dt",
            "0.01",
        ],
    );
    let series = smeared["series"].as_array().unwrap();
    let with_loss = series
        .iter()
        .find(|s| s["label"] == "with_loss")
        .expect("with_loss series");
    let cusps_loss = as_f64_vec(&with_loss["cusp_times"]);
    assert!(
        cusps_loss.is_empty(),
        "cusps survived the loss admixture: {cusps_loss:?}"
    );
    println!(
        "[acceptance] criterion 7 (loss admixture removes cusps): PASS (0 detections)"
    );
}

#[test]
fn criterion_9_many_body_flux_average() {
    // Reduced preset: N = 5 cells, 150 flux samples, M = 200 trajectories.
    // Reference drop factor of the cusp statistic recorded from the seeded
    // run: 3.96×; assert half of it.
    const MIN_DROP: f64 = 2.0;
    let loss_dir = temp_dir("c9-loss");
    let loss = run_scenario(
        &loss_dir,
        &[
            "--scenario",
            "many_body_flux",
            "--n-cells",
            "5",
            "--gamma-l",
            "0.4",
            "--gamma-g",
            "0",
            "--flux-samples",
            "150",
            "--t-max",
            "5.0",
            "--dt",
            "0.005",
            "--engine",
            "nonhermitian",
        ],
    );
    let cusps = as_f64_vec(&loss["cusp_times"]);
    assert!(!cusps.is_empty(), "no cusp in the loss-only flux average");
    let t_c = cusps[0];
    let stat_loss = statistic_near(&loss_dir, t_c, 5);

    let gain_dir = temp_dir("c9-gain");
    let gain = run_scenario(
        &gain_dir,
        &[
            "--scenario",
            "many_body_flux",
            "--n-cells",
            "5",
            "--gamma-l",
            "0.4",
            "--gamma-g",
            "0.004",
            "--flux-samples",
            "150",
            "--t-max",
            "5.0",
            "--dt",
            "0.005",
            "--engine",
            "mcwf",
            "--trajectories",
            "200",
            "--seed",
            "11",
        ],
    );
    assert_eq!(gain["aborted_trajectories"].as_i64().unwrap(), 0);
    let stat_gain = statistic_near(&gain_dir, t_c, 5);
    let drop = stat_loss / stat_gain;
    assert!(
        drop >= MIN_DROP,
        "cusp statistic dropped only {drop:.2}× (loss {stat_loss:.4}, gain {stat_gain:.4})"
    );
    println!(
        "[acceptance] criterion 9 (many-body flux average, reduced preset): PASS \
         (cusp at t = {t_c:.3}, statistic drop {drop:.2}×)"
    );
}
