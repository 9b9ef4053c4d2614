//! Experiment configuration: TOML file plus flag overrides, validation, and
//! the scenario catalog.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum Scenario {
    TwoBandRate,
    TwoBandCrossover,
    LiouvillianSpectrum,
    BackflowCheck,
    HkFisher,
    HkRate,
    ManyBodyFlux,
    ToyCusp,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::TwoBandRate => "two_band_rate",
            Scenario::TwoBandCrossover => "two_band_crossover",
            Scenario::LiouvillianSpectrum => "liouvillian_spectrum",
            Scenario::BackflowCheck => "backflow_check",
            Scenario::HkFisher => "hk_fisher",
            Scenario::HkRate => "hk_rate",
            Scenario::ManyBodyFlux => "many_body_flux",
            Scenario::ToyCusp => "toy_cusp",
        }
    }

    fn needs_gamma_l(&self) -> bool {
        matches!(
            self,
            Scenario::TwoBandRate
                | Scenario::TwoBandCrossover
                | Scenario::LiouvillianSpectrum
                | Scenario::BackflowCheck
                | Scenario::ManyBodyFlux
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum Engine {
    Exact,
    Nonhermitian,
    Mcwf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub t0: f64,
    pub t1: f64,
    pub w: f64,
    /// Loss strength; no default for the scenarios that need it.
    pub gamma_l: Option<f64>,
    pub gamma_g: f64,
    pub u: f64,
    pub n_cells: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            t0: 0.5,
            t1: 1.5,
            w: 1.0,
            gamma_l: None,
            gamma_g: 0.0,
            u: 80.0,
            n_cells: 5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub k_points: usize,
    pub t_max: f64,
    pub dt: f64,
    pub flux_samples: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            k_points: 400,
            t_max: 4.0,
            dt: 0.005,
            flux_samples: 150,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub kind: Engine,
    pub trajectories: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            kind: Engine::Nonhermitian,
            trajectories: 1000,
        }
    }
}

/// Scenario-specific knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// Gain strengths swept by `two_band_crossover`.
    pub gamma_g_values: Vec<f64>,
    /// Reference momentum for `two_band_crossover` / `liouvillian_spectrum`.
    pub k0: f64,
    /// Fisher-zero branch range (inclusive).
    pub branch_min: i32,
    pub branch_max: i32,
    /// Cutoff Δ for `toy_cusp`.
    pub delta: f64,
    /// Loss strength on the spin-↑ channel for `hk_rate` (0 = gain only).
    pub hk_gamma_loss: f64,
    /// Gain strength on the spin-↑ channel for HK scenarios.
    pub hk_gamma_gain: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            gamma_g_values: vec![1e-2, 1e-3, 1e-4, 1e-5],
            k0: 1.0,
            branch_min: -2,
            branch_max: 8,
            delta: 1.0,
            hk_gamma_loss: 0.0,
            hk_gamma_gain: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: "out".to_string(),
            format: OutputFormat::Csv,
        }
    }
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Option<Scenario>,
    pub seed: u64,
    pub threads: usize,
    pub model: ModelConfig,
    pub grid: GridConfig,
    pub engine: EngineConfig,
    pub scan: ScanConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: None,
            seed: 1,
            threads: 0,
            model: ModelConfig::default(),
            grid: GridConfig::default(),
            engine: EngineConfig::default(),
            scan: ScanConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

/// One validation failure: the offending field and the violated constraint.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub field: String,
    pub constraint: String,
    pub capacity: bool,
}

impl Violation {
    fn new(field: &str, constraint: &str) -> Self {
        Violation {
            field: field.to_string(),
            constraint: constraint.to_string(),
            capacity: false,
        }
    }
    fn capacity(field: &str, constraint: &str) -> Self {
        Violation {
            field: field.to_string(),
            constraint: constraint.to_string(),
            capacity: true,
        }
    }
}

pub const MAX_CELLS: usize = 8;

/// Checks the configuration; an empty list means runnable. Never panics.
pub fn validate(config: &ExperimentConfig) -> Vec<Violation> {
    let mut v = Vec::new();
    let Some(scenario) = config.scenario else {
        v.push(Violation::new("scenario", "a scenario must be selected"));
        return v;
    };
    if let Some(gl) = config.model.gamma_l {
        if gl < 0.0 {
            v.push(Violation::new("model.gamma_l", "loss strength must be nonnegative"));
        }
    } else if scenario.needs_gamma_l() {
        v.push(Violation::new(
            "model.gamma_l",
            "gamma_l is required for this scenario and has no default",
        ));
    }
    if config.model.gamma_g < 0.0 {
        v.push(Violation::new("model.gamma_g", "gain strength must be nonnegative"));
    }
    if config.scan.hk_gamma_gain < 0.0 {
        v.push(Violation::new("scan.hk_gamma_gain", "gain strength must be nonnegative"));
    }
    if config.scan.hk_gamma_loss < 0.0 {
        v.push(Violation::new("scan.hk_gamma_loss", "loss strength must be nonnegative"));
    }
    if config.model.u < 0.0 {
        v.push(Violation::new("model.u", "interaction strength must be nonnegative"));
    }
    if config.grid.dt <= 0.0 {
        v.push(Violation::new("grid.dt", "time step must be positive"));
    }
    if config.grid.t_max <= 0.0 {
        v.push(Violation::new("grid.t_max", "time horizon must be positive"));
    }
    if config.grid.k_points == 0 {
        v.push(Violation::new("grid.k_points", "momentum grid must be nonempty"));
    }
    if config.grid.flux_samples == 0 {
        v.push(Violation::new("grid.flux_samples", "flux grid must be nonempty"));
    }
    if scenario == Scenario::ManyBodyFlux {
        if config.model.n_cells == 0 {
            v.push(Violation::new("model.n_cells", "need at least one unit cell"));
        } else if config.model.n_cells > MAX_CELLS {
            v.push(Violation::capacity(
                "model.n_cells",
                &format!("at most {MAX_CELLS} unit cells are supported"),
            ));
        }
        if config.engine.kind == Engine::Mcwf && config.engine.trajectories == 0 {
            v.push(Violation::new("engine.trajectories", "need at least one trajectory"));
        }
    }
    if scenario == Scenario::TwoBandCrossover {
        if config.scan.gamma_g_values.is_empty() {
            v.push(Violation::new("scan.gamma_g_values", "need at least one gain strength"));
        }
        for g in &config.scan.gamma_g_values {
            if *g < 0.0 {
                v.push(Violation::new("scan.gamma_g_values", "gain strengths must be nonnegative"));
                break;
            }
        }
    }
    if scenario == Scenario::ToyCusp && config.scan.delta <= 0.0 {
        v.push(Violation::new("scan.delta", "cutoff must be positive"));
    }
    if scenario == Scenario::HkFisher && config.scan.branch_min > config.scan.branch_max {
        v.push(Violation::new("scan.branch_min", "branch range is empty"));
    }
    v
}
