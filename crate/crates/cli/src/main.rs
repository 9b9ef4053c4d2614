//! Experiment runner. Scenarios mirror the reference experiments one-to-one
//! and emit data files plus a manifest sufficient to reproduce the run.
//!
//! Exit codes: 0 success, 2 validation failure, 3 numeric failure,
//! 4 capacity exceeded.

mod config;
mod output;
mod scenarios;

use clap::Parser;
use config::{validate, Engine, ExperimentConfig, OutputFormat, Scenario};
use output::RunWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(
    name = "loschmidt",
    version,
    about = "Open-system DQPT experiment runner"
)]
struct Cli {
    /// TOML configuration file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Scenario to run.
    #[arg(long, value_enum)]
    scenario: Option<Scenario>,

    /// Random seed for stochastic engines.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Data-file format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,

    /// Worker threads (0 = library default).
    #[arg(long)]
    threads: Option<usize>,

    /// Loss strength γ_l (required by the two-band scenarios).
    #[arg(long, allow_negative_numbers = true)]
    gamma_l: Option<f64>,

    /// Gain strength γ_g.
    #[arg(long, allow_negative_numbers = true)]
    gamma_g: Option<f64>,

    /// Unit cells of the many-body chain.
    #[arg(long)]
    n_cells: Option<usize>,

    /// Time step.
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,

    /// Time horizon.
    #[arg(long, allow_negative_numbers = true)]
    t_max: Option<f64>,

    /// Momentum grid size.
    #[arg(long)]
    k_points: Option<usize>,

    /// Flux samples for the many-body scenario.
    #[arg(long)]
    flux_samples: Option<usize>,

    /// Trajectories per ensemble (MCWF engine).
    #[arg(long)]
    trajectories: Option<usize>,

    /// Evolution engine.
    #[arg(long, value_enum)]
    engine: Option<Engine>,

    /// Pre-quench band offset t₀.
    #[arg(long, allow_negative_numbers = true)]
    t0: Option<f64>,

    /// Post-quench band offset t₁.
    #[arg(long, allow_negative_numbers = true)]
    t1: Option<f64>,

    /// Hopping strength w.
    #[arg(long, allow_negative_numbers = true)]
    w: Option<f64>,

    /// Interaction strength U.
    #[arg(long, allow_negative_numbers = true)]
    u: Option<f64>,

    /// Reference momentum k₀ (crossover / spectrum / backflow scenarios).
    #[arg(long, allow_negative_numbers = true)]
    k0: Option<f64>,

    /// Cutoff Δ of the toy-cusp scenario.
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,

    /// Spin-↑ gain strength of the interacting-model scenarios.
    #[arg(long, allow_negative_numbers = true)]
    hk_gamma_gain: Option<f64>,

    /// Spin-↑ loss strength of the interacting-model scenarios.
    #[arg(long, allow_negative_numbers = true)]
    hk_gamma_loss: Option<f64>,
}

fn apply_overrides(cfg: &mut ExperimentConfig, cli: &Cli) {
    if let Some(s) = cli.scenario {
        cfg.scenario = Some(s);
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(ref v) = cli.out {
        cfg.output.dir = v.display().to_string();
    }
    if let Some(v) = cli.format {
        cfg.output.format = v;
    }
    if let Some(v) = cli.threads {
        cfg.threads = v;
    }
    if let Some(v) = cli.gamma_l {
        cfg.model.gamma_l = Some(v);
    }
    if let Some(v) = cli.gamma_g {
        cfg.model.gamma_g = v;
    }
    if let Some(v) = cli.n_cells {
        cfg.model.n_cells = v;
    }
    if let Some(v) = cli.dt {
        cfg.grid.dt = v;
    }
    if let Some(v) = cli.t_max {
        cfg.grid.t_max = v;
    }
    if let Some(v) = cli.k_points {
        cfg.grid.k_points = v;
    }
    if let Some(v) = cli.flux_samples {
        cfg.grid.flux_samples = v;
    }
    if let Some(v) = cli.trajectories {
        cfg.engine.trajectories = v;
    }
    if let Some(v) = cli.engine {
        cfg.engine.kind = v;
    }
    if let Some(v) = cli.t0 {
        cfg.model.t0 = v;
    }
    if let Some(v) = cli.t1 {
        cfg.model.t1 = v;
    }
    if let Some(v) = cli.w {
        cfg.model.w = v;
    }
    if let Some(v) = cli.u {
        cfg.model.u = v;
    }
    if let Some(v) = cli.k0 {
        cfg.scan.k0 = v;
    }
    if let Some(v) = cli.delta {
        cfg.scan.delta = v;
    }
    if let Some(v) = cli.hk_gamma_gain {
        cfg.scan.hk_gamma_gain = v;
    }
    if let Some(v) = cli.hk_gamma_loss {
        cfg.scan.hk_gamma_loss = v;
    }
}

fn run() -> Result<(), (u8, String)> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| (2, format!("cannot read config {}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| (2, format!("config parse error: {e}")))?
        }
        None => ExperimentConfig::default(),
    };
    apply_overrides(&mut cfg, &cli);

    let violations = validate(&cfg);
    if !violations.is_empty() {
        let capacity = violations.iter().any(|v| v.capacity);
        let msg = violations
            .iter()
            .map(|v| format!("  {}: {}", v.field, v.constraint))
            .collect::<Vec<_>>()
            .join("\n");
        return Err((
            if capacity { 4 } else { 2 },
            format!("configuration invalid:\n{msg}"),
        ));
    }

    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .stack_size(16 * 1024 * 1024)
            .build_global()
            .map_err(|e| (3, format!("thread pool setup failed: {e}")))?;
    }

    let started = Instant::now();
    let out_dir = PathBuf::from(&cfg.output.dir);
    let mut writer = RunWriter::new(&out_dir, cfg.output.format)
        .map_err(|e| (3, format!("cannot create output directory: {e}")))?;

    let scenario = cfg.scenario.expect("validated");
    eprintln!("running scenario {} (seed {})", scenario.name(), cfg.seed);
    match scenarios::run(&cfg, &mut writer) {
        Ok(_) => {}
        Err(err) => {
            let code = match err {
                loschmidt::Error::Capacity(_) => 4,
                loschmidt::Error::Domain(_)
                | loschmidt::Error::Dimension(_)
                | loschmidt::Error::UnsupportedModel(_) => 2,
                loschmidt::Error::Numeric(_) => 3,
            };
            return Err((code, format!("scenario {} failed: {err}", scenario.name())));
        }
    }
    let wall = started.elapsed().as_secs_f64();
    writer
        .write_manifest(&cfg, wall)
        .map_err(|e| (3, format!("cannot write manifest: {e}")))?;
    eprintln!(
        "done in {wall:.1}s; artifacts in {}",
        out_dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
