//! Flux-averaged many-body rate function of the chain with two-body
//! loss/gain.

use super::{CUSP_MEDIAN_FACTOR, CUSP_WINDOW};
use crate::config::{Engine, ExperimentConfig};
use crate::output::{RunWriter, Table};
use loschmidt::dqpt::{cusp_statistic, detect_cusps, flux_averaged_rate, FluxEngine};
use loschmidt::error::{Error, Result};
use loschmidt::models::{Dissipator, InitialFilling, Orbital, QuenchSpec};
use loschmidt::propagator::uniform_grid;
use serde_json::{json, Value};

fn io_err(e: std::io::Error) -> Error {
    Error::Numeric(format!("output failure: {e}"))
}

pub fn flux(config: &ExperimentConfig, writer: &mut RunWriter) -> Result<Value> {
    let gamma_l = config
        .model
        .gamma_l
        .ok_or_else(|| Error::domain("gamma_l is required"))?;
    let gamma_g = config.model.gamma_g;
    let mut dissipators = Vec::new();
    if gamma_l > 0.0 {
        dissipators.push(Dissipator::loss(Orbital::A, gamma_l));
    }
    if gamma_g > 0.0 {
        dissipators.push(Dissipator::gain(Orbital::A, gamma_g));
    }
    let mut quench =
        QuenchSpec::two_band(config.model.t0, config.model.t1, config.model.w, dissipators);
    quench.initial_filling = InitialFilling::HalfFilledManyBody;
    quench.validate()?;

    let engine = match config.engine.kind {
        Engine::Mcwf => FluxEngine::Mcwf {
            trajectories: config.engine.trajectories,
        },
        Engine::Nonhermitian | Engine::Exact => {
            if gamma_g > 0.0 {
                writer.warnings.push(
                    "nonhermitian flux engine ignores jump backflow; results with \
                     gamma_g > 0 are not full Liouvillian dynamics (use the mcwf engine)"
                        .to_string(),
                );
            }
            FluxEngine::NonHermitian
        }
    };

    let times = uniform_grid(config.grid.t_max, config.grid.dt);
    let result = flux_averaged_rate(
        config.model.n_cells,
        &quench,
        config.grid.flux_samples,
        &times,
        engine,
        config.seed,
    )?;
    writer.flagged_samples += result.flagged_samples;

    let mut rate_table = match &result.rate_stderr {
        Some(_) => Table::new(&["t", "G", "G_stderr"]),
        None => Table::new(&["t", "G"]),
    };
    for (ti, (t, g)) in times.iter().zip(result.rate.iter()).enumerate() {
        let mut row = vec![*t, *g];
        if let Some(se) = &result.rate_stderr {
            row.push(se[ti]);
        }
        rate_table.push(row);
    }
    writer.write_table("rate", &rate_table).map_err(io_err)?;

    let stat = cusp_statistic(&times, &result.rate)?;
    let mut stat_table = Table::new(&["t", "statistic"]);
    for (i, s) in stat.iter().enumerate() {
        stat_table.push(vec![times[i + 1], *s]);
    }
    writer.write_table("statistic", &stat_table).map_err(io_err)?;

    let report = detect_cusps(&times, &result.rate, CUSP_WINDOW, CUSP_MEDIAN_FACTOR)?;
    Ok(json!({
        "scenario": "many_body_flux",
        "n_cells": config.model.n_cells,
        "gamma_l": gamma_l,
        "gamma_g": gamma_g,
        "flux_samples": config.grid.flux_samples,
        "engine": match engine {
            FluxEngine::NonHermitian => "nonhermitian".to_string(),
            FluxEngine::Mcwf { trajectories } => format!("mcwf[{trajectories}]"),
        },
        "cusp_times": report.times,
        "cusp_count": report.times.len(),
        "threshold": report.threshold,
        "flagged": result.flagged_samples,
        "mean_jumps": result.mean_jumps,
        "aborted_trajectories": result.aborted_trajectories,
    }))
}
