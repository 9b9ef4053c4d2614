//! Scenario catalog: one runner per reference experiment, emitting data
//! files plus a machine-readable summary.

mod hk;
mod many_body;
mod toy;
mod two_band;

use crate::config::{ExperimentConfig, Scenario};
use crate::output::RunWriter;
use loschmidt::error::{Error, Result};
use loschmidt::models::{Dissipator, Orbital, QuenchSpec};
use serde_json::Value;

/// Cusp-detector settings fixed across all scenarios (calibrated on the
/// synthetic |t − 1| kink).
pub const CUSP_WINDOW: usize = 5;
pub const CUSP_MEDIAN_FACTOR: f64 = 10.0;

/// Builds the two-band quench from the model block. `gamma_g` overrides the
/// configured gain strength (used for series sweeps).
pub fn two_band_quench(config: &ExperimentConfig, gamma_g: f64) -> Result<QuenchSpec> {
    let gamma_l = config
        .model
        .gamma_l
        .ok_or_else(|| Error::domain("gamma_l is required"))?;
    let mut dissipators = vec![Dissipator::loss(Orbital::A, gamma_l)];
    if gamma_g > 0.0 {
        dissipators.push(Dissipator::gain(Orbital::A, gamma_g));
    }
    let q = QuenchSpec::two_band(config.model.t0, config.model.t1, config.model.w, dissipators);
    q.validate()?;
    Ok(q)
}

/// Runs the selected scenario, writing data files and the summary through
/// `writer`. Returns the summary value for logging.
pub fn run(config: &ExperimentConfig, writer: &mut RunWriter) -> Result<Value> {
    let scenario = config
        .scenario
        .ok_or_else(|| Error::domain("no scenario selected"))?;
    let summary = match scenario {
        Scenario::TwoBandRate => two_band::rate(config, writer)?,
        Scenario::TwoBandCrossover => two_band::crossover(config, writer)?,
        Scenario::LiouvillianSpectrum => two_band::spectrum(config, writer)?,
        Scenario::BackflowCheck => two_band::backflow(config, writer)?,
        Scenario::HkFisher => hk::fisher(config, writer)?,
        Scenario::HkRate => hk::rate(config, writer)?,
        Scenario::ManyBodyFlux => many_body::flux(config, writer)?,
        Scenario::ToyCusp => toy::cusp(config, writer)?,
    };
    writer
        .write_summary(&summary)
        .map_err(|e| Error::numeric(format!("failed to write summary: {e}")))?;
    Ok(summary)
}
