//! Interacting-model scenarios: analytic Fisher zeros and the numerically
//! propagated rate function at large interaction, with optional loss.

use super::{CUSP_MEDIAN_FACTOR, CUSP_WINDOW};
use crate::config::ExperimentConfig;
use crate::output::{RunWriter, Table};
use loschmidt::dqpt::{detect_cusps, fisher_zeros, midpoint_k_grid, rate_from_g};
use loschmidt::error::{Error, Result};
use loschmidt::liouvillian::vectorize;
use loschmidt::models::{
    hk_initial_state, hk_liouvillian, hk_two_particle_heff, hk_two_particle_initial_state,
};
use loschmidt::propagator::{evolve_exact, nonhermitian_amplitudes, uniform_grid};
use ndarray::Array2;
use rayon::prelude::*;
use serde_json::{json, Value};

fn io_err(e: std::io::Error) -> Error {
    Error::Numeric(format!("output failure: {e}"))
}

pub fn fisher(config: &ExperimentConfig, writer: &mut RunWriter) -> Result<Value> {
    let ks = midpoint_k_grid(config.grid.k_points);
    let zeros = fisher_zeros(
        &ks,
        config.scan.hk_gamma_gain,
        config.scan.branch_min..=config.scan.branch_max,
    )?;
    let mut table = Table::new(&["k", "branch", "root", "re_t", "im_t"]);
    for ((n, root), curve) in &zeros.branches {
        for (ki, t) in curve.iter().enumerate() {
            table.push(vec![ks[ki], *n as f64, *root as f64, t.re, t.im]);
        }
    }
    writer.write_table("fisher", &table).map_err(io_err)?;
    writer.flagged_samples += zeros.flagged_k.len();
    Ok(json!({
        "scenario": "hk_fisher",
        "gamma_gain": config.scan.hk_gamma_gain,
        "branch_range": [config.scan.branch_min, config.scan.branch_max],
        "crossings": zeros.crossings,
        "max_residual": zeros.max_residual(),
        "flagged_k": zeros.flagged_k.len(),
    }))
}

pub fn rate(config: &ExperimentConfig, writer: &mut RunWriter) -> Result<Value> {
    let times = uniform_grid(config.grid.t_max, config.grid.dt);
    let ks = midpoint_k_grid(config.grid.k_points);
    let u = config.model.u;
    let gamma_gain = config.scan.hk_gamma_gain;
    let gamma_loss = config.scan.hk_gamma_loss;

    // Gain-only series via the two-particle effective Hamiltonian.
    let rows: Result<Vec<Vec<f64>>> = ks
        .par_iter()
        .map(|&k| {
            let h2 = hk_two_particle_heff(k, u, gamma_gain);
            let psi0 = hk_two_particle_initial_state(k)?;
            let amps = nonhermitian_amplitudes(&h2, &psi0, &times)?;
            Ok(amps.iter().map(|a| a.norm_sqr()).collect())
        })
        .collect();
    let rows = rows?;
    let mut g = Array2::zeros((ks.len(), times.len()));
    for (ki, row) in rows.iter().enumerate() {
        for (ti, &v) in row.iter().enumerate() {
            g[[ki, ti]] = v;
        }
    }
    let (rate_gain, flagged_gain) = rate_from_g(&g, &times);
    let gain_report = detect_cusps(&times, &rate_gain, CUSP_WINDOW, CUSP_MEDIAN_FACTOR)?;
    writer.flagged_samples += flagged_gain;

    let mut columns = vec!["t".to_string(), "G_gain_only".to_string()];
    let mut rate_cols = vec![rate_gain.clone()];
    let mut series = vec![json!({
        "label": "gain_only",
        "gamma_gain": gamma_gain,
        "gamma_loss": 0.0,
        "cusp_times": gain_report.times,
        "cusp_count": gain_report.times.len(),
        "threshold": gain_report.threshold,
        "flagged": flagged_gain,
    })];

    // Loss added: full Liouvillian per momentum on the n_diff = 0 subspace.
    if gamma_loss > 0.0 {
        let rows: Result<Vec<Vec<f64>>> = ks
            .par_iter()
            .map(|&k| {
                let l = hk_liouvillian(k, u, gamma_gain, gamma_loss)?
                    .restrict_weak_symmetry(0)?;
                let psi0 = hk_initial_state(k)?;
                let rho0 = loschmidt::CMat::from_shape_fn((16, 16), |(i, j)| {
                    psi0[i] * psi0[j].conj()
                });
                let rho_vec = l.project_vector(&vectorize(&rho0)?)?;
                let ev = evolve_exact(&l, &rho_vec, &times)?;
                Ok(ev
                    .states
                    .iter()
                    .map(|s| loschmidt::linalg::vdot(&rho_vec, s).re)
                    .collect())
            })
            .collect();
        let rows = rows?;
        let mut g2 = Array2::zeros((ks.len(), times.len()));
        for (ki, row) in rows.iter().enumerate() {
            for (ti, &v) in row.iter().enumerate() {
                g2[[ki, ti]] = v;
            }
        }
        let (rate_loss, flagged_loss) = rate_from_g(&g2, &times);
        let loss_report = detect_cusps(&times, &rate_loss, CUSP_WINDOW, CUSP_MEDIAN_FACTOR)?;
        writer.flagged_samples += flagged_loss;
        series.push(json!({
            "label": "with_loss",
            "gamma_gain": gamma_gain,
            "gamma_loss": gamma_loss,
            "cusp_times": loss_report.times,
            "cusp_count": loss_report.times.len(),
            "threshold": loss_report.threshold,
            "flagged": flagged_loss,
        }));
        columns.push("G_with_loss".to_string());
        rate_cols.push(rate_loss);
    }

    let col_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    let mut table = Table::new(&col_refs);
    for (ti, &t) in times.iter().enumerate() {
        let mut row = vec![t];
        for r in &rate_cols {
            row.push(r[ti]);
        }
        table.push(row);
    }
    writer.write_table("rate", &table).map_err(io_err)?;

    Ok(json!({
        "scenario": "hk_rate",
        "u": u,
        "k_points": config.grid.k_points,
        "detector": {"window": CUSP_WINDOW, "median_factor": CUSP_MEDIAN_FACTOR},
        "series": series,
    }))
}
