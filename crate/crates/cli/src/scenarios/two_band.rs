//! Two-band scenarios: rate functions with and without gain, crossover-time
//! scaling, Liouvillian spectra, and the backflow check.

use super::{two_band_quench, CUSP_MEDIAN_FACTOR, CUSP_WINDOW};
use crate::config::{Engine, ExperimentConfig};
use crate::output::{RunWriter, Table};
use loschmidt::dqpt::{
    crossover_time, detect_cusps, gap_at_momentum, linear_fit, midpoint_k_grid, rate_function,
    refined_min_g, ReturnMethod, DEFAULT_OFFSET,
};
use loschmidt::error::{Error, Result};
use loschmidt::liouvillian::vectorize;
use loschmidt::models::{single_k_initial_state, single_k_liouvillian};
use loschmidt::propagator::{backflow_first_order, uniform_grid, QuadratureSpec};
use num_complex::Complex64;
use serde_json::{json, Value};

fn io_err(e: std::io::Error) -> Error {
    Error::Numeric(format!("output failure: {e}"))
}

fn method_for(engine: Engine, gamma_g: f64) -> ReturnMethod {
    // Gain needs the full Liouvillian; the non-Hermitian route is exact only
    // for loss-only models.
    if gamma_g > 0.0 || engine == Engine::Exact {
        ReturnMethod::Exact
    } else {
        ReturnMethod::NonHermitian
    }
}

pub fn rate(config: &ExperimentConfig, writer: &mut RunWriter) -> Result<Value> {
    let times = uniform_grid(config.grid.t_max, config.grid.dt);
    let ks = midpoint_k_grid(config.grid.k_points);
    let mut gains = vec![0.0];
    if config.model.gamma_g > 0.0 {
        gains.push(config.model.gamma_g);
    }

    let mut columns = vec!["t".to_string()];
    let mut rates: Vec<Vec<f64>> = Vec::new();
    let mut series_summaries = Vec::new();
    for &gamma_g in &gains {
        let quench = two_band_quench(config, gamma_g)?;
        let method = method_for(config.engine.kind, gamma_g);
        let series = rate_function(&quench, &ks, &times, method)?;
        let report = detect_cusps(&times, &series.rate, CUSP_WINDOW, CUSP_MEDIAN_FACTOR)?;
        // Refine the minimum of g over the full window.
        let min_g = refined_min_g(
            &quench,
            (0.0, 2.0 * std::f64::consts::PI),
            (config.grid.dt, config.grid.t_max),
            4,
            method,
        )?;
        writer.flagged_samples += series.metadata.flagged_samples;
        series_summaries.push(json!({
            "gamma_g": gamma_g,
            "method": method.name(),
            "cusp_times": report.times,
            "cusp_count": report.times.len(),
            "threshold": report.threshold,
            "min_g": {"k": min_g.k, "t": min_g.t, "g": min_g.g},
            "flagged": series.metadata.flagged_samples,
        }));
        columns.push(format!("G@gamma_g={gamma_g}"));
        rates.push(series.rate);
    }

    let col_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    let mut table = Table::new(&col_refs);
    for (ti, &t) in times.iter().enumerate() {
        let mut row = vec![t];
        for r in &rates {
            row.push(r[ti]);
        }
        table.push(row);
    }
    writer.write_table("rate", &table).map_err(io_err)?;

    Ok(json!({
        "scenario": "two_band_rate",
        "k_points": config.grid.k_points,
        "detector": {"window": CUSP_WINDOW, "median_factor": CUSP_MEDIAN_FACTOR},
        "series": series_summaries,
    }))
}

pub fn crossover(config: &ExperimentConfig, writer: &mut RunWriter) -> Result<Value> {
    let quench = two_band_quench(config, 0.0)?;
    let k0 = config.scan.k0;
    let gap = gap_at_momentum(&quench, k0)?;
    if gap.re >= 0.0 {
        return Err(Error::numeric(format!(
            "loss-only gap has nonnegative real part {gap} at k = {k0}"
        )));
    }
    // Horizon: past the slowest expected crossover.
    let min_gain = config
        .scan
        .gamma_g_values
        .iter()
        .cloned()
        .filter(|g| *g > 0.0)
        .fold(f64::INFINITY, f64::min);
    let horizon = if min_gain.is_finite() {
        1.6 * (min_gain.ln() / gap.re) + 20.0
    } else {
        config.grid.t_max
    };
    let times = uniform_grid(horizon.max(config.grid.t_max), config.grid.dt.max(0.01));

    let mut table = Table::new(&["gamma_g", "t_star", "analytic_estimate"]);
    let mut ratio_columns = vec!["t".to_string()];
    let mut ratios: Vec<Vec<f64>> = Vec::new();
    let mut lns = Vec::new();
    let mut tstars = Vec::new();
    let mut late_slopes = Vec::new();
    for &gamma_g in &config.scan.gamma_g_values {
        let res = crossover_time(&quench, k0, gamma_g, &times, DEFAULT_OFFSET)?;
        let t_star = res.t_star.unwrap_or(f64::NAN);
        table.push(vec![gamma_g, t_star, res.analytic]);
        ratio_columns.push(format!("log_ratio@gamma_g={gamma_g}"));
        if gamma_g > 0.0 {
            if let Some(ts) = res.t_star {
                lns.push(gamma_g.ln());
                tstars.push(ts);
                // Long-time slope of (−ln g_γ) − (−ln g₀) = −log_ratio.
                let lo = res.times.iter().position(|&t| t >= 1.6 * ts);
                let hi = res.times.iter().position(|&t| t >= 2.3 * ts);
                if let (Some(lo), Some(hi)) = (lo, hi) {
                    if hi > lo + 8 {
                        let xs = &res.times[lo..hi];
                        let ys: Vec<f64> = res.log_ratio[lo..hi].iter().map(|r| -r).collect();
                        let (slope, _) = linear_fit(xs, &ys);
                        late_slopes.push(slope);
                    }
                }
            } else {
                writer
                    .warnings
                    .push(format!("no crossover reached for gamma_g = {gamma_g}"));
            }
        }
        ratios.push(res.log_ratio);
    }
    writer.write_table("crossover", &table).map_err(io_err)?;

    let col_refs: Vec<&str> = ratio_columns.iter().map(|s| s.as_str()).collect();
    let mut ratio_table = Table::new(&col_refs);
    for (ti, &t) in times.iter().enumerate() {
        let mut row = vec![t];
        for r in &ratios {
            row.push(r[ti]);
        }
        ratio_table.push(row);
    }
    writer.write_table("log_ratio", &ratio_table).map_err(io_err)?;

    let (fitted_slope, _) = if lns.len() >= 2 {
        linear_fit(&lns, &tstars)
    } else {
        (f64::NAN, f64::NAN)
    };
    let expected_slope = 1.0 / gap.re;
    let mean_late = if late_slopes.is_empty() {
        f64::NAN
    } else {
        late_slopes.iter().sum::<f64>() / late_slopes.len() as f64
    };
    Ok(json!({
        "scenario": "two_band_crossover",
        "k0": k0,
        "gap": {"re": gap.re, "im": gap.im},
        "fitted_slope": fitted_slope,
        "expected_slope": expected_slope,
        "slope_rel_err": ((fitted_slope - expected_slope) / expected_slope).abs(),
        "late_slope_mean": mean_late,
        "late_slope_expected": gap.re.abs(),
        "late_slope_rel_err": ((mean_late - gap.re.abs()) / gap.re.abs()).abs(),
        "late_slopes": late_slopes,
        "offset": DEFAULT_OFFSET,
    }))
}

pub fn spectrum(config: &ExperimentConfig, writer: &mut RunWriter) -> Result<Value> {
    let quench = two_band_quench(config, config.model.gamma_g)?;
    let ks = midpoint_k_grid(config.grid.k_points);
    let mut table = Table::new(&["k", "index", "re", "im"]);
    for &k in &ks {
        let l = single_k_liouvillian(k, &quench.post)?.restrict_weak_symmetry(0)?;
        let es = l.spectrum()?;
        for (i, v) in es.values.iter().enumerate() {
            table.push(vec![k, i as f64, v.re, v.im]);
        }
    }
    writer.write_table("spectrum", &table).map_err(io_err)?;
    let gap = gap_at_momentum(&quench, config.scan.k0)?;
    Ok(json!({
        "scenario": "liouvillian_spectrum",
        "k0": config.scan.k0,
        "gap": {"re": gap.re, "im": gap.im},
    }))
}

pub fn backflow(config: &ExperimentConfig, writer: &mut RunWriter) -> Result<Value> {
    // Loss at the configured strength, gain block at unit strength: the
    // emitted value is the per-unit-gain first-order coefficient.
    let quench = two_band_quench(config, 1.0)?;
    let k = config.scan.k0;
    let l = single_k_liouvillian(k, &quench.post)?.restrict_weak_symmetry(0)?;
    let blocks = l.block_decompose()?;
    let (_, rho0) = single_k_initial_state(k, &quench.pre)?;
    let rho_vec = l.project_vector(&vectorize(&rho0)?)?;
    let rho_sector = blocks.project_diagonal(1, &rho_vec)?;
    let l0 = blocks
        .l0_diag(1)
        .ok_or_else(|| Error::domain("missing one-particle sector"))?;

    let quad = QuadratureSpec::default();
    let n_samples = 10usize;
    let mut table = Table::new(&["t", "backflow_re", "backflow_im", "zeroth_order"]);
    let mut min_re = f64::INFINITY;
    for i in 1..=n_samples {
        let t = config.grid.t_max * i as f64 / n_samples as f64;
        let b = backflow_first_order(&blocks, 1, &rho_sector, t, &quad)?;
        let e = loschmidt::linalg::expm(&(l0 * Complex64::new(t, 0.0)))?;
        let zeroth = loschmidt::linalg::vdot(&rho_sector, &e.dot(&rho_sector)).re;
        min_re = min_re.min(b.re);
        table.push(vec![t, b.re, b.im, zeroth]);
    }
    writer.write_table("backflow", &table).map_err(io_err)?;
    let vanishing = loschmidt::propagator::backflow_vanishing_check(&blocks, 1);
    Ok(json!({
        "scenario": "backflow_check",
        "k": k,
        "min_backflow_re": min_re,
        "vanishing_criterion": vanishing,
        "quadrature": {"base_nodes": quad.base_nodes, "rel_tol": quad.rel_tol},
    }))
}
