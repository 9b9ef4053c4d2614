//! Toy nonanalyticity: closed form versus independent quadrature.

use crate::config::ExperimentConfig;
use crate::output::{RunWriter, Table};
use loschmidt::dqpt::{toy_nonanalyticity, toy_rate};
use loschmidt::error::{Error, Result};
use loschmidt::linalg::gauss_legendre;
use serde_json::{json, Value};

/// Composite Gauss-Legendre quadrature of −(1/2π)∫ ln(q² + τ²) dq.
fn quadrature(delta: f64, tau: f64) -> f64 {
    let (x, w) = gauss_legendre(32);
    let panels = 64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = -delta + 2.0 * delta * p as f64 / panels as f64;
        let b = -delta + 2.0 * delta * (p + 1) as f64 / panels as f64;
        let half = (b - a) / 2.0;
        let mid = (a + b) / 2.0;
        for (xi, wi) in x.iter().zip(&w) {
            let q = mid + half * xi;
            total += wi * half * (q * q + tau * tau).ln();
        }
    }
    -total / (2.0 * std::f64::consts::PI)
}

pub fn cusp(config: &ExperimentConfig, writer: &mut RunWriter) -> Result<Value> {
    let delta = config.scan.delta;
    let steps = (config.grid.t_max / config.grid.dt).round() as i64;
    let taus: Vec<f64> = (-steps..=steps)
        .map(|i| i as f64 * config.grid.dt)
        .collect();
    let result = toy_nonanalyticity(delta, &taus)?;

    let mut table = Table::new(&["tau", "G_closed_form", "G_quadrature"]);
    let mut worst = 0.0_f64;
    for (tau, g) in taus.iter().zip(result.values.iter()) {
        let q = if *tau == 0.0 {
            // The integrable log singularity at q = 0 needs the closed form.
            toy_rate(delta, 0.0)
        } else {
            quadrature(delta, *tau)
        };
        worst = worst.max((g - q).abs());
        table.push(vec![*tau, *g, q]);
    }
    writer
        .write_table("toy", &table)
        .map_err(|e| Error::Numeric(format!("output failure: {e}")))?;

    Ok(json!({
        "scenario": "toy_cusp",
        "delta": delta,
        "g_at_zero": toy_rate(delta, 0.0),
        "left_derivative": result.left_derivative,
        "right_derivative": result.right_derivative,
        "max_quadrature_deviation": worst,
    }))
}
