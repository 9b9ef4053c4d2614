//! Minimal nonanalyticity model: the rate function of `g(q, τ) = q² + τ²`
//! near a critical point, integrated over momenta with cutoff Δ.
//!
//! `G(τ) = −(1/2π) ∫_{−Δ}^{Δ} ln(q² + τ²) dq` has the closed form
//! `(4Δ − 4τ·arctan(Δ/τ) − 2Δ·ln(Δ² + τ²)) / 2π`: continuous at τ = 0 with
//! `G(0) = (2Δ/π)(1 − ln Δ)` and one-sided slopes
//! `dG/dτ → ±1` as τ → 0∓ — a cusp with unit slope jump on each side.

use crate::error::{Error, Result};

/// Closed form of the toy rate function.
pub fn toy_rate(delta: f64, tau: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    if tau == 0.0 {
        return (4.0 * delta - 2.0 * delta * (delta * delta).ln()) / two_pi;
    }
    (4.0 * delta - 4.0 * tau * (delta / tau).atan()
        - 2.0 * delta * (delta * delta + tau * tau).ln())
        / two_pi
}

/// Evaluation of the toy rate on a τ grid plus one-sided derivatives at 0.
#[derive(Debug, Clone)]
pub struct ToyCusp {
    pub delta: f64,
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    /// lim_{τ→0⁻} dG/dτ (= +1 analytically).
    pub left_derivative: f64,
    /// lim_{τ→0⁺} dG/dτ (= −1 analytically).
    pub right_derivative: f64,
}

/// Evaluates the closed form and numerical one-sided derivatives at τ = 0.
pub fn toy_nonanalyticity(delta: f64, taus: &[f64]) -> Result<ToyCusp> {
    if delta <= 0.0 {
        return Err(Error::domain("cutoff Δ must be positive"));
    }
    let values = taus.iter().map(|&t| toy_rate(delta, t)).collect();
    let h = 1e-6 * delta.max(1.0);
    let g0 = toy_rate(delta, 0.0);
    let left_derivative = (g0 - toy_rate(delta, -h)) / h;
    let right_derivative = (toy_rate(delta, h) - g0) / h;
    Ok(ToyCusp {
        delta,
        taus: taus.to_vec(),
        values,
        left_derivative,
        right_derivative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gauss_legendre;

    /// Independent oracle: composite Gauss-Legendre quadrature of
    /// −(1/2π)∫ ln(q² + τ²) dq over [−Δ, Δ].
    fn quadrature_rate(delta: f64, tau: f64, panels: usize, nodes: usize) -> f64 {
        let (x, w) = gauss_legendre(nodes);
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

    #[test]
    fn closed_form_matches_quadrature() {
        for delta in [0.5, 1.0, 2.0] {
            for tau in [-0.8, -0.2, 0.05, 0.3, 1.1] {
                let closed = toy_rate(delta, tau);
                let quad = quadrature_rate(delta, tau, 64, 32);
                assert!(
                    (closed - quad).abs() < 1e-8,
                    "Δ={delta} τ={tau}: {closed} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn value_at_zero() {
        for delta in [0.5_f64, 1.0, 2.0] {
            let expect = 2.0 * delta / std::f64::consts::PI * (1.0 - delta.ln());
            assert!((toy_rate(delta, 0.0) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn one_sided_derivatives_are_unit_slopes() {
        for delta in [0.5, 1.0, 2.0] {
            let cusp = toy_nonanalyticity(delta, &[-0.1, 0.0, 0.1]).unwrap();
            assert!(
                (cusp.left_derivative - 1.0).abs() < 1e-3,
                "left {}",
                cusp.left_derivative
            );
            assert!(
                (cusp.right_derivative + 1.0).abs() < 1e-3,
                "right {}",
                cusp.right_derivative
            );
        }
    }

    #[test]
    fn continuous_and_even_in_tau() {
        let delta = 1.3;
        for tau in [0.01, 0.4, 1.7] {
            assert!((toy_rate(delta, tau) - toy_rate(delta, -tau)).abs() < 1e-14);
        }
        assert!((toy_rate(delta, 1e-9) - toy_rate(delta, 0.0)).abs() < 1e-7);
    }
}
