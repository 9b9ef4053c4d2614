//! Loschmidt return and rate functions and DQPT diagnostics.
//!
//! The return function of one momentum sector is
//! `g(k, t) = tr[ρ₀(k) ρ(k, t)]`, with ρ evolved either under the full
//! Liouvillian (`Exact`) or under the bare effective non-Hermitian
//! Hamiltonian (`NonHermitian`, exact for loss-only or gain-only models).
//! The rate function averages over momenta:
//! `G(t) = −(1/N) Σ_k ln g(k, t)`; its cusps mark dynamical quantum phase
//! transitions.

mod crossover;
mod cusp;
mod fisher;
mod flux;
mod toy;

pub use crossover::{
    crossover_time, gap_at_momentum, linear_fit, CrossoverResult, DEFAULT_OFFSET,
};
pub use cusp::{cusp_statistic, detect_cusps, statistic_near, CuspReport};
pub use fisher::{fisher_zeros, fisher_residual, FisherZeroSet};
pub use flux::{flux_averaged_rate, FluxAveragedRate, FluxEngine};
pub use toy::{toy_nonanalyticity, toy_rate, ToyCusp};

use crate::error::{Error, Result};
use crate::linalg;
use crate::liouvillian::vectorize;
use crate::models::{
    single_k_hamiltonian, single_k_initial_state, single_k_jump_operators, single_k_liouvillian,
    QuenchSpec,
};
use crate::propagator::{evolve_exact, nonhermitian_amplitudes};
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

/// Propagation route for the return function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReturnMethod {
    /// Full Liouvillian evolution on the n_diff = 0 subspace.
    Exact,
    /// `g = |⟨ψ₀| e^{−iH_eff t} |ψ₀⟩|²` with the bare non-Hermitian propagator.
    NonHermitian,
}

impl ReturnMethod {
    pub fn name(&self) -> &'static str {
        match self {
            ReturnMethod::Exact => "exact",
            ReturnMethod::NonHermitian => "nonhermitian",
        }
    }
}

/// Provenance carried alongside computed series.
#[derive(Debug, Clone, Default)]
pub struct RateSeriesMeta {
    pub method: String,
    pub seed: Option<u64>,
    pub flagged_samples: usize,
    pub description: String,
}

/// Momentum-resolved return values plus the averaged rate function.
#[derive(Debug, Clone)]
pub struct RateSeries {
    pub times: Vec<f64>,
    pub k_grid: Vec<f64>,
    /// `g(k, t)` indexed `[k, t]`.
    pub g_values: Array2<f64>,
    /// `G(t) = −(1/N) Σ_k ln g(k, t)` over unflagged samples.
    pub rate: Vec<f64>,
    pub metadata: RateSeriesMeta,
}

/// Midpoint momentum grid `k_j = 2π (j + ½)/n` over the Brillouin zone.
pub fn midpoint_k_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64)
        .collect()
}

/// Effective non-Hermitian Hamiltonian on the 4-dim single-k Fock space.
pub fn single_k_heff(k: f64, quench: &QuenchSpec) -> Result<crate::CMat> {
    let h = single_k_hamiltonian(k, &quench.post);
    let jumps = single_k_jump_operators(&quench.post)?;
    let mut heff = h;
    for l in &jumps {
        heff = heff - linalg::dagger(l).dot(l) * Complex64::new(0.0, 0.5);
    }
    Ok(heff)
}

/// Return-function series `g(k, t)` over a time grid for one momentum.
pub fn return_series(
    quench: &QuenchSpec,
    k: f64,
    times: &[f64],
    method: ReturnMethod,
) -> Result<Vec<f64>> {
    let (psi0, rho0) = single_k_initial_state(k, &quench.pre)?;
    match method {
        ReturnMethod::NonHermitian => {
            let heff = single_k_heff(k, quench)?;
            let amps = nonhermitian_amplitudes(&heff, &psi0, times)?;
            Ok(amps.iter().map(|a| a.norm_sqr()).collect())
        }
        ReturnMethod::Exact => {
            let l = single_k_liouvillian(k, &quench.post)?.restrict_weak_symmetry(0)?;
            let rho_vec = l.project_vector(&vectorize(&rho0)?)?;
            let ev = evolve_exact(&l, &rho_vec, times)?;
            Ok(ev
                .states
                .iter()
                .map(|s| linalg::vdot(&rho_vec, s).re)
                .collect())
        }
    }
}

/// `g(k, t)` at a single time.
pub fn return_function(quench: &QuenchSpec, k: f64, t: f64, method: ReturnMethod) -> Result<f64> {
    let times = if t == 0.0 { vec![0.0] } else { vec![0.0, t] };
    Ok(*return_series(quench, k, &times, method)?.last().unwrap())
}

/// Averages `−ln g` over unflagged momenta at each time.
///
/// Samples with `g ≤ 0` or non-finite `g` are excluded and counted rather
/// than aborting the run.
pub fn rate_from_g(g: &Array2<f64>, times: &[f64]) -> (Vec<f64>, usize) {
    let mut flagged = 0usize;
    let rate = (0..times.len())
        .map(|ti| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for ki in 0..g.nrows() {
                let v = g[[ki, ti]];
                if v > 0.0 && v.is_finite() {
                    sum += v.ln();
                    count += 1;
                } else {
                    flagged += 1;
                }
            }
            if count == 0 {
                f64::INFINITY
            } else {
                -sum / count as f64
            }
        })
        .collect();
    (rate, flagged)
}

/// Full rate-function computation over a (k, t) grid; momenta run in
/// parallel, the average is accumulated in fixed order.
pub fn rate_function(
    quench: &QuenchSpec,
    k_grid: &[f64],
    times: &[f64],
    method: ReturnMethod,
) -> Result<RateSeries> {
    if k_grid.is_empty() {
        return Err(Error::domain("momentum grid is empty"));
    }
    let rows: Result<Vec<Vec<f64>>> = k_grid
        .par_iter()
        .map(|&k| return_series(quench, k, times, method))
        .collect();
    let rows = rows?;
    let mut g = Array2::zeros((k_grid.len(), times.len()));
    for (ki, row) in rows.iter().enumerate() {
        for (ti, &v) in row.iter().enumerate() {
            g[[ki, ti]] = v;
        }
    }
    let (rate, flagged) = rate_from_g(&g, times);
    Ok(RateSeries {
        times: times.to_vec(),
        k_grid: k_grid.to_vec(),
        g_values: g,
        rate,
        metadata: RateSeriesMeta {
            method: method.name().to_string(),
            seed: None,
            flagged_samples: flagged,
            description: String::new(),
        },
    })
}

/// Minimum of g over a rectangle in (k, t), refined by repeated zooming.
#[derive(Debug, Clone, Copy)]
pub struct MinGReport {
    pub k: f64,
    pub t: f64,
    pub g: f64,
}

/// Searches for the minimum return value on `[k_lo, k_hi] × [t_lo, t_hi]`,
/// zooming 5× around the argmin for `levels` rounds (21-point axes).
pub fn refined_min_g(
    quench: &QuenchSpec,
    k_range: (f64, f64),
    t_range: (f64, f64),
    levels: usize,
    method: ReturnMethod,
) -> Result<MinGReport> {
    let n_axis = 21usize;
    let (mut k_lo, mut k_hi) = k_range;
    let (mut t_lo, mut t_hi) = t_range;
    let mut best = MinGReport {
        k: f64::NAN,
        t: f64::NAN,
        g: f64::INFINITY,
    };
    for _ in 0..=levels {
        let ks: Vec<f64> = (0..n_axis)
            .map(|i| k_lo + (k_hi - k_lo) * i as f64 / (n_axis - 1) as f64)
            .collect();
        let mut ts: Vec<f64> = (0..n_axis)
            .map(|i| (t_lo + (t_hi - t_lo) * i as f64 / (n_axis - 1) as f64).max(0.0))
            .collect();
        ts.dedup();
        // Prepend t = 0 so the propagation grid is valid.
        let mut grid = Vec::with_capacity(ts.len() + 1);
        if ts[0] > 0.0 {
            grid.push(0.0);
        }
        grid.extend(ts.iter().cloned());
        let rows: Result<Vec<Vec<f64>>> = ks
            .par_iter()
            .map(|&k| return_series(quench, k, &grid, method))
            .collect();
        let rows = rows?;
        let skip = grid.len() - ts.len();
        for (ki, row) in rows.iter().enumerate() {
            for (ti, &v) in row.iter().skip(skip).enumerate() {
                if v < best.g {
                    best = MinGReport {
                        k: ks[ki],
                        t: ts[ti],
                        g: v,
                    };
                }
            }
        }
        let dk = (k_hi - k_lo) / (n_axis - 1) as f64;
        let dt = (t_hi - t_lo) / (n_axis - 1) as f64;
        k_lo = best.k - 2.0 * dk;
        k_hi = best.k + 2.0 * dk;
        t_lo = (best.t - 2.0 * dt).max(0.0);
        t_hi = best.t + 2.0 * dt;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Dissipator, Orbital};
    use crate::propagator::uniform_grid;

    fn pure_loss_quench(gamma_l: f64) -> QuenchSpec {
        QuenchSpec::two_band(0.5, 1.5, 1.0, vec![Dissipator::loss(Orbital::A, gamma_l)])
    }

    #[test]
    fn return_function_starts_at_one() {
        let q = pure_loss_quench(0.2);
        for method in [ReturnMethod::Exact, ReturnMethod::NonHermitian] {
            let g0 = return_function(&q, 1.3, 0.0, method).unwrap();
            assert!((g0 - 1.0).abs() < 1e-12, "{method:?}: g(0) = {g0}");
        }
    }

    #[test]
    fn methods_agree_for_pure_loss() {
        let q = pure_loss_quench(0.3);
        let times = [0.0, 0.5, 1.0, 2.0];
        for k in [0.4, 1.0, 2.2, 2.9] {
            let ge = return_series(&q, k, &times, ReturnMethod::Exact).unwrap();
            let gn = return_series(&q, k, &times, ReturnMethod::NonHermitian).unwrap();
            for (a, b) in ge.iter().zip(gn.iter()) {
                assert!((a - b).abs() < 1e-8, "k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn gain_floor_lifts_min_g() {
        let mut with_gain = pure_loss_quench(0.2);
        with_gain
            .post
            .dissipators
            .push(Dissipator::gain(Orbital::A, 1e-2));
        let times = uniform_grid(4.0, 0.05);
        let ks = midpoint_k_grid(60);
        let pure = rate_function(&pure_loss_quench(0.2), &ks, &times, ReturnMethod::Exact).unwrap();
        let gained = rate_function(&with_gain, &ks, &times, ReturnMethod::Exact).unwrap();
        let min_pure = pure.g_values.iter().cloned().fold(f64::INFINITY, f64::min);
        let min_gain = gained.g_values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min_gain > min_pure, "{min_gain} vs {min_pure}");
        assert!(min_gain > 0.0);
        assert_eq!(gained.metadata.flagged_samples, 0);
    }

    #[test]
    fn rate_of_constant_g_is_zero_and_exponential_is_linear() {
        let times = vec![0.0, 1.0, 2.0];
        let g = Array2::from_elem((4, 3), 1.0);
        let (rate, flagged) = rate_from_g(&g, &times);
        assert_eq!(flagged, 0);
        assert!(rate.iter().all(|r| r.abs() < 1e-15));

        let alpha = 0.7;
        let mut g2 = Array2::zeros((3, 3));
        for ki in 0..3 {
            for (ti, &t) in times.iter().enumerate() {
                g2[[ki, ti]] = (-alpha * t).exp();
            }
        }
        let (rate2, _) = rate_from_g(&g2, &times);
        for (r, &t) in rate2.iter().zip(times.iter()) {
            assert!((r - alpha * t).abs() < 1e-12);
        }
    }

    #[test]
    fn flagged_samples_are_excluded_not_fatal() {
        let times = vec![0.0, 1.0];
        let mut g = Array2::from_elem((2, 2), 0.5);
        g[[1, 1]] = -1e-12;
        let (rate, flagged) = rate_from_g(&g, &times);
        assert_eq!(flagged, 1);
        assert!((rate[1] - (-(0.5_f64).ln())).abs() < 1e-12);
    }

    #[test]
    fn refined_min_reaches_the_zero_for_pure_loss() {
        // The pure-loss quench has an exact zero of g near
        // k_c = arccos(−7/8), t_c ≈ 2 (shifted by the loss).
        let q = pure_loss_quench(0.2);
        let report = refined_min_g(
            &q,
            (2.0, 3.0),
            (1.2, 3.0),
            4,
            ReturnMethod::NonHermitian,
        )
        .unwrap();
        assert!(report.g < 1e-6, "min g = {:.3e} at ({}, {})", report.g, report.k, report.t);
    }
}
