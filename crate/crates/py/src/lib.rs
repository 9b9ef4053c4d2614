//! Python bindings exposing the main types and operations: occupation bases,
//! single-momentum Liouvillians and spectra, rate functions, Fisher zeros,
//! the toy cusp, and the trajectory engine.

use loschmidt::dqpt::{
    self, detect_cusps as core_detect_cusps, fisher_zeros, midpoint_k_grid, rate_function,
    toy_nonanalyticity, FluxEngine, ReturnMethod,
};
use loschmidt::fock::OccupationBasis;
use loschmidt::models::{
    single_k_liouvillian, BlochModel, DVector, Dissipator, Orbital, QuenchSpec,
};
use loschmidt::propagator::uniform_grid;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py_err(e: loschmidt::Error) -> PyErr {
    match e {
        loschmidt::Error::Domain(_) | loschmidt::Error::Dimension(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn quench(t0: f64, t1: f64, w: f64, gamma_l: f64, gamma_g: f64) -> QuenchSpec {
    let mut dissipators = Vec::new();
    if gamma_l > 0.0 {
        dissipators.push(Dissipator::loss(Orbital::A, gamma_l));
    }
    if gamma_g > 0.0 {
        dissipators.push(Dissipator::gain(Orbital::A, gamma_g));
    }
    QuenchSpec::two_band(t0, t1, w, dissipators)
}

/// Library version.
#[pyfunction]
fn version() -> &'static str {
    loschmidt::VERSION
}

/// Occupation basis as a list of bitmasks (bit i = mode i), optionally
/// restricted to a particle-number sector.
#[pyfunction]
#[pyo3(signature = (num_modes, particle_number=None))]
fn basis_states(num_modes: usize, particle_number: Option<usize>) -> PyResult<Vec<u32>> {
    Ok(OccupationBasis::build(num_modes, particle_number)
        .map_err(to_py_err)?
        .states()
        .to_vec())
}

/// Loschmidt rate function G(t) of the two-band quench.
/// Returns (times, rate). `method` is "exact" or "nonhermitian".
#[pyfunction]
#[pyo3(signature = (gamma_l, gamma_g=0.0, k_points=100, t_max=4.0, dt=0.01,
                    method="exact", t0=0.5, t1=1.5, w=1.0))]
#[allow(clippy::too_many_arguments)]
fn two_band_rate(
    gamma_l: f64,
    gamma_g: f64,
    k_points: usize,
    t_max: f64,
    dt: f64,
    method: &str,
    t0: f64,
    t1: f64,
    w: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let method = match method {
        "exact" => ReturnMethod::Exact,
        "nonhermitian" => ReturnMethod::NonHermitian,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method '{other}' (use 'exact' or 'nonhermitian')"
            )))
        }
    };
    let q = quench(t0, t1, w, gamma_l, gamma_g);
    let times = uniform_grid(t_max, dt);
    let ks = midpoint_k_grid(k_points);
    let series = rate_function(&q, &ks, &times, method).map_err(to_py_err)?;
    Ok((series.times, series.rate))
}

/// The single-momentum Liouvillian restricted to the weak-symmetry subspace
/// n − n̄ = 0, as a nested list of complex entries (6×6 for the two-band
/// model).
#[pyfunction]
#[pyo3(signature = (k, gamma_l, gamma_g=0.0, t1=1.5, w=1.0))]
fn single_k_liouvillian_matrix(
    k: f64,
    gamma_l: f64,
    gamma_g: f64,
    t1: f64,
    w: f64,
) -> PyResult<Vec<Vec<Complex64>>> {
    let model = BlochModel::new(DVector::Planar {
        offset: t1,
        hopping: w,
    })
    .with_dissipators(
        quench(0.5, t1, w, gamma_l, gamma_g).post.dissipators,
    );
    let l = single_k_liouvillian(k, &model)
        .map_err(to_py_err)?
        .restrict_weak_symmetry(0)
        .map_err(to_py_err)?;
    Ok(l
        .matrix
        .rows()
        .into_iter()
        .map(|r| r.to_vec())
        .collect())
}

/// Eigenvalues of the restricted single-momentum Liouvillian, sorted by
/// descending real part.
#[pyfunction]
#[pyo3(signature = (k, gamma_l, gamma_g=0.0, t1=1.5, w=1.0))]
fn liouvillian_spectrum_at(
    k: f64,
    gamma_l: f64,
    gamma_g: f64,
    t1: f64,
    w: f64,
) -> PyResult<Vec<Complex64>> {
    let model = BlochModel::new(DVector::Planar {
        offset: t1,
        hopping: w,
    })
    .with_dissipators(
        quench(0.5, t1, w, gamma_l, gamma_g).post.dissipators,
    );
    let l = single_k_liouvillian(k, &model)
        .map_err(to_py_err)?
        .restrict_weak_symmetry(0)
        .map_err(to_py_err)?;
    Ok(l.spectrum().map_err(to_py_err)?.values)
}

/// Closed-form toy rate function near a critical point.
/// Returns (values, left_derivative, right_derivative).
#[pyfunction]
fn toy_cusp(delta: f64, taus: Vec<f64>) -> PyResult<(Vec<f64>, f64, f64)> {
    let r = toy_nonanalyticity(delta, &taus).map_err(to_py_err)?;
    Ok((r.values, r.left_derivative, r.right_derivative))
}

/// Real-axis crossing times of the interacting-model Fisher zeros.
#[pyfunction]
#[pyo3(signature = (gamma_gain=0.5, k_points=600, branch_max=8))]
fn fisher_zero_crossings(
    gamma_gain: f64,
    k_points: usize,
    branch_max: i32,
) -> PyResult<Vec<f64>> {
    let ks = midpoint_k_grid(k_points);
    let zeros = fisher_zeros(&ks, gamma_gain, -1..=branch_max).map_err(to_py_err)?;
    Ok(zeros.crossings)
}

/// Cusp times of a rate-function series (centered-second-difference
/// detector).
#[pyfunction]
#[pyo3(signature = (times, values, window=5, median_factor=10.0))]
fn cusp_times(
    times: Vec<f64>,
    values: Vec<f64>,
    window: usize,
    median_factor: f64,
) -> PyResult<Vec<f64>> {
    Ok(core_detect_cusps(&times, &values, window, median_factor)
        .map_err(to_py_err)?
        .times)
}

/// Flux-averaged many-body rate function of the chain with two-body
/// loss/gain. `engine` is "nonhermitian" or "mcwf".
/// Returns (times, rate).
#[pyfunction]
#[pyo3(signature = (n_cells, gamma_l, gamma_g=0.0, flux_samples=30, t_max=5.0,
                    dt=0.005, engine="nonhermitian", trajectories=200, seed=1))]
#[allow(clippy::too_many_arguments)]
fn many_body_rate(
    n_cells: usize,
    gamma_l: f64,
    gamma_g: f64,
    flux_samples: usize,
    t_max: f64,
    dt: f64,
    engine: &str,
    trajectories: usize,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let engine = match engine {
        "nonhermitian" => FluxEngine::NonHermitian,
        "mcwf" => FluxEngine::Mcwf { trajectories },
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown engine '{other}' (use 'nonhermitian' or 'mcwf')"
            )))
        }
    };
    let mut q = quench(0.5, 1.5, 1.0, gamma_l, gamma_g);
    q.initial_filling = loschmidt::models::InitialFilling::HalfFilledManyBody;
    let times = uniform_grid(t_max, dt);
    let result = dqpt::flux_averaged_rate(n_cells, &q, flux_samples, &times, engine, seed)
        .map_err(to_py_err)?;
    Ok((result.times, result.rate))
}

#[pymodule]
fn loschmidt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(version, m)?)?;
    m.add_function(wrap_pyfunction!(basis_states, m)?)?;
    m.add_function(wrap_pyfunction!(two_band_rate, m)?)?;
    m.add_function(wrap_pyfunction!(single_k_liouvillian_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(liouvillian_spectrum_at, m)?)?;
    m.add_function(wrap_pyfunction!(toy_cusp, m)?)?;
    m.add_function(wrap_pyfunction!(fisher_zero_crossings, m)?)?;
    m.add_function(wrap_pyfunction!(cusp_times, m)?)?;
    m.add_function(wrap_pyfunction!(many_body_rate, m)?)?;
    Ok(())
}
