//! Time-evolution engines.
//!
//! * [`evolve_exact`] propagates vectorized densities with `e^{𝕃t}`;
//! * [`evolve_nonhermitian`] propagates `ρ(t) = e^{−iH_eff t} ρ₀ e^{iH_eff† t}`
//!   without renormalization (the bare propagator enters the return
//!   function directly);
//! * [`backflow_first_order`] evaluates the first-order jump correction to
//!   the return function — the closed loss-then-gain / gain-then-loss loops
//!   between particle-number sectors — by nested Gauss-Legendre quadrature.
//!
//! Matrix exponentials are dense scaling-and-squaring Padé; step propagators
//! over a time grid are cached per distinct increment.

use crate::error::{Error, Result};
use crate::linalg::{self, expm, gauss_legendre};
use crate::liouvillian::{ChargeBlocks, Liouvillian};
use crate::{CMat, CVec};
use num_complex::Complex64;
use std::collections::HashMap;

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    NonHermitian,
    DysonFirstOrder,
}

/// Trajectory of vectorized densities under `e^{𝕃t}`.
#[derive(Debug, Clone)]
pub struct ExactEvolution {
    pub times: Vec<f64>,
    /// One vector per time, on the Liouvillian's double-space basis.
    pub states: Vec<CVec>,
    pub method: Method,
}

/// Trajectory of (unnormalized) density matrices under the effective
/// non-Hermitian Hamiltonian.
#[derive(Debug, Clone)]
pub struct NonHermitianEvolution {
    pub times: Vec<f64>,
    pub states: Vec<CMat>,
    pub method: Method,
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::domain("time grid is empty"));
    }
    if times[0] != 0.0 {
        return Err(Error::domain("time grid must start at 0"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("time grid must be strictly increasing"));
    }
    Ok(())
}

/// Uniform grid 0, dt, 2dt, …, covering `t_max` (last point ≥ t_max − dt/2).
pub fn uniform_grid(t_max: f64, dt: f64) -> Vec<f64> {
    let steps = (t_max / dt).round() as usize;
    (0..=steps).map(|i| i as f64 * dt).collect()
}

/// Cache of `e^{G·dt}` keyed by the bit pattern of dt.
struct StepCache<'a> {
    generator: &'a CMat,
    cache: HashMap<u64, CMat>,
}

impl<'a> StepCache<'a> {
    fn new(generator: &'a CMat) -> Self {
        StepCache {
            generator,
            cache: HashMap::new(),
        }
    }

    fn step(&mut self, dt: f64) -> Result<&CMat> {
        let key = dt.to_bits();
        if !self.cache.contains_key(&key) {
            let m = expm(&(self.generator * Complex64::new(dt, 0.0)))?;
            self.cache.insert(key, m);
        }
        Ok(&self.cache[&key])
    }
}

/// Evolves a vectorized density on the Liouvillian's basis.
///
/// `rho0` must already live on the same (possibly weak-symmetry-restricted)
/// basis as `l`; use [`Liouvillian::project_vector`] to map a full density in.
pub fn evolve_exact(l: &Liouvillian, rho0: &CVec, times: &[f64]) -> Result<ExactEvolution> {
    validate_times(times)?;
    if rho0.len() != l.dim() {
        return Err(Error::dimension(format!(
            "state has length {}, Liouvillian dimension is {}",
            rho0.len(),
            l.dim()
        )));
    }
    let mut cache = StepCache::new(&l.matrix);
    let mut states = Vec::with_capacity(times.len());
    states.push(rho0.clone());
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let step = cache.step(dt)?;
        let next = step.dot(states.last().unwrap());
        if next.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::numeric(format!(
                "exact propagation produced non-finite values at t = {}",
                w[1]
            )));
        }
        states.push(next);
    }
    Ok(ExactEvolution {
        times: times.to_vec(),
        states,
        method: Method::Exact,
    })
}

/// Evolves `ρ(t) = e^{−iH_eff t} ρ₀ e^{iH_eff† t}` (no renormalization).
pub fn evolve_nonhermitian(
    heff: &CMat,
    rho0: &CMat,
    times: &[f64],
) -> Result<NonHermitianEvolution> {
    validate_times(times)?;
    let d = heff.nrows();
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(Error::dimension("initial state does not match H_eff"));
    }
    let generator = heff * MINUS_I;
    let mut cache = StepCache::new(&generator);
    let mut states = Vec::with_capacity(times.len());
    states.push(rho0.clone());
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let u = cache.step(dt)?;
        let prev = states.last().unwrap();
        let next = u.dot(prev).dot(&linalg::dagger(u));
        if !linalg::all_finite(&next) {
            return Err(Error::numeric(format!(
                "non-Hermitian propagation overflowed at t = {}",
                w[1]
            )));
        }
        states.push(next);
    }
    Ok(NonHermitianEvolution {
        times: times.to_vec(),
        states,
        method: Method::NonHermitian,
    })
}

/// Amplitude series `⟨ψ₀| e^{−iH_eff t} |ψ₀⟩` over a time grid.
pub fn nonhermitian_amplitudes(heff: &CMat, psi0: &CVec, times: &[f64]) -> Result<Vec<Complex64>> {
    validate_times(times)?;
    if psi0.len() != heff.nrows() {
        return Err(Error::dimension("state does not match H_eff"));
    }
    let generator = heff * MINUS_I;
    let mut cache = StepCache::new(&generator);
    let mut psi = psi0.clone();
    let mut amps = Vec::with_capacity(times.len());
    amps.push(linalg::vdot(psi0, &psi));
    for w in times.windows(2) {
        let u = cache.step(w[1] - w[0])?;
        psi = u.dot(&psi);
        if psi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::numeric(format!(
                "amplitude propagation overflowed at t = {}",
                w[1]
            )));
        }
        amps.push(linalg::vdot(psi0, &psi));
    }
    Ok(amps)
}

/// Nested Gauss-Legendre settings for the jump-correction integrals.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// Nodes per axis at the coarsest level.
    pub base_nodes: usize,
    /// Number of node-doubling refinements to try.
    pub max_doublings: usize,
    /// Relative change between refinements at which the estimate is accepted.
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            base_nodes: 32,
            max_doublings: 2,
            rel_tol: 1e-6,
        }
    }
}

/// Sector exponentials memoized on quadrature nodes.
struct SectorExp<'a> {
    block: &'a CMat,
    cache: HashMap<u64, CMat>,
}

impl<'a> SectorExp<'a> {
    fn new(block: &'a CMat) -> Self {
        SectorExp {
            block,
            cache: HashMap::new(),
        }
    }
    fn at(&mut self, t: f64) -> Result<&CMat> {
        let key = t.to_bits();
        if !self.cache.contains_key(&key) {
            let m = expm(&(self.block * Complex64::new(t, 0.0)))?;
            self.cache.insert(key, m);
        }
        Ok(&self.cache[&key])
    }
}

/// First-order jump (backflow) coefficient of the return function at time `t`.
///
/// `rho0` lives in the diagonal sector `(n, n)` of `blocks` (see
/// [`ChargeBlocks::project_diagonal`]). The value sums, over every sector `a`
/// reachable by one loss-then-gain loop below `n` and one gain-then-loss loop
/// above `n`, the nested time integrals of
/// `⟨⟨ρ₀| e^{𝕃₀(t−τ)} 𝕃_u e^{𝕃₀(τ−τ₁)} 𝕃_d e^{𝕃₀τ₁} |ρ₀⟩⟩` (and the mirrored
/// ordering). Sectors absent at boundary fillings contribute zero. The result
/// of each loop is the sandwich of a completely positive map, so the real
/// part is nonnegative and the imaginary part vanishes to roundoff.
pub fn backflow_first_order(
    blocks: &ChargeBlocks,
    n: u32,
    rho0: &CVec,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    if t < 0.0 {
        return Err(Error::domain("backflow time must be nonnegative"));
    }
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let l0n = blocks
        .l0_diag(n)
        .ok_or_else(|| Error::domain(format!("no (n,n) block for n = {n}")))?;
    if rho0.len() != l0n.nrows() {
        return Err(Error::dimension("rho0 does not match the (n,n) sector"));
    }

    let mut estimate = Complex64::new(0.0, 0.0);
    let mut prev: Option<Complex64> = None;
    let mut nodes = quad.base_nodes;
    for level in 0..=quad.max_doublings {
        estimate = backflow_at_resolution(blocks, n, rho0, t, nodes, l0n)?;
        if let Some(p) = prev {
            let change = (estimate - p).norm();
            let scale = estimate.norm().max(1e-12);
            if change <= quad.rel_tol * scale {
                return Ok(estimate);
            }
            if level == quad.max_doublings {
                return Err(Error::numeric(format!(
                    "backflow quadrature did not converge: change {change:.3e} \
                     at {nodes} nodes (relative tolerance {})",
                    quad.rel_tol
                )));
            }
        }
        prev = Some(estimate);
        nodes *= 2;
    }
    Ok(estimate)
}

fn backflow_at_resolution(
    blocks: &ChargeBlocks,
    n: u32,
    rho0: &CVec,
    t: f64,
    nodes: usize,
    l0n: &CMat,
) -> Result<Complex64> {
    let (x, w) = gauss_legendre(nodes);
    let mut exp_n = SectorExp::new(l0n);
    let mut total = Complex64::new(0.0, 0.0);

    // Loss-then-gain loops through sectors a < n.
    for a in 0..n {
        let (Some(lu), Some(ld)) = (blocks.lu_diag(n, a), blocks.ld_diag(a, n)) else {
            continue;
        };
        let Some(l0a) = blocks.l0_diag(a) else {
            continue;
        };
        let mut exp_a = SectorExp::new(l0a);
        let lu_dag = linalg::dagger(lu);
        // ∫₀ᵗ dτ ∫₀^τ dτ₁  ⟨ρ₀|e^{𝕃₀ⁿ(t−τ)} Lu e^{𝕃₀ᵃ(τ−τ₁)} Ld e^{𝕃₀ⁿτ₁}|ρ₀⟩
        for (xi, wi) in x.iter().zip(&w) {
            let tau = t * (xi + 1.0) / 2.0;
            // u† = ⟨ρ₀| e^{𝕃₀ⁿ(t−τ)} Lu
            let u = {
                let e_dag = linalg::dagger(exp_n.at(t - tau)?);
                lu_dag.dot(&e_dag.dot(rho0))
            };
            for (yj, wj) in x.iter().zip(&w) {
                let tau1 = tau * (yj + 1.0) / 2.0;
                let ket = exp_n.at(tau1)?.dot(rho0);
                let ket = ld.dot(&ket);
                let mid = exp_a.at(tau - tau1)?;
                let val = linalg::vdot(&u, &mid.dot(&ket));
                total += Complex64::new(wi * wj * (t / 2.0) * (tau / 2.0), 0.0) * val;
            }
        }
    }

    // Gain-then-loss loops through sectors b > n.
    let max_sector = blocks.diagonal_sectors().into_iter().max().unwrap_or(n);
    for b in (n + 1)..=max_sector {
        let (Some(ld), Some(lu)) = (blocks.ld_diag(n, b), blocks.lu_diag(b, n)) else {
            continue;
        };
        let Some(l0b) = blocks.l0_diag(b) else {
            continue;
        };
        let mut exp_b = SectorExp::new(l0b);
        // ∫₀ᵗ dτ ∫₀^{t−τ} dτ₁ ⟨ρ₀|e^{𝕃₀ⁿ(t−τ−τ₁)} Ld e^{𝕃₀ᵇτ₁} Lu e^{𝕃₀ⁿτ}|ρ₀⟩
        for (xi, wi) in x.iter().zip(&w) {
            let tau = t * (xi + 1.0) / 2.0;
            let ket_base = lu.dot(&exp_n.at(tau)?.dot(rho0));
            let span = t - tau;
            for (yj, wj) in x.iter().zip(&w) {
                let tau1 = span * (yj + 1.0) / 2.0;
                let ket = ld.dot(&exp_b.at(tau1)?.dot(&ket_base));
                let left = exp_n.at(t - tau - tau1)?;
                // ⟨ρ₀| e^{𝕃₀ⁿ(t−τ−τ₁)} |ket⟩
                let val: Complex64 = rho0
                    .iter()
                    .zip(left.dot(&ket).iter())
                    .map(|(b_, k)| b_.conj() * k)
                    .sum();
                total += Complex64::new(wi * wj * (t / 2.0) * (span / 2.0), 0.0) * val;
            }
        }
    }
    Ok(total)
}

/// Checks the algebraic criterion for vanishing backflow out of sector `n`:
/// `𝕃_u^{(n←n−m)} 𝕃_d^{(n−m←n)} = 𝕃_u^{(n←n−m)} 𝕃₀^{(n−m)} 𝕃_d^{(n−m←n)} = 0`
/// for every loop depth `m` with both blocks present (max-abs ≤ 1e-12).
/// Models with no gain blocks satisfy it vacuously.
pub fn backflow_vanishing_check(blocks: &ChargeBlocks, n: u32) -> bool {
    const TOL: f64 = 1e-12;
    for a in 0..n {
        let (Some(lu), Some(ld)) = (blocks.lu_diag(n, a), blocks.ld_diag(a, n)) else {
            continue;
        };
        if linalg::max_abs(&lu.dot(ld)) > TOL {
            return false;
        }
        if let Some(l0a) = blocks.l0_diag(a) {
            if linalg::max_abs(&lu.dot(l0a).dot(ld)) > TOL {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{operator_matrix, OccupationBasis, OperatorKind};
    use crate::liouvillian::{vectorize, Liouvillian};
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn amplitude_damping(gamma: f64) -> Liouvillian {
        let mut lop = CMat::zeros((2, 2));
        lop[[0, 1]] = c(gamma.sqrt(), 0.0);
        Liouvillian::build(&CMat::zeros((2, 2)), &[lop]).unwrap()
    }

    #[test]
    fn time_zero_returns_initial_state() {
        let l = amplitude_damping(0.5);
        let rho0 = vectorize(&array![[c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]])
            .unwrap();
        let ev = evolve_exact(&l, &rho0.data, &[0.0, 1.0]).unwrap();
        for (a, b) in ev.states[0].iter().zip(rho0.data.iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn amplitude_damping_closed_form() {
        let gamma = 0.8;
        let l = amplitude_damping(gamma);
        let rho0 = vectorize(&array![[c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]])
            .unwrap();
        let t = 1.0 / gamma;
        let ev = evolve_exact(&l, &rho0.data, &[0.0, t]).unwrap();
        let rho_t = l.unproject_vector(&ev.states[1]).unwrap();
        assert!((rho_t[[1, 1]].re - (-1.0_f64).exp()).abs() < 1e-12);
        assert!((rho_t[[0, 0]].re - (1.0 - (-1.0_f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn composition_of_half_steps() {
        let l = amplitude_damping(0.45);
        let one = expm(&(&l.matrix * c(0.8, 0.0))).unwrap();
        let half = expm(&(&l.matrix * c(0.4, 0.0))).unwrap();
        assert!(linalg::max_abs(&(half.dot(&half) - &one)) < 1e-9);
    }

    #[test]
    fn hermitian_heff_preserves_trace() {
        let h = array![[c(0.3, 0.0), c(0.5, 0.2)], [c(0.5, -0.2), c(-0.1, 0.0)]];
        let rho0 = array![[c(0.7, 0.0), c(0.1, 0.1)], [c(0.1, -0.1), c(0.3, 0.0)]];
        let ev = evolve_nonhermitian(&h, &rho0, &uniform_grid(2.0, 0.25)).unwrap();
        for s in &ev.states {
            assert!((linalg::trace(s).re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn number_damping_trace_decays_exponentially() {
        // H_eff = −(iγ/2) N on a single mode; 1-particle pure state.
        let gamma = 0.6;
        let heff = array![
            [c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, -gamma / 2.0)]
        ];
        let rho0 = array![[c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        let ev = evolve_nonhermitian(&heff, &rho0, &uniform_grid(3.0, 0.5)).unwrap();
        for (t, s) in ev.times.iter().zip(&ev.states) {
            assert!((linalg::trace(s).re - (-gamma * t).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn backflow_vanishes_at_time_zero() {
        let basis = OccupationBasis::full(2).unwrap();
        let numbers = basis.particle_numbers();
        let loss = operator_matrix(&basis, 0, OperatorKind::Annihilation).unwrap().matrix;
        let gain = operator_matrix(&basis, 0, OperatorKind::Creation).unwrap().matrix;
        let l = Liouvillian::build_with_charges(&CMat::zeros((4, 4)), &[loss, gain], &numbers)
            .unwrap()
            .restrict_weak_symmetry(0)
            .unwrap();
        let blocks = l.block_decompose().unwrap();
        let rho0 = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let v = backflow_first_order(&blocks, 1, &rho0, 0.0, &QuadratureSpec::default()).unwrap();
        assert_eq!(v, c(0.0, 0.0));
    }

    #[test]
    fn vanishing_check_pure_loss_and_engineered_zero() {
        let basis = OccupationBasis::full(2).unwrap();
        let numbers = basis.particle_numbers();
        let h = CMat::zeros((4, 4));
        let loss = operator_matrix(&basis, 0, OperatorKind::Annihilation).unwrap().matrix;

        // Pure loss: vacuously true.
        let l = Liouvillian::build_with_charges(&h, std::slice::from_ref(&loss), &numbers).unwrap();
        let blocks = l.block_decompose().unwrap();
        assert!(backflow_vanishing_check(&blocks, 1));
        assert!(backflow_vanishing_check(&blocks, 2));

        // Gain on the other mode: the loop through sector 1 out of n = 2
        // closes on states the gain annihilates, so both products vanish.
        let gain1 = operator_matrix(&basis, 1, OperatorKind::Creation).unwrap().matrix;
        let l2 = Liouvillian::build_with_charges(&h, &[loss.clone(), gain1], &numbers).unwrap();
        let blocks2 = l2.block_decompose().unwrap();
        assert!(backflow_vanishing_check(&blocks2, 2));
        assert!(!backflow_vanishing_check(&blocks2, 1));

        // Loss and gain on the same mode: backflow present.
        let gain0 = operator_matrix(&basis, 0, OperatorKind::Creation).unwrap().matrix;
        let l3 = Liouvillian::build_with_charges(&h, &[loss, gain0], &numbers).unwrap();
        let blocks3 = l3.block_decompose().unwrap();
        assert!(!backflow_vanishing_check(&blocks3, 1));
    }
}
