//! Monte-Carlo wavefunction (quantum trajectory) engine.
//!
//! One step of the five-step algorithm: from a normalized |ψ⟩, compute the
//! jump probabilities `p_μ = ⟨ψ|L_μ†L_μ|ψ⟩ δt = ‖L_μψ‖² δt` and
//! `p₀ = 1 − Σ_μ p_μ`; draw a single uniform `u` and compare against the
//! cumulative sums: either apply the no-jump drift `(I − iH_eff δt)|ψ⟩` or
//! the selected jump `L_ν|ψ⟩`, then renormalize.
//!
//! Every trajectory owns a counter-based random stream keyed by
//! `(seed, trajectory index)` (ChaCha streams), consuming exactly one draw
//! per step when jumps are present, so results are independent of scheduling
//! and bit-reproducible. Ensemble reductions run over fixed-size chunks of
//! trajectory indices combined in index order.

use crate::error::{Error, Result};
use crate::sparse::LinearOp;
use crate::CMat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

const REDUCTION_CHUNK: usize = 16;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// One stochastic wavefunction with its private random stream.
pub struct TrajectoryState {
    pub psi: Vec<Complex64>,
    pub time: f64,
    pub steps: usize,
    /// (time, jump index) records.
    pub jump_log: Vec<(f64, usize)>,
    pub seed: u64,
    pub index: u64,
    rng: ChaCha12Rng,
}

impl TrajectoryState {
    /// Prepares a trajectory at t = 0 with the stream `(seed, index)`.
    pub fn new(psi0: &[Complex64], seed: u64, index: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(index);
        TrajectoryState {
            psi: psi0.to_vec(),
            time: 0.0,
            steps: 0,
            jump_log: Vec::new(),
            seed,
            index,
            rng,
        }
    }

    fn normalize(&mut self) -> Result<f64> {
        let n2: f64 = self.psi.iter().map(|z| z.norm_sqr()).sum();
        if !(n2.is_finite() && n2 > 0.0) {
            return Err(Error::numeric(format!(
                "trajectory {} lost normalizability at t = {}",
                self.index, self.time
            )));
        }
        let inv = 1.0 / n2.sqrt();
        for z in &mut self.psi {
            *z *= inv;
        }
        Ok(n2)
    }
}

/// What happened in one step.
#[derive(Debug, Clone)]
pub struct StepReport {
    /// `Some(ν)` if jump ν fired.
    pub jump: Option<usize>,
    /// Jump probabilities p_μ for this step.
    pub probabilities: Vec<f64>,
    /// No-jump probability p₀ = 1 − Σ p_μ.
    pub no_jump_probability: f64,
}

/// Reusable per-trajectory buffers; stepping allocates nothing.
pub struct McwfWorkspace {
    scratch: Vec<Complex64>,
    probabilities: Vec<f64>,
}

impl McwfWorkspace {
    pub fn new(dim: usize, n_jumps: usize) -> Self {
        McwfWorkspace {
            scratch: vec![czero(); dim],
            probabilities: vec![0.0; n_jumps],
        }
    }
}

/// One step using caller-provided buffers; returns the fired jump, if any.
pub fn mcwf_step_with(
    state: &mut TrajectoryState,
    heff: &dyn LinearOp,
    jumps: &[&dyn LinearOp],
    dt: f64,
    ws: &mut McwfWorkspace,
) -> Result<Option<usize>> {
    let mut p_sum = 0.0;
    for (l, p) in jumps.iter().zip(ws.probabilities.iter_mut()) {
        *p = l.apply_norm_sqr(&state.psi, &mut ws.scratch) * dt;
        p_sum += *p;
    }
    if p_sum >= 1.0 {
        return Err(Error::numeric(format!(
            "timestep too large: total jump probability {p_sum:.6} ≥ 1 at t = {} \
             (trajectory {})",
            state.time, state.index
        )));
    }
    let p0 = 1.0 - p_sum;

    let jump = if jumps.is_empty() {
        // Deterministic drift; no randomness consumed.
        None
    } else {
        let u: f64 = state.rng.random();
        if u < p0 {
            None
        } else {
            // First ν with cumulative q_ν ≥ u.
            let mut q = p0;
            let mut chosen = jumps.len() - 1;
            for (nu, p) in ws.probabilities.iter().enumerate() {
                q += p;
                if u < q {
                    chosen = nu;
                    break;
                }
            }
            Some(chosen)
        }
    };

    match jump {
        None => {
            // |ψ⟩ ← (I − iH_eff dt)|ψ⟩, normalized.
            heff.apply(&state.psi, &mut ws.scratch);
            let idt = Complex64::new(0.0, -dt);
            for (z, h) in state.psi.iter_mut().zip(ws.scratch.iter()) {
                *z += idt * h;
            }
        }
        Some(nu) => {
            jumps[nu].apply(&state.psi, &mut ws.scratch);
            std::mem::swap(&mut state.psi, &mut ws.scratch);
            state.jump_log.push((state.time + dt, nu));
        }
    }
    state.normalize()?;
    state.time += dt;
    state.steps += 1;
    Ok(jump)
}

/// Advances one trajectory by `dt`, reporting the step probabilities.
pub fn mcwf_step(
    state: &mut TrajectoryState,
    heff: &dyn LinearOp,
    jumps: &[&dyn LinearOp],
    dt: f64,
) -> Result<StepReport> {
    let mut ws = McwfWorkspace::new(state.psi.len(), jumps.len());
    let jump = mcwf_step_with(state, heff, jumps, dt, &mut ws)?;
    let no_jump_probability = 1.0 - ws.probabilities.iter().sum::<f64>();
    Ok(StepReport {
        jump,
        probabilities: ws.probabilities,
        no_jump_probability,
    })
}

/// What to record while running an ensemble.
#[derive(Debug, Clone, Default)]
pub struct ObservableSpec {
    /// State whose return probability `|⟨ref|ψ(t)⟩|²` is tracked;
    /// defaults to ψ(0).
    pub reference_state: Option<Vec<Complex64>>,
    /// Grid indices at which `(1/M) Σ |ψ⟩⟨ψ|` is accumulated.
    pub density_checkpoints: Vec<usize>,
}

/// Ensemble averages with per-time standard errors.
pub struct EnsembleResult {
    pub times: Vec<f64>,
    pub trajectories: usize,
    /// `g(t) = (1/M) Σ_m |⟨ref|ψ^{(m)}(t)⟩|²`.
    pub return_probability: Vec<f64>,
    pub return_probability_stderr: Vec<f64>,
    /// Reconstructed density matrices at the requested checkpoints.
    pub reconstructed_rho: Vec<(usize, CMat)>,
    pub mean_jumps_per_trajectory: f64,
    pub aborted_trajectories: usize,
}

impl EnsembleResult {
    /// Density matrix recorded at grid index `idx`.
    pub fn density_at(&self, idx: usize) -> Option<&CMat> {
        self.reconstructed_rho
            .iter()
            .find(|(i, _)| *i == idx)
            .map(|(_, m)| m)
    }
}

struct ChunkAccum {
    g_sum: Vec<f64>,
    g_sq_sum: Vec<f64>,
    rho_sum: Vec<CMat>,
    jumps: usize,
    aborted: usize,
    count: usize,
}

/// Runs `m` independent trajectories and reduces them in index order.
///
/// The time grid must be uniform; one step is taken per grid interval.
/// A failing trajectory is dropped and counted; more than 1% failures is a
/// run error.
pub fn run_ensemble(
    psi0: &[Complex64],
    heff: &dyn LinearOp,
    jumps: &[&dyn LinearOp],
    t_grid: &[f64],
    m: usize,
    seed: u64,
    observables: &ObservableSpec,
) -> Result<EnsembleResult> {
    run_ensemble_indexed(psi0, heff, jumps, t_grid, m, seed, 0, observables)
}

/// [`run_ensemble`] with trajectory indices offset by `index_offset`;
/// used to keep streams distinct across e.g. flux samples in one run.
#[allow(clippy::too_many_arguments)]
pub fn run_ensemble_indexed(
    psi0: &[Complex64],
    heff: &dyn LinearOp,
    jumps: &[&dyn LinearOp],
    t_grid: &[f64],
    m: usize,
    seed: u64,
    index_offset: u64,
    observables: &ObservableSpec,
) -> Result<EnsembleResult> {
    if m == 0 {
        return Err(Error::domain("ensemble needs at least one trajectory"));
    }
    if t_grid.len() < 2 || t_grid[0] != 0.0 {
        return Err(Error::domain("time grid must start at 0 with ≥ 2 points"));
    }
    let dt = t_grid[1] - t_grid[0];
    for w in t_grid.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-12 * dt.max(1.0) {
            return Err(Error::domain("time grid must be uniform"));
        }
    }
    let dim = psi0.len();
    if heff.dim() != dim || jumps.iter().any(|j| j.dim() != dim) {
        return Err(Error::dimension("operator dimensions do not match the state"));
    }
    let reference = observables
        .reference_state
        .clone()
        .unwrap_or_else(|| psi0.to_vec());
    let n_times = t_grid.len();
    let checkpoints = &observables.density_checkpoints;
    for &c in checkpoints {
        if c >= n_times {
            return Err(Error::domain(format!(
                "density checkpoint {c} outside the time grid"
            )));
        }
    }

    let chunk_ids: Vec<usize> = (0..m.div_ceil(REDUCTION_CHUNK)).collect();
    let chunks: Vec<ChunkAccum> = chunk_ids
        .par_iter()
        .map(|&chunk| {
            let lo = chunk * REDUCTION_CHUNK;
            let hi = (lo + REDUCTION_CHUNK).min(m);
            let mut acc = ChunkAccum {
                g_sum: vec![0.0; n_times],
                g_sq_sum: vec![0.0; n_times],
                rho_sum: checkpoints.iter().map(|_| CMat::zeros((dim, dim))).collect(),
                jumps: 0,
                aborted: 0,
                count: 0,
            };
            let mut ws = McwfWorkspace::new(dim, jumps.len());
            for idx in lo..hi {
                let mut state = TrajectoryState::new(psi0, seed, index_offset + idx as u64);
                let mut g_traj = vec![0.0; n_times];
                let mut rho_traj: Vec<Option<(usize, Vec<Complex64>)>> =
                    checkpoints.iter().map(|_| None).collect();
                let record =
                    |st: &TrajectoryState, gi: usize, g: &mut [f64], rho: &mut [Option<(usize, Vec<Complex64>)>]| {
                        let a: Complex64 = reference
                            .iter()
                            .zip(st.psi.iter())
                            .map(|(r, p)| r.conj() * p)
                            .sum();
                        g[gi] = a.norm_sqr();
                        for (slot, &cp) in rho.iter_mut().zip(checkpoints.iter()) {
                            if cp == gi {
                                *slot = Some((cp, st.psi.clone()));
                            }
                        }
                    };
                record(&state, 0, &mut g_traj, &mut rho_traj);
                let mut failed = false;
                for gi in 1..n_times {
                    match mcwf_step_with(&mut state, heff, jumps, dt, &mut ws) {
                        Ok(_) => record(&state, gi, &mut g_traj, &mut rho_traj),
                        Err(_) => {
                            failed = true;
                            break;
                        }
                    }
                }
                if failed {
                    acc.aborted += 1;
                    continue;
                }
                acc.count += 1;
                acc.jumps += state.jump_log.len();
                for (s, g) in acc.g_sum.iter_mut().zip(g_traj.iter()) {
                    *s += g;
                }
                for (s, g) in acc.g_sq_sum.iter_mut().zip(g_traj.iter()) {
                    *s += g * g;
                }
                for (slot, rho) in rho_traj.into_iter().flatten().zip(acc.rho_sum.iter_mut()) {
                    let (_, psi) = slot;
                    for (i, a) in psi.iter().enumerate() {
                        for (j, b) in psi.iter().enumerate() {
                            rho[[i, j]] += a * b.conj();
                        }
                    }
                }
            }
            acc
        })
        .collect();

    let mut g_sum = vec![0.0; n_times];
    let mut g_sq_sum = vec![0.0; n_times];
    let mut rho_sum: Vec<CMat> = checkpoints.iter().map(|_| CMat::zeros((dim, dim))).collect();
    let mut total_jumps = 0usize;
    let mut aborted = 0usize;
    let mut completed = 0usize;
    for acc in chunks {
        for (a, b) in g_sum.iter_mut().zip(acc.g_sum.iter()) {
            *a += b;
        }
        for (a, b) in g_sq_sum.iter_mut().zip(acc.g_sq_sum.iter()) {
            *a += b;
        }
        for (a, b) in rho_sum.iter_mut().zip(acc.rho_sum.iter()) {
            *a = &*a + b;
        }
        total_jumps += acc.jumps;
        aborted += acc.aborted;
        completed += acc.count;
    }
    if aborted * 100 > m {
        return Err(Error::numeric(format!(
            "{aborted} of {m} trajectories aborted (> 1%)"
        )));
    }
    if completed == 0 {
        return Err(Error::numeric("all trajectories aborted"));
    }
    let mf = completed as f64;
    let return_probability: Vec<f64> = g_sum.iter().map(|s| s / mf).collect();
    let return_probability_stderr: Vec<f64> = g_sq_sum
        .iter()
        .zip(return_probability.iter())
        .map(|(sq, mean)| {
            if completed < 2 {
                0.0
            } else {
                let var = (sq / mf - mean * mean).max(0.0) * mf / (mf - 1.0);
                (var / mf).sqrt()
            }
        })
        .collect();
    let reconstructed_rho = checkpoints
        .iter()
        .zip(rho_sum)
        .map(|(&cp, rho)| (cp, rho / Complex64::new(mf, 0.0)))
        .collect();

    Ok(EnsembleResult {
        times: t_grid.to_vec(),
        trajectories: completed,
        return_probability,
        return_probability_stderr,
        reconstructed_rho,
        mean_jumps_per_trajectory: total_jumps as f64 / mf,
        aborted_trajectories: aborted,
    })
}

/// tr ρ² of a density matrix.
pub fn purity(rho: &CMat) -> f64 {
    rho.dot(rho).diag().iter().map(|z| z.re).sum()
}

/// Trace distance ½‖ρ − σ‖₁ of Hermitian matrices.
pub fn trace_distance(rho: &CMat, sigma: &CMat) -> Result<f64> {
    use ndarray_linalg::Eigh;
    let diff = rho - sigma;
    let herm = (&diff + &crate::linalg::dagger(&diff)) * Complex64::new(0.5, 0.0);
    let (vals, _) = herm
        .eigh(ndarray_linalg::UPLO::Lower)
        .map_err(|e| Error::numeric(format!("eigh failed: {e}")))?;
    Ok(vals.iter().map(|v| v.abs()).sum::<f64>() / 2.0)
}
