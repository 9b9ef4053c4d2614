//! Periodic two-band chain with two-body loss/gain per unit cell.
//!
//! Modes are ordered (cell 0: A, B), (cell 1: A, B), … with mode(x, A) = 2x,
//! mode(x, B) = 2x + 1. The kinetic term is the momentum-space
//! `Σ_k c†_k d(k)·σ c_k` with flux entering as k_j = 2πj/N + φ/N, transformed
//! to the real-space Fock basis. The effective Hamiltonian adds
//! `−(i/2)(γ_l + γ_g) Σ_x n_{xA} n_{xB} − (i/2) γ_g Σ_x (1 − n_{xA} − n_{xB})`
//! and the jump operators are `√γ_l c_{xA} c_{xB}` and `√γ_g c†_{xA} c†_{xB}`.
//!
//! Operators are stored column-sparse; dense conversions are for small cell
//! counts only.

use super::{two_band_bloch, BlochModel, JumpKind};
use crate::error::{Error, Result};
use crate::fock::{annihilate, create, OccupationBasis};
use crate::linalg;
use crate::models::lower_band_state;
use crate::sparse::CsMat;
use crate::{CMat, CVec};
use num_complex::Complex64;

const MAX_CELLS: usize = 8;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Effective Hamiltonian and jump operators of the chain on the 2N-mode
/// Fock space.
#[derive(Debug, Clone)]
pub struct ChainOperators {
    pub basis: OccupationBasis,
    pub n_cells: usize,
    pub heff: CsMat,
    /// Loss jumps for each cell, then gain jumps for each cell (only the
    /// channels with nonzero strength are present).
    pub jumps: Vec<CsMat>,
    pub gamma_l: f64,
    pub gamma_g: f64,
}

impl ChainOperators {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn heff_dense(&self) -> CMat {
        self.heff.to_dense()
    }

    pub fn jumps_dense(&self) -> Vec<CMat> {
        self.jumps.iter().map(|j| j.to_dense()).collect()
    }

    /// Basis indices of the n-particle sector.
    pub fn sector_indices(&self, n: u32) -> Vec<usize> {
        self.basis
            .states()
            .iter()
            .enumerate()
            .filter(|(_, s)| s.count_ones() == n)
            .map(|(i, _)| i)
            .collect()
    }

    /// Dense block of H_eff within the n-particle sector.
    pub fn heff_sector_dense(&self, n: u32) -> (CMat, Vec<usize>) {
        let idx = self.sector_indices(n);
        (self.heff.dense_block(&idx, &idx), idx)
    }
}

/// Allowed momenta of an N-cell ring threaded by flux φ.
pub fn chain_momenta(n_cells: usize, flux: f64) -> Vec<f64> {
    (0..n_cells)
        .map(|j| 2.0 * std::f64::consts::PI * j as f64 / n_cells as f64 + flux / n_cells as f64)
        .collect()
}

/// Builds the chain operators. Loss/gain strengths are read from the model's
/// dissipator list (summed per kind; the two-body jumps act on the full A-B
/// pair of each cell, so the orbital tag is ignored).
#[allow(clippy::needless_range_loop)] // orbital indices address both hop[] and mode ids
pub fn many_body_chain(n_cells: usize, model: &BlochModel, flux: f64) -> Result<ChainOperators> {
    if n_cells == 0 {
        return Err(Error::domain("chain needs at least one cell"));
    }
    if n_cells > MAX_CELLS {
        return Err(Error::capacity(format!(
            "{n_cells} cells exceeds the supported maximum of {MAX_CELLS}"
        )));
    }
    model.validate()?;
    let gamma_l = model.strength(JumpKind::Loss);
    let gamma_g = model.strength(JumpKind::Gain);
    let num_modes = 2 * n_cells;
    let basis = OccupationBasis::full(num_modes)?;
    let dim = basis.len();
    let momenta = chain_momenta(n_cells, flux);
    let n = n_cells as f64;

    // Real-space hopping amplitudes T_{(x,α),(x',β)} = (1/N) Σ_j h_{αβ}(k_j) e^{i k_j (x−x')}.
    // The signed cell separation matters: with flux, e^{i k_j N} = e^{iφ} ≠ 1,
    // so the wrap-around bonds carry the Peierls phase.
    let offset = n_cells as i64 - 1;
    let mut hop = vec![[[c(0.0, 0.0); 2]; 2]; 2 * n_cells - 1]; // index = (x−x') + N − 1
    for (r, entry) in hop.iter_mut().enumerate() {
        let delta = r as i64 - offset;
        for &k in &momenta {
            let h = two_band_bloch(k, model);
            let phase = Complex64::from_polar(1.0 / n, k * delta as f64);
            for a in 0..2 {
                for b in 0..2 {
                    entry[a][b] += h[[a, b]] * phase;
                }
            }
        }
    }

    let mut triplets: Vec<(usize, usize, Complex64)> = Vec::new();
    for (col, &s) in basis.states().iter().enumerate() {
        // Kinetic hops c†_p c_q. The Fourier coefficient depends on the cell
        // separation (x_p − x_q) mod N; the flux phase of the wrap-around bond
        // is contained in the k_j offsets.
        for xq in 0..n_cells {
            for bq in 0..2 {
                let q = 2 * xq + bq;
                let Some((s1, sign1)) = annihilate(s, q) else {
                    continue;
                };
                for xp in 0..n_cells {
                    for bp in 0..2 {
                        let p = 2 * xp + bp;
                        let coeff = hop[(xp as i64 - xq as i64 + offset) as usize][bp][bq];
                        if coeff.norm() < 1e-15 {
                            continue;
                        }
                        let Some((s2, sign2)) = create(s1, p) else {
                            continue;
                        };
                        triplets.push((
                            basis.index_of(s2).unwrap(),
                            col,
                            coeff * c(sign1 * sign2, 0.0),
                        ));
                    }
                }
            }
        }
        // Imaginary diagonal from the dissipators.
        let mut diag = c(0.0, 0.0);
        for x in 0..n_cells {
            let na = (s >> (2 * x)) & 1;
            let nb = (s >> (2 * x + 1)) & 1;
            diag += c(0.0, -0.5 * (gamma_l + gamma_g) * (na * nb) as f64);
            diag += c(0.0, -0.5 * gamma_g * (1.0 - na as f64 - nb as f64));
        }
        if diag != c(0.0, 0.0) {
            triplets.push((col, col, diag));
        }
    }
    let heff = CsMat::from_triplets(dim, dim, triplets)?;

    let mut jumps = Vec::new();
    if gamma_l > 0.0 {
        for x in 0..n_cells {
            let mut tr = Vec::new();
            for (col, &s) in basis.states().iter().enumerate() {
                // √γ_l c_{xA} c_{xB}: apply c_B, then c_A.
                if let Some((s1, sg1)) = annihilate(s, 2 * x + 1) {
                    if let Some((s2, sg2)) = annihilate(s1, 2 * x) {
                        tr.push((
                            basis.index_of(s2).unwrap(),
                            col,
                            c(gamma_l.sqrt() * sg1 * sg2, 0.0),
                        ));
                    }
                }
            }
            jumps.push(CsMat::from_triplets(dim, dim, tr)?);
        }
    }
    if gamma_g > 0.0 {
        for x in 0..n_cells {
            let mut tr = Vec::new();
            for (col, &s) in basis.states().iter().enumerate() {
                // √γ_g c†_{xA} c†_{xB}: apply c†_B, then c†_A.
                if let Some((s1, sg1)) = create(s, 2 * x + 1) {
                    if let Some((s2, sg2)) = create(s1, 2 * x) {
                        tr.push((
                            basis.index_of(s2).unwrap(),
                            col,
                            c(gamma_g.sqrt() * sg1 * sg2, 0.0),
                        ));
                    }
                }
            }
            jumps.push(CsMat::from_triplets(dim, dim, tr)?);
        }
    }

    Ok(ChainOperators {
        basis,
        n_cells,
        heff,
        jumps,
        gamma_l,
        gamma_g,
    })
}

/// Half-filled Slater determinant `Π_j b†_{−,k_j} |0⟩` of the pre-quench
/// chain, as a normalized Fock-space vector.
pub fn slater_ground_state(n_cells: usize, pre: &BlochModel, flux: f64) -> Result<CVec> {
    if n_cells == 0 {
        return Err(Error::domain("chain needs at least one cell"));
    }
    if n_cells > MAX_CELLS {
        return Err(Error::capacity(format!(
            "{n_cells} cells exceeds the supported maximum of {MAX_CELLS}"
        )));
    }
    let basis = OccupationBasis::full(2 * n_cells)?;
    let dim = basis.len();
    let n = n_cells as f64;
    let mut psi = CVec::zeros(dim);
    psi[0] = c(1.0, 0.0); // vacuum is state 0

    for &k in &chain_momenta(n_cells, flux) {
        let v = lower_band_state(k, pre)?; // errors at gap closures
        // b†_{−,k} = Σ_x e^{ikx}/√N (v_A c†_{xA} + v_B c†_{xB})
        let mut next = CVec::zeros(dim);
        for (idx, &amp) in psi.iter().enumerate() {
            if amp == c(0.0, 0.0) {
                continue;
            }
            let state = basis.state(idx);
            for x in 0..n_cells {
                let phase = Complex64::from_polar(1.0 / n.sqrt(), k * x as f64);
                for (orb, comp) in [(0usize, v[0]), (1, v[1])] {
                    if let Some((s2, sign)) = create(state, 2 * x + orb) {
                        next[basis.index_of(s2).unwrap()] += amp * phase * comp * c(sign, 0.0);
                    }
                }
            }
        }
        psi = next;
    }
    let nrm = linalg::norm(&psi);
    if nrm < 1e-12 {
        return Err(Error::numeric("Slater construction produced a null vector"));
    }
    Ok(psi / c(nrm, 0.0))
}

/// Ground-state energy `Σ_j ε₋(k_j)` of the pre-quench chain.
pub fn pre_quench_energy(n_cells: usize, pre: &BlochModel, flux: f64) -> f64 {
    chain_momenta(n_cells, flux)
        .iter()
        .map(|&k| -pre.d_vector.magnitude(k))
        .sum()
}
