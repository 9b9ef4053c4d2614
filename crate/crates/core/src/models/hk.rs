//! Momentum-local interacting model with spin-density interaction.
//!
//! Per momentum k there are four modes ordered (A↑, B↑, A↓, B↓); occupation
//! labels |n_{A↑} n_{B↑} n_{A↓} n_{B↓}⟩ follow that order. The kinetic part
//! is one copy of `d(k)·σ` per spin; the interaction couples the total
//! populations of the rotated spin species ←/→ (c†_± = (c†_↑ ∓ c†_↓)/√2):
//! with the two-particle matrix convention used throughout, the Fock-space
//! interaction operator is `4U · n̂_← n̂_→`.
//!
//! The quench starts from the half-filled ground state of
//! `d₀(k) = (1/2 + cos k, 0, sin k)` and evolves under
//! `d₁(k) = (3/2 + cos k, 0, sin k)` with a spin-↑ gain dissipator
//! `√γ↑_g c†_{A↑}` (plus an optional spin-↑ loss `√γ↑_l c_{A↑}`).

use super::{lower_band_state, BlochModel, DVector};
use crate::error::Result;
use crate::fock::{create, operator_matrix, OccupationBasis, OperatorKind};
use crate::linalg;
use crate::liouvillian::Liouvillian;
use crate::{CMat, CVec};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pre-quench d-vector of the interacting model.
pub fn hk_pre_quench() -> BlochModel {
    BlochModel::new(DVector::TiltedXz {
        offset: 0.5,
        hopping: 1.0,
    })
}

/// Post-quench d-vector of the interacting model.
pub fn hk_post_quench() -> BlochModel {
    BlochModel::new(DVector::TiltedXz {
        offset: 1.5,
        hopping: 1.0,
    })
}

/// Indices of the spin-symmetric two-particle basis
/// {|1010⟩, |1001⟩, |0110⟩, |0101⟩} inside a full 4-mode basis.
pub fn two_particle_basis_indices(basis: &OccupationBasis) -> [usize; 4] {
    // masks: |1010⟩ = 0b0101, |1001⟩ = 0b1001, |0110⟩ = 0b0110, |0101⟩ = 0b1010
    [
        basis.index_of(0b0101).unwrap(),
        basis.index_of(0b1001).unwrap(),
        basis.index_of(0b0110).unwrap(),
        basis.index_of(0b1010).unwrap(),
    ]
}

/// Post-quench two-particle effective non-Hermitian Hamiltonian on
/// {|1010⟩, |1001⟩, |0110⟩, |0101⟩}, with interaction parameter `V ≡ U`:
///
/// ```text
/// ( 4V + 2d_z    d_x          d_x          0                    )
/// ( d_x          2V           2V           d_x                  )
/// ( d_x          2V           2V − iγ/2    d_x                  )
/// ( 0            d_x          d_x          4V − 2d_z − iγ/2     )
/// ```
pub fn hk_two_particle_heff(k: f64, u: f64, gamma_up_gain: f64) -> CMat {
    let [dx, _, dz] = hk_post_quench().d_vector.at(k);
    let v = u;
    let g2 = c(0.0, -gamma_up_gain / 2.0);
    ndarray::array![
        [c(4.0 * v + 2.0 * dz, 0.0), c(dx, 0.0), c(dx, 0.0), c(0.0, 0.0)],
        [c(dx, 0.0), c(2.0 * v, 0.0), c(2.0 * v, 0.0), c(dx, 0.0)],
        [c(dx, 0.0), c(2.0 * v, 0.0), c(2.0 * v, 0.0) + g2, c(dx, 0.0)],
        [
            c(0.0, 0.0),
            c(dx, 0.0),
            c(dx, 0.0),
            c(4.0 * v - 2.0 * dz, 0.0) + g2
        ],
    ]
}

/// Triplet projector (3×4) from {|1010⟩,|1001⟩,|0110⟩,|0101⟩} onto
/// {t₁, t₀, t₋₁} with t₀ = (|1001⟩+|0110⟩)/√2.
pub fn triplet_projector() -> CMat {
    let s = 1.0 / 2.0_f64.sqrt();
    ndarray::array![
        [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
    ]
}

/// Infinite-interaction triplet Hamiltonian h(k): the projector sandwich of
/// [`hk_two_particle_heff`] with the diverging constant `4V − iγ/4` removed.
pub fn hk_triplet_hamiltonian(k: f64, gamma_up_gain: f64) -> CMat {
    let [dx, _, dz] = hk_post_quench().d_vector.at(k);
    let a = c(2.0 * dz, 0.0) + c(0.0, gamma_up_gain / 4.0);
    let b = c(2.0_f64.sqrt() * dx, 0.0);
    let zero = c(0.0, 0.0);
    ndarray::array![
        [a, b, zero],
        [b, zero, b],
        [zero, b, -a],
    ]
}

/// Closed-form triplet eigenvalue
/// `ε_k = √((iγ/4 + 2 sin k)² + 4 (3/2 + cos k)²)` (principal branch);
/// the spectrum of h(k) is {0, ±ε_k}.
pub fn triplet_eigenvalue(k: f64, gamma_up_gain: f64) -> Complex64 {
    let a = c(2.0 * k.sin(), 0.0) + c(0.0, gamma_up_gain / 4.0);
    let dx = 1.5 + k.cos();
    (a * a + c(4.0 * dx * dx, 0.0)).sqrt()
}

/// Half-filled initial state on {|1010⟩,|1001⟩,|0110⟩,|0101⟩}:
/// `((v_A)², v_A v_B, v_A v_B, (v_B)²)` from the pre-quench lower band.
pub fn hk_two_particle_initial_state(k: f64) -> Result<CVec> {
    let v = lower_band_state(k, &hk_pre_quench())?;
    let (va, vb) = (v[0], v[1]);
    Ok(CVec::from_vec(vec![va * va, va * vb, va * vb, vb * vb]))
}

/// The initial state projected into the triplet basis:
/// `((v_A)², √2 v_A v_B, (v_B)²)`.
pub fn hk_triplet_initial_state(k: f64) -> Result<CVec> {
    let psi = hk_two_particle_initial_state(k)?;
    let p = triplet_projector();
    Ok(p.dot(&psi))
}

/// Full 16-dim Fock Hamiltonian at momentum k: kinetic `Σ_σ d₁·σ` plus the
/// interaction `4U n̂_← n̂_→`.
pub fn hk_fock_hamiltonian(k: f64, u: f64) -> CMat {
    let basis = OccupationBasis::full(4).unwrap();
    let h2 = super::two_band_bloch(k, &hk_post_quench());
    let ann: Vec<CMat> = (0..4)
        .map(|m| operator_matrix(&basis, m, OperatorKind::Annihilation).unwrap().matrix)
        .collect();
    let mut h = CMat::zeros((16, 16));
    // Kinetic: spin ↑ on modes (0,1), spin ↓ on modes (2,3).
    for (a_up, b_up) in [(0usize, 1usize), (2, 3)] {
        for (i, mi) in [(0usize, a_up), (1, b_up)] {
            for (j, mj) in [(0usize, a_up), (1, b_up)] {
                if h2[[i, j]] != c(0.0, 0.0) {
                    h = h + linalg::dagger(&ann[mi]).dot(&ann[mj]) * h2[[i, j]];
                }
            }
        }
    }
    if u != 0.0 {
        // c_{o←} = (c_{o↑} − c_{o↓})/√2, c_{o→} = (c_{o↑} + c_{o↓})/√2 per orbital.
        let s = c(1.0 / 2.0_f64.sqrt(), 0.0);
        let mut n_left = CMat::zeros((16, 16));
        let mut n_right = CMat::zeros((16, 16));
        for (up, down) in [(0usize, 2usize), (1, 3)] {
            let c_left = (&ann[up] - &ann[down]) * s;
            let c_right = (&ann[up] + &ann[down]) * s;
            n_left = n_left + linalg::dagger(&c_left).dot(&c_left);
            n_right = n_right + linalg::dagger(&c_right).dot(&c_right);
        }
        h = h + n_left.dot(&n_right) * c(4.0 * u, 0.0);
    }
    h
}

/// Spin-↑ dissipators on orbital A: gain `√γ_g c†_{A↑}` and, when nonzero,
/// loss `√γ_l c_{A↑}`.
pub fn hk_jump_operators(gamma_up_gain: f64, gamma_up_loss: f64) -> Vec<CMat> {
    let basis = OccupationBasis::full(4).unwrap();
    let mut jumps = Vec::new();
    if gamma_up_gain > 0.0 {
        let op = operator_matrix(&basis, 0, OperatorKind::Creation).unwrap().matrix;
        jumps.push(op * c(gamma_up_gain.sqrt(), 0.0));
    }
    if gamma_up_loss > 0.0 {
        let op = operator_matrix(&basis, 0, OperatorKind::Annihilation).unwrap().matrix;
        jumps.push(op * c(gamma_up_loss.sqrt(), 0.0));
    }
    jumps
}

/// Full 256×256 Liouvillian at momentum k with charge labels.
pub fn hk_liouvillian(k: f64, u: f64, gamma_up_gain: f64, gamma_up_loss: f64) -> Result<Liouvillian> {
    let h = hk_fock_hamiltonian(k, u);
    let jumps = hk_jump_operators(gamma_up_gain, gamma_up_loss);
    let basis = OccupationBasis::full(4).unwrap();
    Liouvillian::build_with_charges(&h, &jumps, &basis.particle_numbers())
}

/// Half-filled initial state in the 16-dim Fock space:
/// `b†_{−↑} b†_{−↓} |0⟩` built from the pre-quench lower band.
pub fn hk_initial_state(k: f64) -> Result<CVec> {
    let v = lower_band_state(k, &hk_pre_quench())?;
    let basis = OccupationBasis::full(4).unwrap();
    let mut psi = CVec::zeros(16);
    psi[basis.index_of(0).unwrap()] = c(1.0, 0.0);
    // Apply b†_↓ (modes 2, 3), then b†_↑ (modes 0, 1).
    for modes in [[2usize, 3usize], [0, 1]] {
        let mut next = CVec::zeros(16);
        for (idx, &amp) in psi.iter().enumerate() {
            if amp == c(0.0, 0.0) {
                continue;
            }
            let state = basis.state(idx);
            for (comp, &mode) in v.iter().zip(modes.iter()) {
                if let Some((s2, sign)) = create(state, mode) {
                    next[basis.index_of(s2).unwrap()] += comp * c(sign, 0.0) * amp;
                }
            }
        }
        psi = next;
    }
    let nrm = linalg::norm(&psi);
    Ok(psi / c(nrm, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigensystem, max_abs, vdot};

    #[test]
    fn displayed_matrix_entries() {
        let k = 0.9;
        let u = 3.0;
        let g = 0.5;
        let h = hk_two_particle_heff(k, u, g);
        let dz = k.sin();
        let dx = 1.5 + k.cos();
        assert!((h[[0, 0]] - c(4.0 * u + 2.0 * dz, 0.0)).norm() < 1e-14);
        assert!((h[[1, 2]] - c(2.0 * u, 0.0)).norm() < 1e-14);
        assert!((h[[3, 3]] - (c(4.0 * u - 2.0 * dz, 0.0) + c(0.0, -g / 2.0))).norm() < 1e-14);
        assert!((h[[0, 1]] - c(dx, 0.0)).norm() < 1e-14);
        assert_eq!(h[[0, 3]], c(0.0, 0.0));
    }

    #[test]
    fn noninteracting_closed_limit_decouples_spins() {
        // U = 0, γ = 0: H restricted to one-particle-per-spin states is the
        // direct sum of two d·σ copies: diagonal 2d_z/0/0/−2d_z and d_x hops.
        let k = 1.3;
        let h = hk_two_particle_heff(k, 0.0, 0.0);
        let dz = k.sin();
        let dx = 1.5 + k.cos();
        let expect = ndarray::array![
            [c(2.0 * dz, 0.0), c(dx, 0.0), c(dx, 0.0), c(0.0, 0.0)],
            [c(dx, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(dx, 0.0)],
            [c(dx, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(dx, 0.0)],
            [c(0.0, 0.0), c(dx, 0.0), c(dx, 0.0), c(-2.0 * dz, 0.0)],
        ];
        assert!(max_abs(&(&h - &expect)) < 1e-12);
    }

    #[test]
    fn singlet_decouples_at_large_interaction() {
        // Coupling between the singlet (|1001⟩−|0110⟩)/√2 and the triplet
        // space is γ/4, independent of U, hence ≤ d_x at the tested k.
        let k = 0.4;
        let g = 0.5;
        let h = hk_two_particle_heff(k, 80.0, g);
        let s = 1.0 / 2.0_f64.sqrt();
        let singlet = CVec::from_vec(vec![c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)]);
        let hs = h.dot(&singlet);
        // Component outside the singlet direction couples only to t₀ with
        // weight γ/4, independent of U.
        let proj = vdot(&singlet, &hs);
        let residual = &hs - &singlet.mapv(|z| z * proj);
        let coupling = residual.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let dx = 1.5 + k.cos();
        assert!(coupling <= dx);
        assert!((coupling - g / 4.0).abs() < 1e-10);
    }

    #[test]
    fn triplet_sandwich_matches_projector_construction() {
        let k = 2.2;
        let g = 0.5;
        let u = 50_000.0;
        let p = triplet_projector();
        let h2 = hk_two_particle_heff(k, u, g);
        let sandwich = p.dot(&h2).dot(&linalg::dagger(&p));
        let shift = c(4.0 * u, 0.0) + c(0.0, -g / 4.0);
        let centered = &sandwich - &(CMat::eye(3) * shift);
        let direct = hk_triplet_hamiltonian(k, g);
        assert!(max_abs(&(&centered - &direct)) < 1e-9);
    }

    #[test]
    fn triplet_spectrum_closed_form() {
        for (k, g) in [(0.0, 0.0), (1.1, 0.5), (4.0, 0.5)] {
            let h = hk_triplet_hamiltonian(k, g);
            let es = eigensystem(&h).unwrap();
            let eps = triplet_eigenvalue(k, g);
            let mut vals = es.values.clone();
            vals.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
            assert!(vals[0].norm() < 1e-10, "zero eigenvalue missing");
            let pair = [vals[1], vals[2]];
            for v in pair {
                assert!(
                    (v - eps).norm() < 1e-10 || (v + eps).norm() < 1e-10,
                    "eigenvalue {v} does not match ±{eps}"
                );
            }
        }
        // k = 0, γ = 0: ε = √(4·(5/2)²) = 5.
        assert!((triplet_eigenvalue(0.0, 0.0) - c(5.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn hermitian_limit_spectrum_is_real_symmetric() {
        let h = hk_triplet_hamiltonian(0.8, 0.0);
        let es = eigensystem(&h).unwrap();
        for v in &es.values {
            assert!(v.im.abs() < 1e-10);
        }
        assert!((es.values[0].re + es.values[2].re).abs() < 1e-10);
    }

    #[test]
    fn fock_restriction_reproduces_two_particle_matrix() {
        let k = 1.7;
        let u = 7.0;
        let g = 0.5;
        let h = hk_fock_hamiltonian(k, u);
        let jumps = hk_jump_operators(g, 0.0);
        let mut heff = h.clone();
        for l in &jumps {
            heff = heff - linalg::dagger(l).dot(l) * c(0.0, 0.5);
        }
        let basis = OccupationBasis::full(4).unwrap();
        let idx = two_particle_basis_indices(&basis);
        let mut block = CMat::zeros((4, 4));
        for (r, &i) in idx.iter().enumerate() {
            for (cc, &j) in idx.iter().enumerate() {
                block[[r, cc]] = heff[[i, j]];
            }
        }
        // The γ-gain on A↑ also contributes −iγ/2·(1 − n_{A↑}) as a constant
        // on states with A↑ empty — exactly the displayed placement.
        let expect = hk_two_particle_heff(k, u, g);
        assert!(max_abs(&(&block - &expect)) < 1e-12);
    }

    #[test]
    fn initial_state_components_and_norm() {
        let k = 0.7;
        let psi4 = hk_two_particle_initial_state(k).unwrap();
        let norm2: f64 = psi4.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm2 - 1.0).abs() < 1e-12);

        let psi16 = hk_initial_state(k).unwrap();
        let basis = OccupationBasis::full(4).unwrap();
        let idx = two_particle_basis_indices(&basis);
        for (a, &i) in psi4.iter().zip(idx.iter()) {
            assert!((a - psi16[i]).norm() < 1e-12);
        }
        // No weight on |1100⟩ or |0011⟩.
        assert!(psi16[basis.index_of(0b0011).unwrap()].norm() < 1e-14);
        assert!(psi16[basis.index_of(0b1100).unwrap()].norm() < 1e-14);
    }
}
