//! Two-band momentum-space model with sublattice loss/gain.
//!
//! Each momentum sector is a 2-mode Fock space {|00⟩, |10⟩, |01⟩, |11⟩}
//! (mode 0 = orbital A, mode 1 = orbital B). The Bloch Hamiltonian is
//! `d(k)·σ` with bands ±|d(k)|; dissipators are `√γ_l c_{A/B}` and
//! `√γ_g c†_{A/B}`.

use super::{BlochModel, JumpKind, Orbital};
use crate::error::{Error, Result};
use crate::fock::{operator_matrix, OccupationBasis, OperatorKind};
use crate::linalg;
use crate::liouvillian::Liouvillian;
use crate::{CMat, CVec};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Bloch Hamiltonian `d(k)·σ` (2×2, Hermitian, traceless).
pub fn two_band_bloch(k: f64, model: &BlochModel) -> CMat {
    let [dx, dy, dz] = model.d_vector.at(k);
    ndarray::array![
        [c(dz, 0.0), c(dx, -dy)],
        [c(dx, dy), c(-dz, 0.0)]
    ]
}

/// Normalized lower-band eigenvector of `d(k)·σ` with a deterministic global
/// phase: the first component of largest modulus is made real positive.
pub fn lower_band_state(k: f64, model: &BlochModel) -> Result<CVec> {
    let [dx, dy, dz] = model.d_vector.at(k);
    let d = (dx * dx + dy * dy + dz * dz).sqrt();
    if d < 1e-12 {
        return Err(Error::domain(format!(
            "gap closes at k = {k}: |d| = {d:.3e}"
        )));
    }
    // Eigenvector for eigenvalue −d: (d_z + d) |v⟩_A + (d_x − i d_y)|v⟩_B … use
    // the numerically stable branch.
    let mut v = if (dz + d).abs() > (dz - d).abs() {
        // v ∝ (−(dx − i dy), dz + d)
        CVec::from_vec(vec![c(-dx, dy), c(dz + d, 0.0)])
    } else {
        // v ∝ (dz − d, dx + i dy)
        CVec::from_vec(vec![c(dz - d, 0.0), c(dx, dy)])
    };
    let nrm = linalg::norm(&v);
    v /= c(nrm, 0.0);
    // Deterministic phase: first nonzero component real positive.
    let pivot = if v[0].norm() > 1e-12 { v[0] } else { v[1] };
    let phase = pivot / c(pivot.norm(), 0.0);
    Ok(v / phase)
}

/// Fock-space Hamiltonian `Σ_{αβ} [d·σ]_{αβ} c†_α c_β` on the 4-dim space.
pub fn single_k_hamiltonian(k: f64, model: &BlochModel) -> CMat {
    let h = two_band_bloch(k, model);
    let basis = OccupationBasis::full(2).unwrap();
    let ops: Vec<CMat> = (0..2)
        .map(|m| {
            operator_matrix(&basis, m, OperatorKind::Annihilation)
                .unwrap()
                .matrix
        })
        .collect();
    let mut out = CMat::zeros((4, 4));
    for alpha in 0..2 {
        for beta in 0..2 {
            if h[[alpha, beta]] != c(0.0, 0.0) {
                out = out + linalg::dagger(&ops[alpha]).dot(&ops[beta]) * h[[alpha, beta]];
            }
        }
    }
    out
}

/// Fock-space jump matrices `√γ c_{A/B}` / `√γ c†_{A/B}` for each dissipator.
pub fn single_k_jump_operators(model: &BlochModel) -> Result<Vec<CMat>> {
    model.validate()?;
    let basis = OccupationBasis::full(2).unwrap();
    model
        .dissipators
        .iter()
        .map(|d| {
            let mode = match d.orbital {
                Orbital::A => 0,
                Orbital::B => 1,
            };
            let kind = match d.kind {
                JumpKind::Loss => OperatorKind::Annihilation,
                JumpKind::Gain => OperatorKind::Creation,
            };
            let op = operator_matrix(&basis, mode, kind)?.matrix;
            Ok(op * c(d.strength.sqrt(), 0.0))
        })
        .collect()
}

/// Full 16×16 Liouvillian of one momentum sector, with charge labels.
pub fn single_k_liouvillian(k: f64, model: &BlochModel) -> Result<Liouvillian> {
    let h = single_k_hamiltonian(k, model);
    let jumps = single_k_jump_operators(model)?;
    let basis = OccupationBasis::full(2).unwrap();
    Liouvillian::build_with_charges(&h, &jumps, &basis.particle_numbers())
}

/// Initial data for a quench at momentum `k`: the lower-band state of the
/// pre-quench model embedded in the 4-dim Fock space, and its projector.
pub fn single_k_initial_state(k: f64, pre: &BlochModel) -> Result<(CVec, CMat)> {
    let v = lower_band_state(k, pre)?;
    // b†₋|0⟩ = v_A |10⟩ + v_B |01⟩ (basis order |00⟩,|10⟩,|01⟩,|11⟩).
    let mut psi = CVec::zeros(4);
    psi[1] = v[0];
    psi[2] = v[1];
    let rho = CMat::from_shape_fn((4, 4), |(i, j)| psi[i] * psi[j].conj());
    Ok((psi, rho))
}

/// Winding number of `(d_x, d_y)` about the origin by discrete angle
/// accumulation over `n_points` momenta.
pub fn winding_number(model: &BlochModel, n_points: usize) -> i32 {
    let mut total = 0.0;
    let mut prev = {
        let d = model.d_vector.at(0.0);
        d[1].atan2(d[0])
    };
    for j in 1..=n_points {
        let k = 2.0 * std::f64::consts::PI * j as f64 / n_points as f64;
        let d = model.d_vector.at(k);
        let ang = d[1].atan2(d[0]);
        let mut delta = ang - prev;
        while delta > std::f64::consts::PI {
            delta -= 2.0 * std::f64::consts::PI;
        }
        while delta < -std::f64::consts::PI {
            delta += 2.0 * std::f64::consts::PI;
        }
        total += delta;
        prev = ang;
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i32
}
