//! Physical model builders: the two-band momentum-space lattice model, the
//! Hatsugai-Kohmoto interacting model, and periodic chains with two-body
//! loss/gain.

mod chain;
mod hk;
mod two_band;

pub use chain::{
    chain_momenta, many_body_chain, pre_quench_energy, slater_ground_state, ChainOperators,
};
pub use hk::{
    hk_fock_hamiltonian, hk_initial_state, hk_jump_operators, hk_liouvillian, hk_post_quench,
    hk_pre_quench, hk_triplet_hamiltonian, hk_triplet_initial_state, hk_two_particle_heff,
    hk_two_particle_initial_state, triplet_eigenvalue, triplet_projector,
    two_particle_basis_indices,
};
pub use two_band::{
    lower_band_state, single_k_hamiltonian, single_k_initial_state, single_k_jump_operators,
    single_k_liouvillian, two_band_bloch, winding_number,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which sublattice a dissipator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orbital {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JumpKind {
    Loss,
    Gain,
}

/// One single-particle dissipation channel.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Dissipator {
    pub kind: JumpKind,
    pub orbital: Orbital,
    pub strength: f64,
}

impl Dissipator {
    pub fn loss(orbital: Orbital, strength: f64) -> Self {
        Dissipator {
            kind: JumpKind::Loss,
            orbital,
            strength,
        }
    }
    pub fn gain(orbital: Orbital, strength: f64) -> Self {
        Dissipator {
            kind: JumpKind::Gain,
            orbital,
            strength,
        }
    }
}

/// Bloch d-vector families used by the models.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum DVector {
    /// `(offset + hopping·cos k, hopping·sin k, 0)` — the two-band chain.
    Planar { offset: f64, hopping: f64 },
    /// `(offset + hopping·cos k, 0, hopping·sin k)` — the interacting model.
    TiltedXz { offset: f64, hopping: f64 },
}

impl DVector {
    pub fn at(&self, k: f64) -> [f64; 3] {
        match *self {
            DVector::Planar { offset, hopping } => {
                [offset + hopping * k.cos(), hopping * k.sin(), 0.0]
            }
            DVector::TiltedXz { offset, hopping } => {
                [offset + hopping * k.cos(), 0.0, hopping * k.sin()]
            }
        }
    }

    /// Band energy `|d(k)|`.
    pub fn magnitude(&self, k: f64) -> f64 {
        let d = self.at(k);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}

/// Momentum-space model: d-vector plus dissipation and interaction data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlochModel {
    pub d_vector: DVector,
    pub dissipators: Vec<Dissipator>,
    /// Interaction strength U ≥ 0 (Hatsugai-Kohmoto scenarios).
    pub interaction: f64,
    /// Flux threaded through periodic chains, φ ∈ [0, 2π).
    pub flux: f64,
}

impl BlochModel {
    pub fn new(d_vector: DVector) -> Self {
        BlochModel {
            d_vector,
            dissipators: Vec::new(),
            interaction: 0.0,
            flux: 0.0,
        }
    }

    pub fn with_dissipators(mut self, dissipators: Vec<Dissipator>) -> Self {
        self.dissipators = dissipators;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for d in &self.dissipators {
            if d.strength < 0.0 {
                return Err(Error::domain(format!(
                    "dissipator strength must be nonnegative, got {}",
                    d.strength
                )));
            }
        }
        if self.interaction < 0.0 {
            return Err(Error::domain("interaction strength must be nonnegative"));
        }
        // d(k) must be 2π-periodic.
        for k in [0.3, 1.9] {
            let a = self.d_vector.at(k);
            let b = self.d_vector.at(k + 2.0 * std::f64::consts::PI);
            for i in 0..3 {
                if (a[i] - b[i]).abs() > 1e-12 {
                    return Err(Error::domain("d-vector is not 2π-periodic"));
                }
            }
        }
        Ok(())
    }

    pub fn strength(&self, kind: JumpKind) -> f64 {
        self.dissipators
            .iter()
            .filter(|d| d.kind == kind)
            .map(|d| d.strength)
            .sum()
    }
}

/// How the initial state is prepared from the pre-quench model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialFilling {
    /// Lower Bloch band per momentum sector.
    LowerBand,
    /// Half-filled Slater determinant of the many-body chain.
    HalfFilledManyBody,
}

/// Quench protocol: initial state from `pre`, evolution under `post`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuenchSpec {
    pub pre: BlochModel,
    pub post: BlochModel,
    pub initial_filling: InitialFilling,
}

impl QuenchSpec {
    /// The paper-scale two-band quench: `d₀ = (t₀ + w cos k, w sin k, 0)`
    /// into `d₁ = (t₁ + w cos k, w sin k, 0)` with the given dissipators on
    /// the post-quench side.
    pub fn two_band(t0: f64, t1: f64, w: f64, dissipators: Vec<Dissipator>) -> Self {
        QuenchSpec {
            pre: BlochModel::new(DVector::Planar {
                offset: t0,
                hopping: w,
            }),
            post: BlochModel::new(DVector::Planar {
                offset: t1,
                hopping: w,
            })
            .with_dissipators(dissipators),
            initial_filling: InitialFilling::LowerBand,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pre.validate()?;
        self.post.validate()
    }
}
