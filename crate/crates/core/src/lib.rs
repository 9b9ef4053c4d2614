//! Lindblad dynamics and dynamical quantum phase transitions (DQPTs) in
//! open fermionic lattice systems.
//!
//! The crate covers the full pipeline from model definition to DQPT
//! diagnostics:
//!
//! * [`fock`] — occupation-number bases and Jordan-Wigner fermion operators;
//! * [`liouvillian`] — density-matrix vectorization, Liouvillian
//!   superoperators on the double Hilbert space, charge-block structure,
//!   spectra and steady states;
//! * [`propagator`] — exact Liouvillian and effective non-Hermitian time
//!   evolution, plus the first-order jump (backflow) expansion;
//! * [`models`] — two-band lattice models, the Hatsugai-Kohmoto interacting
//!   model, and periodic chains with two-body loss/gain;
//! * [`dqpt`] — Loschmidt return and rate functions, cusp detection, Fisher
//!   zeros, crossover times and flux averaging;
//! * [`mcwf`] — the Monte-Carlo wavefunction (quantum trajectory) engine.
//!
//! All dense matrices are `ndarray::Array2<Complex64>`; eigenproblems go
//! through LAPACK via `ndarray-linalg`.

pub mod dqpt;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod liouvillian;
pub mod mcwf;
pub mod models;
pub mod propagator;
pub mod sparse;

pub use error::{Error, Result};

use num_complex::Complex64;

/// Dense complex matrix.
pub type CMat = ndarray::Array2<Complex64>;
/// Dense complex vector.
pub type CVec = ndarray::Array1<Complex64>;

/// Library version string (mirrored into CLI manifests).
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
