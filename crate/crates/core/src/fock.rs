//! Occupation-number bases for fermionic modes with Jordan-Wigner
//! sign-correct operators.
//!
//! A basis state is a bitmask `u32` where bit `i` is the occupation of mode
//! `i`. States are ordered by ascending bitmask value, i.e. mode 0 is the
//! fastest-varying bit, so two modes enumerate as |00⟩, |10⟩, |01⟩, |11⟩
//! (labels list mode 0 first). The Jordan-Wigner string orders modes by
//! (unit cell, then orbital A before B, then spin ↑ before ↓); everything in
//! the crate uses this one convention.

use crate::error::{Error, Result};
use crate::CMat;
use num_complex::Complex64;
use std::collections::HashMap;

/// Hard cap on dense-basis construction: 2^20 states is already far beyond
/// what dense matrices downstream can hold.
const MAX_MODES: usize = 24;

/// Ordered basis of fermionic occupation configurations, optionally
/// restricted to a fixed particle number.
#[derive(Debug, Clone)]
pub struct OccupationBasis {
    num_modes: usize,
    states: Vec<u32>,
    index: HashMap<u32, usize>,
    sector_filter: Option<usize>,
}

impl OccupationBasis {
    /// Full Fock basis of `num_modes` modes (2^num_modes states).
    pub fn full(num_modes: usize) -> Result<Self> {
        Self::build(num_modes, None)
    }

    /// Basis of all states with exactly `n` occupied modes.
    pub fn with_particle_number(num_modes: usize, n: usize) -> Result<Self> {
        Self::build(num_modes, Some(n))
    }

    /// General constructor; `particle_number = None` gives the full space.
    pub fn build(num_modes: usize, particle_number: Option<usize>) -> Result<Self> {
        if num_modes == 0 {
            return Err(Error::domain("basis needs at least one mode"));
        }
        if num_modes > MAX_MODES {
            return Err(Error::capacity(format!(
                "{num_modes} modes exceeds the dense-basis cap of {MAX_MODES}"
            )));
        }
        if let Some(n) = particle_number {
            if n > num_modes {
                return Err(Error::domain(format!(
                    "particle number {n} exceeds mode count {num_modes}"
                )));
            }
        }
        let states: Vec<u32> = (0u32..1 << num_modes)
            .filter(|s| particle_number.is_none_or(|n| s.count_ones() as usize == n))
            .collect();
        let index = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(OccupationBasis {
            num_modes,
            states,
            index,
            sector_filter: particle_number,
        })
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn state(&self, i: usize) -> u32 {
        self.states[i]
    }

    pub fn sector_filter(&self) -> Option<usize> {
        self.sector_filter
    }

    /// Index of a configuration in this basis.
    pub fn index_of(&self, state: u32) -> Option<usize> {
        self.index.get(&state).copied()
    }

    /// Particle number of each basis state, in basis order.
    pub fn particle_numbers(&self) -> Vec<u32> {
        self.states.iter().map(|s| s.count_ones()).collect()
    }

    /// Occupation label like "|1010⟩", mode 0 first.
    pub fn label(&self, i: usize) -> String {
        let s = self.states[i];
        let bits: String = (0..self.num_modes)
            .map(|m| if s >> m & 1 == 1 { '1' } else { '0' })
            .collect();
        format!("|{bits}⟩")
    }
}

/// Applies `c_mode` to a configuration: `None` if the mode is empty,
/// otherwise the resulting configuration and the Jordan-Wigner sign
/// (−1)^(occupied modes below `mode`).
pub fn annihilate(state: u32, mode: usize) -> Option<(u32, f64)> {
    if state >> mode & 1 == 0 {
        return None;
    }
    let below = (state & ((1u32 << mode) - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((state & !(1u32 << mode), sign))
}

/// Applies `c†_mode`; `None` if the mode is already occupied.
pub fn create(state: u32, mode: usize) -> Option<(u32, f64)> {
    if state >> mode & 1 == 1 {
        return None;
    }
    let below = (state & ((1u32 << mode) - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((state | 1u32 << mode, sign))
}

/// Which second-quantized operator a [`FermionOperator`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Annihilation,
    Creation,
    Number,
}

/// Dense matrix of a single-mode fermion operator over an [`OccupationBasis`].
#[derive(Debug, Clone)]
pub struct FermionOperator {
    pub mode: usize,
    pub kind: OperatorKind,
    pub matrix: CMat,
}

/// Matrix of `c_mode`, `c†_mode` or `n_mode` on the full basis.
///
/// Sector-filtered bases are rejected: creation/annihilation change the
/// particle number, so operators are built on the full space and projected
/// afterwards if needed.
pub fn operator_matrix(
    basis: &OccupationBasis,
    mode: usize,
    kind: OperatorKind,
) -> Result<FermionOperator> {
    if basis.sector_filter().is_some() {
        return Err(Error::domain(
            "fermion operators must be built on an unfiltered basis",
        ));
    }
    if mode >= basis.num_modes() {
        return Err(Error::domain(format!(
            "mode {mode} out of range for {} modes",
            basis.num_modes()
        )));
    }
    let dim = basis.len();
    let mut matrix = CMat::zeros((dim, dim));
    for (col, &s) in basis.states().iter().enumerate() {
        match kind {
            OperatorKind::Annihilation => {
                if let Some((t, sign)) = annihilate(s, mode) {
                    let row = basis.index_of(t).unwrap();
                    matrix[[row, col]] = Complex64::new(sign, 0.0);
                }
            }
            OperatorKind::Creation => {
                if let Some((t, sign)) = create(s, mode) {
                    let row = basis.index_of(t).unwrap();
                    matrix[[row, col]] = Complex64::new(sign, 0.0);
                }
            }
            OperatorKind::Number => {
                if s >> mode & 1 == 1 {
                    matrix[[col, col]] = Complex64::new(1.0, 0.0);
                }
            }
        }
    }
    Ok(FermionOperator { mode, kind, matrix })
}

/// Diagonal 0/1 projector onto the states with exactly `n` occupied modes.
pub fn sector_projector(basis: &OccupationBasis, n: usize) -> Result<CMat> {
    if n > basis.num_modes() {
        return Err(Error::domain(format!(
            "sector {n} exceeds mode count {}",
            basis.num_modes()
        )));
    }
    let dim = basis.len();
    let mut p = CMat::zeros((dim, dim));
    for (i, &s) in basis.states().iter().enumerate() {
        if s.count_ones() as usize == n {
            p[[i, i]] = Complex64::new(1.0, 0.0);
        }
    }
    Ok(p)
}
