//! Liouvillian superoperators on the double Hilbert space.
//!
//! Density matrices are vectorized by row-major flattening,
//! `ρ = (ρ_11, ρ_12, …, ρ_1D, …, ρ_DD)`, so that
//! `vec(AρB) = (A ⊗ Bᵀ) vec(ρ)`. With jump operators `L_μ` the Lindblad
//! generator becomes the matrix
//!
//! ```text
//! 𝕃 = −i (H_eff ⊗ I − I ⊗ H_eff*) + Σ_μ L_μ ⊗ L_μ*,
//! H_eff = H − (i/2) Σ_μ L_μ† L_μ.
//! ```
//!
//! When the Hilbert basis carries particle-number labels the double-space
//! basis splits into charge sectors (n, n̄); the weak symmetry of
//! number-conserving `H_eff` with homogeneous loss/gain jumps keeps each
//! n − n̄ subspace invariant, and 𝕃 decomposes into a block-diagonal part
//! 𝕃₀ plus lowering (𝕃_d) and raising (𝕃_u) jump blocks.

use crate::error::{Error, Result};
use crate::linalg::{self, eigensystem, Eigensystem};
use crate::{CMat, CVec};
use num_complex::Complex64;
use std::collections::BTreeMap;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-major vectorized density matrix.
#[derive(Debug, Clone)]
pub struct VectorizedDensity {
    pub dim: usize,
    pub data: CVec,
}

/// Flattens a square matrix row-major.
pub fn vectorize(rho: &CMat) -> Result<VectorizedDensity> {
    let d = rho.nrows();
    if d != rho.ncols() {
        return Err(Error::domain("vectorize requires a square matrix"));
    }
    let data = CVec::from_iter(rho.iter().cloned());
    Ok(VectorizedDensity { dim: d, data })
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &VectorizedDensity) -> CMat {
    CMat::from_shape_vec((v.dim, v.dim), v.data.to_vec()).expect("length is dim²")
}

impl VectorizedDensity {
    /// ⟨⟨self|other⟩⟩ = tr(self† other).
    pub fn overlap(&self, other: &VectorizedDensity) -> Complex64 {
        linalg::vdot(&self.data, &other.data)
    }

    /// tr of the underlying matrix, read off the diagonal entries.
    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }
}

/// Dense Liouvillian matrix, optionally with charge-sector bookkeeping.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    /// Superoperator matrix over the (possibly restricted) double-space basis.
    pub matrix: CMat,
    /// Dimension D of the underlying Hilbert space.
    pub hilbert_dim: usize,
    /// (ket index, bra index) in the Hilbert basis for each row/column.
    pub double_index: Vec<(usize, usize)>,
    /// (n, n̄) particle numbers per row/column, when the basis is labeled.
    pub charge_map: Option<Vec<(u32, u32)>>,
}

impl Liouvillian {
    /// Builds 𝕃 from a Hamiltonian and jump operators on the full double space.
    pub fn build(h: &CMat, jumps: &[CMat]) -> Result<Self> {
        Self::assemble(h, jumps, None)
    }

    /// Same as [`Liouvillian::build`], with particle-number labels for the
    /// Hilbert basis (one entry per basis state) enabling charge-sector
    /// operations.
    pub fn build_with_charges(h: &CMat, jumps: &[CMat], numbers: &[u32]) -> Result<Self> {
        if numbers.len() != h.nrows() {
            return Err(Error::dimension(
                "charge labels must match the Hilbert dimension",
            ));
        }
        Self::assemble(h, jumps, Some(numbers))
    }

    fn assemble(h: &CMat, jumps: &[CMat], numbers: Option<&[u32]>) -> Result<Self> {
        let d = h.nrows();
        if d != h.ncols() {
            return Err(Error::dimension("Hamiltonian must be square"));
        }
        for (i, l) in jumps.iter().enumerate() {
            if l.nrows() != d || l.ncols() != d {
                return Err(Error::dimension(format!(
                    "jump operator {i} is {}x{}, expected {d}x{d}",
                    l.nrows(),
                    l.ncols()
                )));
            }
        }
        let mut heff = h.clone();
        for l in jumps {
            heff = heff - linalg::dagger(l).dot(l) * Complex64::new(0.0, 0.5);
        }
        let id = linalg::identity(d);
        let mut mat = (linalg::kron(&heff, &id) - linalg::kron(&id, &linalg::conjugate(&heff)))
            * (-I);
        for l in jumps {
            mat = mat + linalg::kron(l, &linalg::conjugate(l));
        }
        let double_index: Vec<(usize, usize)> =
            (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).collect();
        let charge_map = numbers
            .map(|ns| double_index.iter().map(|&(i, j)| (ns[i], ns[j])).collect());

        Ok(Liouvillian {
            matrix: mat,
            hilbert_dim: d,
            double_index,
            charge_map,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Components of ⟨⟨I| on the current double-space basis: 1 where ket and
    /// bra indices coincide.
    pub fn identity_left_vector(&self) -> CVec {
        CVec::from_iter(self.double_index.iter().map(|&(i, j)| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// Projects a full vectorized density onto this Liouvillian's basis.
    pub fn project_vector(&self, v: &VectorizedDensity) -> Result<CVec> {
        if v.dim != self.hilbert_dim {
            return Err(Error::dimension(
                "vectorized density does not match the Hilbert dimension",
            ));
        }
        Ok(CVec::from_iter(
            self.double_index
                .iter()
                .map(|&(i, j)| v.data[i * self.hilbert_dim + j]),
        ))
    }

    /// Scatters a vector on this basis back to a full density matrix.
    pub fn unproject_vector(&self, v: &CVec) -> Result<CMat> {
        if v.len() != self.dim() {
            return Err(Error::dimension("vector does not match the Liouvillian basis"));
        }
        let d = self.hilbert_dim;
        let mut rho = CMat::zeros((d, d));
        for (row, &(i, j)) in self.double_index.iter().enumerate() {
            rho[[i, j]] = v[row];
        }
        Ok(rho)
    }

    /// Restricts to the weak-symmetry subspace with fixed `n − n̄ = n_diff`.
    pub fn restrict_weak_symmetry(&self, n_diff: i32) -> Result<Liouvillian> {
        let charges = self
            .charge_map
            .as_ref()
            .ok_or_else(|| Error::unsupported("restriction requires a charge map"))?;
        let keep: Vec<usize> = charges
            .iter()
            .enumerate()
            .filter(|(_, &(n, nb))| n as i32 - nb as i32 == n_diff)
            .map(|(idx, _)| idx)
            .collect();
        if keep.is_empty() {
            return Err(Error::domain(format!(
                "weak-symmetry subspace n_diff = {n_diff} is empty"
            )));
        }
        let m = keep.len();
        let mut matrix = CMat::zeros((m, m));
        for (r, &i) in keep.iter().enumerate() {
            for (c, &j) in keep.iter().enumerate() {
                matrix[[r, c]] = self.matrix[[i, j]];
            }
        }
        Ok(Liouvillian {
            matrix,
            hilbert_dim: self.hilbert_dim,
            double_index: keep.iter().map(|&i| self.double_index[i]).collect(),
            charge_map: Some(keep.iter().map(|&i| charges[i]).collect()),
        })
    }

    /// Splits 𝕃 into charge-sector blocks 𝕃₀ / 𝕃_d / 𝕃_u.
    pub fn block_decompose(&self) -> Result<ChargeBlocks> {
        let charges = self
            .charge_map
            .as_ref()
            .ok_or_else(|| Error::unsupported("block decomposition requires a charge map"))?;

        let mut sectors: Vec<(u32, u32)> = charges.clone();
        sectors.sort_unstable();
        sectors.dedup();
        let mut indices: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
        for (idx, &c) in charges.iter().enumerate() {
            indices.entry(c).or_default().push(idx);
        }

        let mut l0 = BTreeMap::new();
        let mut ld = BTreeMap::new();
        let mut lu = BTreeMap::new();
        for &to in &sectors {
            for &from in &sectors {
                let rows = &indices[&to];
                let cols = &indices[&from];
                let mut block = CMat::zeros((rows.len(), cols.len()));
                let mut nonzero = false;
                for (r, &i) in rows.iter().enumerate() {
                    for (c, &j) in cols.iter().enumerate() {
                        let v = self.matrix[[i, j]];
                        if v != Complex64::new(0.0, 0.0) {
                            nonzero = true;
                        }
                        block[[r, c]] = v;
                    }
                }
                if to == from {
                    l0.insert(to, block);
                    continue;
                }
                if !nonzero {
                    continue;
                }
                let down = to.0 < from.0 && to.1 < from.1;
                let up = to.0 > from.0 && to.1 > from.1;
                if down {
                    ld.insert((to, from), block);
                } else if up {
                    lu.insert((to, from), block);
                } else {
                    return Err(Error::unsupported(format!(
                        "jump couples sectors {from:?} → {to:?} asymmetrically; \
                         the loss/gain block structure does not apply"
                    )));
                }
            }
        }
        Ok(ChargeBlocks {
            sectors: indices.keys().cloned().collect(),
            indices,
            l0,
            ld,
            lu,
            size: self.dim(),
        })
    }

    /// Eigen decomposition with deterministic ordering (descending real part,
    /// ties by ascending imaginary part).
    pub fn spectrum(&self) -> Result<Eigensystem> {
        eigensystem(&self.matrix)
    }

    /// Liouvillian gap: the second eigenvalue in the sorted spectrum.
    pub fn gap(&self) -> Result<Complex64> {
        let es = self.spectrum()?;
        if es.values.len() < 2 {
            return Err(Error::domain("gap undefined for a 1-dimensional Liouvillian"));
        }
        Ok(es.values[1])
    }

    /// All steady states (eigenvalue 0 within tolerance), as density matrices
    /// normalized to unit trace. Zero-trace null vectors are returned
    /// unnormalized.
    pub fn steady_states(&self) -> Result<Vec<CMat>> {
        let es = self.spectrum()?;
        let mut out = Vec::new();
        for (idx, val) in es.values.iter().enumerate() {
            if val.norm() <= 1e-9 {
                let v = es.right.column(idx).to_owned();
                let rho = self.unproject_vector(&v)?;
                let tr = linalg::trace(&rho);
                if tr.norm() > 1e-10 {
                    out.push(rho / tr);
                } else {
                    out.push(rho);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::numeric("no eigenvalue within 1e-9 of zero"));
        }
        Ok(out)
    }

    /// The unique steady state; errors if the zero eigenvalue is degenerate.
    pub fn steady_state(&self) -> Result<CMat> {
        let all = self.steady_states()?;
        if all.len() > 1 {
            return Err(Error::numeric(format!(
                "{} steady states found; use steady_states()",
                all.len()
            )));
        }
        Ok(all.into_iter().next().unwrap())
    }
}

/// A double-space charge sector (n, n̄).
pub type Sector = (u32, u32);

/// Charge-sector decomposition 𝕃 = 𝕃₀ + 𝕃_d + 𝕃_u.
///
/// Sectors are (n, n̄) pairs. `l0` holds the within-sector blocks; `ld`/`lu`
/// map `(to, from)` sector pairs where both labels strictly decrease
/// (loss) or increase (gain).
#[derive(Debug, Clone)]
pub struct ChargeBlocks {
    pub sectors: Vec<Sector>,
    pub indices: BTreeMap<Sector, Vec<usize>>,
    pub l0: BTreeMap<Sector, CMat>,
    pub ld: BTreeMap<(Sector, Sector), CMat>,
    pub lu: BTreeMap<(Sector, Sector), CMat>,
    size: usize,
}

impl ChargeBlocks {
    /// Rebuilds the full matrix by placing every block; exact by construction.
    pub fn reassemble(&self) -> CMat {
        let mut m = CMat::zeros((self.size, self.size));
        let mut place = |sector_to: &(u32, u32), sector_from: &(u32, u32), block: &CMat| {
            let rows = &self.indices[sector_to];
            let cols = &self.indices[sector_from];
            for (r, &i) in rows.iter().enumerate() {
                for (c, &j) in cols.iter().enumerate() {
                    m[[i, j]] = block[[r, c]];
                }
            }
        };
        for (s, b) in &self.l0 {
            place(s, s, b);
        }
        for ((to, from), b) in &self.ld {
            place(to, from, b);
        }
        for ((to, from), b) in &self.lu {
            place(to, from, b);
        }
        m
    }

    /// 𝕃₀ block of the diagonal sector (n, n).
    pub fn l0_diag(&self, n: u32) -> Option<&CMat> {
        self.l0.get(&(n, n))
    }

    /// Loss block (to, to) ← (from, from).
    pub fn ld_diag(&self, to: u32, from: u32) -> Option<&CMat> {
        self.ld.get(&((to, to), (from, from)))
    }

    /// Gain block (to, to) ← (from, from).
    pub fn lu_diag(&self, to: u32, from: u32) -> Option<&CMat> {
        self.lu.get(&((to, to), (from, from)))
    }

    /// Double-space indices of the diagonal sector (n, n).
    pub fn diagonal_sector_indices(&self, n: u32) -> Option<&[usize]> {
        self.indices.get(&(n, n)).map(|v| v.as_slice())
    }

    /// Extracts the (n, n)-sector components of a full-length vector.
    pub fn project_diagonal(&self, n: u32, v: &CVec) -> Result<CVec> {
        if v.len() != self.size {
            return Err(Error::dimension("vector does not match the decomposed space"));
        }
        let idx = self
            .diagonal_sector_indices(n)
            .ok_or_else(|| Error::domain(format!("no (n,n) sector for n = {n}")))?;
        Ok(CVec::from_iter(idx.iter().map(|&i| v[i])))
    }

    /// Particle numbers of all diagonal (n, n) sectors present.
    pub fn diagonal_sectors(&self) -> Vec<u32> {
        self.sectors
            .iter()
            .filter(|(n, nb)| n == nb)
            .map(|&(n, _)| n)
            .collect()
    }
}

/// Hermiticity, trace and positivity checks for an evolved density matrix.
pub fn physicality_defects(rho: &CMat) -> Result<(f64, f64, f64)> {
    use ndarray_linalg::Eigh;
    let herm = linalg::hermiticity_defect(rho);
    let trace_defect = (linalg::trace(rho) - Complex64::new(1.0, 0.0)).norm();
    let sym = (rho + &linalg::dagger(rho)) * Complex64::new(0.5, 0.0);
    let (vals, _) = sym
        .eigh(ndarray_linalg::UPLO::Lower)
        .map_err(|e| Error::numeric(format!("eigh failed: {e}")))?;
    let min_eig = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((herm, trace_defect, min_eig))
}
