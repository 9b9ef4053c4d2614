//! Minimal compressed-sparse-column complex matrices.
//!
//! Fock-space operators of the many-body chain are too large to hold densely
//! beyond a few unit cells, but each one-body or two-body term couples every
//! basis state to at most one other. Column-compressed storage with a
//! zero-skip in `apply` also makes matrix-vector products cheap when the
//! input vector is supported on a single particle-number sector.

use crate::error::{Error, Result};
use crate::CMat;
use num_complex::Complex64;

/// Column-compressed sparse complex matrix.
#[derive(Debug, Clone)]
pub struct CsMat {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<Complex64>,
    /// Per-column Σ_i |a_ij|², valid for computing ‖Av‖² without
    /// materialization when every row holds at most one entry (true for
    /// fermionic jump operators, which permute basis states).
    col_weights: Option<Vec<f64>>,
}

impl CsMat {
    /// Builds from (row, col, value) triplets; duplicates are summed and
    /// entries that cancel to zero are kept out of the structure.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, Complex64)>,
    ) -> Result<Self> {
        for &(r, c, _) in &triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::dimension(format!(
                    "triplet ({r},{c}) outside {nrows}x{ncols}"
                )));
            }
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (c, r));
        let mut col_ptr = vec![0usize; ncols + 1];
        let mut row_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut cols_seen = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if let (Some(&lr), Some(&lc)) = (row_idx.last(), cols_seen.last()) {
                if lr == r && lc == c {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
            }
            row_idx.push(r);
            cols_seen.push(c);
            values.push(v);
        }
        // Drop exact zeros produced by cancellation.
        let mut keep_row = Vec::with_capacity(row_idx.len());
        let mut keep_col = Vec::with_capacity(row_idx.len());
        let mut keep_val = Vec::with_capacity(row_idx.len());
        for i in 0..row_idx.len() {
            if values[i] != Complex64::new(0.0, 0.0) {
                keep_row.push(row_idx[i]);
                keep_col.push(cols_seen[i]);
                keep_val.push(values[i]);
            }
        }
        for &c in &keep_col {
            col_ptr[c + 1] += 1;
        }
        for c in 0..ncols {
            col_ptr[c + 1] += col_ptr[c];
        }
        let mut row_seen = vec![false; nrows];
        let mut rows_unique = true;
        for &r in &keep_row {
            if row_seen[r] {
                rows_unique = false;
                break;
            }
            row_seen[r] = true;
        }
        let col_weights = if rows_unique {
            let mut w = vec![0.0; ncols];
            for (i, &c) in keep_col.iter().enumerate() {
                w[c] += keep_val[i].norm_sqr();
            }
            Some(w)
        } else {
            None
        };
        Ok(CsMat {
            nrows,
            ncols,
            col_ptr,
            row_idx: keep_row,
            values: keep_val,
            col_weights,
        })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsMat {
            nrows,
            ncols,
            col_ptr: vec![0; ncols + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
            col_weights: Some(vec![0.0; ncols]),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `out = A·v`, skipping columns whose input amplitude is zero.
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(v.len(), self.ncols);
        assert_eq!(out.len(), self.nrows);
        out.fill(Complex64::new(0.0, 0.0));
        for (j, &vj) in v.iter().enumerate() {
            if vj == Complex64::new(0.0, 0.0) {
                continue;
            }
            for idx in self.col_ptr[j]..self.col_ptr[j + 1] {
                out[self.row_idx[idx]] += self.values[idx] * vj;
            }
        }
    }

    /// Entries of one column as (row, value) pairs.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.col_ptr[j]..self.col_ptr[j + 1]).map(move |i| (self.row_idx[i], self.values[i]))
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros((self.nrows, self.ncols));
        for j in 0..self.ncols {
            for (i, v) in self.column(j) {
                m[[i, j]] += v;
            }
        }
        m
    }

    /// Dense sub-block on the given row/column index sets.
    pub fn dense_block(&self, rows: &[usize], cols: &[usize]) -> CMat {
        let mut lookup = vec![usize::MAX; self.nrows];
        for (r, &i) in rows.iter().enumerate() {
            lookup[i] = r;
        }
        let mut m = CMat::zeros((rows.len(), cols.len()));
        for (c, &j) in cols.iter().enumerate() {
            for (i, v) in self.column(j) {
                if lookup[i] != usize::MAX {
                    m[[lookup[i], c]] += v;
                }
            }
        }
        m
    }
}

/// Matrix-free linear operator over complex vectors.
pub trait LinearOp: Sync {
    fn dim(&self) -> usize;
    /// `out = Op·v`.
    fn apply(&self, v: &[Complex64], out: &mut [Complex64]);
    /// `‖Op·v‖²`; the default materializes into `scratch`.
    fn apply_norm_sqr(&self, v: &[Complex64], scratch: &mut [Complex64]) -> f64 {
        self.apply(v, scratch);
        scratch.iter().map(|z| z.norm_sqr()).sum()
    }
}

impl LinearOp for CsMat {
    fn dim(&self) -> usize {
        self.nrows
    }
    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        CsMat::apply(self, v, out);
    }
    fn apply_norm_sqr(&self, v: &[Complex64], scratch: &mut [Complex64]) -> f64 {
        match &self.col_weights {
            Some(w) => v
                .iter()
                .zip(w.iter())
                .filter(|(vj, _)| **vj != Complex64::new(0.0, 0.0))
                .map(|(vj, wj)| wj * vj.norm_sqr())
                .sum(),
            None => {
                self.apply(v, scratch);
                scratch.iter().map(|z| z.norm_sqr()).sum()
            }
        }
    }
}

impl LinearOp for CMat {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        for (i, row) in self.rows().into_iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(v.iter()) {
                acc += a * b;
            }
            out[i] = acc;
        }
    }
}
