//! General (non-Hermitian) eigendecomposition with a biorthogonal left basis.

use crate::error::{Error, Result};
use crate::CMat;
use ndarray_linalg::{Eig, Inverse, SVD};
use num_complex::Complex64;

/// Eigendecomposition of a general complex matrix.
///
/// Eigenvalues are sorted by descending real part, ties broken by ascending
/// imaginary part. `right` holds right eigenvectors as columns in that order.
/// `left` (rows) is `right⁻¹`, so `left · right = I` exactly in exact
/// arithmetic: row m of `left` is the left eigenvector biorthonormal to
/// column n of `right`. When the eigenvector matrix is numerically singular
/// (`min_singular` below threshold) `left` is `None`.
pub struct Eigensystem {
    pub values: Vec<Complex64>,
    pub right: CMat,
    pub left: Option<CMat>,
    /// Smallest singular value of the right-eigenvector matrix; small values
    /// flag near-defective (exceptional-point) spectra.
    pub min_singular: f64,
}

/// Diagonalizability threshold used for the biorthogonal basis.
pub const DIAGONALIZABILITY_TOL: f64 = 1e-8;

/// Decompose `a`, sorting eigenpairs deterministically.
pub fn eigensystem(a: &CMat) -> Result<Eigensystem> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::dimension("eigensystem requires a square matrix"));
    }
    crate::linalg::with_big_stack(n, || eigensystem_inner(a))
}

fn eigensystem_inner(a: &CMat) -> Result<Eigensystem> {
    let n = a.nrows();
    let (vals, vecs) = a
        .eig()
        .map_err(|e| Error::numeric(format!("eigendecomposition failed: {e}")))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let a = vals[i];
        let b = vals[j];
        b.re.partial_cmp(&a.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });

    let values: Vec<Complex64> = order.iter().map(|&i| vals[i]).collect();
    let mut right = CMat::zeros((n, n));
    for (col, &i) in order.iter().enumerate() {
        right.column_mut(col).assign(&vecs.column(i));
    }

    let min_singular = match right.svd(false, false) {
        Ok((_, s, _)) => s.iter().cloned().fold(f64::INFINITY, f64::min),
        Err(_) => 0.0,
    };

    let left = if min_singular > DIAGONALIZABILITY_TOL {
        Some(
            right
                .inv()
                .map_err(|e| Error::numeric(format!("eigenvector inversion failed: {e}")))?,
        )
    } else {
        None
    };

    Ok(Eigensystem {
        values,
        right,
        left,
        min_singular,
    })
}

impl Eigensystem {
    /// Biorthogonal left basis, or an error naming the conditioning problem.
    pub fn left_required(&self) -> Result<&CMat> {
        self.left.as_ref().ok_or_else(|| {
            Error::numeric(format!(
                "eigenbasis too ill-conditioned for biorthogonal expansion \
                 (min singular value {:.3e})",
                self.min_singular
            ))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reconstructs_matrix_from_eigenpairs() {
        let a = array![
            [c(1.0, 0.2), c(0.3, -0.4), c(0.0, 0.1)],
            [c(0.0, 0.9), c(-0.5, 0.0), c(0.2, 0.2)],
            [c(0.7, 0.0), c(0.1, 0.1), c(0.4, -0.6)]
        ];
        let es = eigensystem(&a).unwrap();
        let left = es.left_required().unwrap();
        let mut lambda = CMat::zeros((3, 3));
        for i in 0..3 {
            lambda[[i, i]] = es.values[i];
        }
        let rebuilt = es.right.dot(&lambda).dot(left);
        assert!(max_abs(&(&rebuilt - &a)) < 1e-12);
    }

    #[test]
    fn sorted_by_descending_real_part() {
        let a = array![
            [c(-2.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0)]
        ];
        let es = eigensystem(&a).unwrap();
        assert!((es.values[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((es.values[1] - c(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn biorthogonality_of_left_and_right() {
        let a = array![
            [c(0.0, 1.0), c(1.0, 0.0)],
            [c(0.2, 0.0), c(0.0, -1.0)]
        ];
        let es = eigensystem(&a).unwrap();
        let prod = es.left_required().unwrap().dot(&es.right);
        assert!(max_abs(&(&prod - &CMat::eye(2))) < 1e-12);
    }
}
