//! Dense complex linear-algebra helpers shared across the crate.

mod eig;
mod expm;
mod gauss;

pub use eig::{eigensystem, Eigensystem};
pub use expm::expm;
pub use gauss::gauss_legendre;

use crate::{CMat, CVec};
use num_complex::Complex64;

/// Dimension above which LAPACK-heavy routines run on a dedicated thread.
/// The OpenBLAS LU drivers use several MiB of caller stack at moderate sizes,
/// which overflows the 2 MiB default of test and worker threads.
const BIG_STACK_DIM: usize = 128;
const BIG_STACK_BYTES: usize = 64 * 1024 * 1024;

/// Runs `f` inline for small problems, on a large-stack thread otherwise.
pub(crate) fn with_big_stack<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> T {
    if n < BIG_STACK_DIM {
        return f();
    }
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(BIG_STACK_BYTES)
            .spawn_scoped(scope, f)
            .expect("failed to spawn linalg worker thread")
            .join()
            .expect("linalg worker thread panicked")
    })
}

/// Conjugate transpose.
pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

/// Entrywise complex conjugate.
pub fn conjugate(a: &CMat) -> CMat {
    a.mapv(|z| z.conj())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    ndarray::linalg::kron(a, b)
}

/// Identity matrix of dimension `n`.
pub fn identity(n: usize) -> CMat {
    CMat::eye(n)
}

/// `tr(a)`.
pub fn trace(a: &CMat) -> Complex64 {
    a.diag().sum()
}

/// Largest absolute entry.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Inner product `⟨a|b⟩ = Σ conj(a_i) b_i`.
pub fn vdot(a: &CVec, b: &CVec) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm of a complex vector.
pub fn norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermiticity defect `‖a − a†‖_max`.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    max_abs(&(a - &dagger(a)))
}

/// True if every entry is finite.
pub fn all_finite(a: &CMat) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_matches_hand_computation() {
        let a = array![[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, 0.0), c(2.0, 0.0)]];
        let b = array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        let k = kron(&a, &b);
        assert_eq!(k[[0, 1]], c(1.0, 0.0));
        assert_eq!(k[[0, 3]], c(0.0, 1.0));
        assert_eq!(k[[2, 2]], c(0.0, 0.0));
        assert_eq!(k[[2, 3]], c(2.0, 0.0));
        assert_eq!(k[[3, 2]], c(2.0, 0.0));
    }

    #[test]
    fn dagger_is_involutive() {
        let a = array![[c(1.0, 2.0), c(3.0, -1.0)], [c(0.5, 0.5), c(-1.0, 0.0)]];
        assert_eq!(dagger(&dagger(&a)), a);
        assert_eq!(dagger(&a)[[1, 0]], c(3.0, 1.0));
    }
}
