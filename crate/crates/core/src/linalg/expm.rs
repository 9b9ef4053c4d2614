//! Matrix exponential by scaling-and-squaring with Padé approximants
//! (Higham 2005), for dense complex matrices.

use crate::error::{Error, Result};
use crate::CMat;
use ndarray_linalg::{FactorizeInto, Solve};
use num_complex::Complex64;

// 1-norm thresholds θ_m for Padé orders 3, 5, 7, 9, 13.
const THETA: [(usize, f64); 5] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068e0),
    (13, 5.371_920_351_148_152e0),
];

fn one_norm(a: &CMat) -> f64 {
    let mut best = 0.0_f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

fn pade_coeffs(m: usize) -> Vec<f64> {
    match m {
        3 => vec![120., 60., 12., 1.],
        5 => vec![30240., 15120., 3360., 420., 30., 1.],
        7 => vec![17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.],
        9 => vec![
            17643225600.,
            8821612800.,
            2075673600.,
            302702400.,
            30270240.,
            2162160.,
            110880.,
            3960.,
            90.,
            1.,
        ],
        13 => vec![
            64764752532480000.,
            32382376266240000.,
            7771770303897600.,
            1187353796428800.,
            129060195264000.,
            10559470521600.,
            670442572800.,
            33522128640.,
            1323241920.,
            40840800.,
            960960.,
            16380.,
            182.,
            1.,
        ],
        _ => unreachable!(),
    }
}

/// `(U, V)` such that the Padé approximant is `(V − U)⁻¹ (V + U)`.
fn pade_uv(a: &CMat, m: usize) -> (CMat, CMat) {
    let n = a.nrows();
    let b = pade_coeffs(m);
    let a2 = a.dot(a);
    if m < 13 {
        // U = A Σ b_{2j+1} A^{2j},  V = Σ b_{2j} A^{2j}
        let mut u_inner = CMat::eye(n) * Complex64::new(b[1], 0.0);
        let mut v = CMat::eye(n) * Complex64::new(b[0], 0.0);
        let mut pow = CMat::eye(n);
        for j in 1..=(m / 2) {
            pow = pow.dot(&a2);
            u_inner = u_inner + &pow * Complex64::new(b[2 * j + 1], 0.0);
            v = v + &pow * Complex64::new(b[2 * j], 0.0);
        }
        (a.dot(&u_inner), v)
    } else {
        let a4 = a2.dot(&a2);
        let a6 = a4.dot(&a2);
        let u_hi = &a6 * Complex64::new(b[13], 0.0)
            + &a4 * Complex64::new(b[11], 0.0)
            + &a2 * Complex64::new(b[9], 0.0);
        let u_lo = &a6 * Complex64::new(b[7], 0.0)
            + &a4 * Complex64::new(b[5], 0.0)
            + &a2 * Complex64::new(b[3], 0.0)
            + CMat::eye(n) * Complex64::new(b[1], 0.0);
        let u = a.dot(&(a6.dot(&u_hi) + u_lo));
        let v_hi = &a6 * Complex64::new(b[12], 0.0)
            + &a4 * Complex64::new(b[10], 0.0)
            + &a2 * Complex64::new(b[8], 0.0);
        let v = a6.dot(&v_hi)
            + &a6 * Complex64::new(b[6], 0.0)
            + &a4 * Complex64::new(b[4], 0.0)
            + &a2 * Complex64::new(b[2], 0.0)
            + CMat::eye(n) * Complex64::new(b[0], 0.0);
        (u, v)
    }
}

/// Matrix exponential `e^A` of a square complex matrix.
pub fn expm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::dimension(format!(
            "expm requires a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    crate::linalg::with_big_stack(n, || expm_inner(a))
}

fn expm_inner(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    if n == 0 {
        return Ok(CMat::zeros((0, 0)));
    }
    if n == 1 {
        return Ok(ndarray::array![[a[[0, 0]].exp()]]);
    }
    let nrm = one_norm(a);
    if !nrm.is_finite() {
        return Err(Error::numeric("expm input contains non-finite entries"));
    }

    let mut order = 13;
    let mut squarings = 0u32;
    for &(m, theta) in &THETA {
        if nrm <= theta {
            order = m;
            squarings = 0;
            break;
        }
    }
    let scaled;
    let work = if nrm > THETA[4].1 {
        squarings = ((nrm / THETA[4].1).log2().ceil()).max(0.0) as u32;
        let scale = Complex64::new((0.5f64).powi(squarings as i32), 0.0);
        scaled = a * scale;
        &scaled
    } else {
        a
    };

    let (u, v) = pade_uv(work, order);
    let numer = &v + &u;
    let denom = &v - &u;

    // Solve (V − U) X = (V + U) column by column.
    let mut result = CMat::zeros((n, n));
    let lu = denom
        .factorize_into()
        .map_err(|e| Error::numeric(format!("expm Padé solve failed: {e}")))?;
    for j in 0..n {
        let col = numer.column(j).to_owned();
        let x = lu
            .solve(&col)
            .map_err(|e| Error::numeric(format!("expm Padé solve failed: {e}")))?;
        result.column_mut(j).assign(&x);
    }

    for _ in 0..squarings {
        result = result.dot(&result);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, max_abs};
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exponential_of_zero_is_identity() {
        let z = CMat::zeros((4, 4));
        let e = expm(&z).unwrap();
        assert!(max_abs(&(&e - &CMat::eye(4))) < 1e-15);
    }

    #[test]
    fn diagonal_matrix_exponentiates_entrywise() {
        let a = array![
            [c(0.3, -1.2), c(0.0, 0.0)],
            [c(0.0, 0.0), c(-2.0, 0.7)]
        ];
        let e = expm(&a).unwrap();
        assert!((e[[0, 0]] - a[[0, 0]].exp()).norm() < 1e-14);
        assert!((e[[1, 1]] - a[[1, 1]].exp()).norm() < 1e-14);
        assert!(e[[0, 1]].norm() < 1e-15);
    }

    #[test]
    fn pauli_rotation_has_closed_form() {
        // e^{-iθσ_x} = cos θ − i sin θ σ_x
        let theta = 1.3_f64;
        let a = array![
            [c(0.0, 0.0), c(0.0, -theta)],
            [c(0.0, -theta), c(0.0, 0.0)]
        ];
        let e = expm(&a).unwrap();
        assert!((e[[0, 0]] - c(theta.cos(), 0.0)).norm() < 1e-13);
        assert!((e[[0, 1]] - c(0.0, -theta.sin())).norm() < 1e-13);
    }

    #[test]
    fn large_norm_triggers_squaring_and_stays_accurate() {
        // Anti-Hermitian generator: e^A is unitary regardless of norm.
        let mut a = CMat::zeros((6, 6));
        for i in 0..6 {
            for j in 0..6 {
                let v = c(
                    ((i * 7 + j * 3) as f64 * 0.9).sin(),
                    ((i + 2 * j) as f64 * 1.7).cos(),
                );
                a[[i, j]] = v;
            }
        }
        let h = &a + &dagger(&a); // Hermitian
        let gen = &h * c(0.0, -8.0); // large anti-Hermitian
        let e = expm(&gen).unwrap();
        let unit = e.dot(&dagger(&e));
        assert!(max_abs(&(&unit - &CMat::eye(6))) < 1e-11);
    }

    #[test]
    fn additivity_on_commuting_arguments() {
        let a = array![
            [c(0.1, 0.4), c(0.2, 0.0)],
            [c(0.2, 0.0), c(-0.3, 0.1)]
        ];
        let e1 = expm(&(&a * c(0.7, 0.0))).unwrap();
        let e2 = expm(&(&a * c(0.3, 0.0))).unwrap();
        let whole = expm(&a).unwrap();
        assert!(max_abs(&(e1.dot(&e2) - &whole)) < 1e-13);
    }
}
