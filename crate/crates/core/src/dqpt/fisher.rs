//! Analytic Fisher zeros of the interacting model in the strong-interaction
//! limit.
//!
//! With the triplet Hamiltonian h(k) (spectrum {0, ±ε_k}) and the projected
//! initial state, the Loschmidt amplitude is
//! `A(k, t) = c₀ + e^{−iε_k t} c₊ + e^{iε_k t} c₋` with biorthogonal weights
//! `c_n = ⟨ψ₀|R_n⟩⟨L_n|ψ₀⟩`, `c₀ + c₊ + c₋ = 1`. Zeros follow from the
//! quadratic `c₊ z² + c₀ z + c₋ = 0` in `z = e^{−iε_k t}`:
//! `t_{c,n}(k) = (2πn + i Log z)/ε_k` for each root and branch n ∈ ℤ.
//! DQPTs sit where a zero curve crosses the real-t axis as k sweeps the zone.

use crate::error::{Error, Result};
use crate::linalg::eigensystem;
use crate::models::{hk_triplet_hamiltonian, hk_triplet_initial_state};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Zero curves over a momentum grid.
#[derive(Debug, Clone)]
pub struct FisherZeroSet {
    pub k_grid: Vec<f64>,
    /// (c₀, c₊, c₋) per momentum.
    pub coefficients: Vec<[Complex64; 3]>,
    /// Triplet eigenvalue ε_k per momentum.
    pub eigenvalues: Vec<Complex64>,
    /// Principal (n = 0) zeros of both quadratic roots per momentum; the
    /// full zero set is these plus integer multiples of 2π/ε_k.
    pub principal_zeros: Vec<[Complex64; 2]>,
    /// Zero curves keyed by their starting (branch n, root index 0/1) label
    /// and re-linked along k by nearest-point matching; NaN entries mark
    /// momenta where a root degenerates (|z| → 0).
    pub branches: BTreeMap<(i32, u8), Vec<Complex64>>,
    /// Momenta flagged for an ill-conditioned eigenbasis.
    pub flagged_k: Vec<usize>,
    /// Real-axis crossing times (t > 0), ascending, deduplicated.
    pub crossings: Vec<f64>,
}

/// Residual `|c₀ + e^{−iεt} c₊ + e^{iεt} c₋|` of a candidate zero.
pub fn fisher_residual(coeffs: &[Complex64; 3], eps: Complex64, t: Complex64) -> f64 {
    let i = Complex64::new(0.0, 1.0);
    (coeffs[0] + (-i * eps * t).exp() * coeffs[1] + (i * eps * t).exp() * coeffs[2]).norm()
}

fn quadratic_roots(c_plus: Complex64, c0: Complex64, c_minus: Complex64) -> Vec<Complex64> {
    // c₊ z² + c₀ z + c₋ = 0, solved stably.
    if c_plus.norm() < 1e-14 {
        if c0.norm() < 1e-14 {
            return Vec::new();
        }
        return vec![-c_minus / c0];
    }
    let disc = (c0 * c0 - 4.0 * c_plus * c_minus).sqrt();
    // Pick the sign that avoids cancellation in −c₀ ∓ disc.
    let q = if (c0 + disc).norm() >= (c0 - disc).norm() {
        -(c0 + disc) / 2.0
    } else {
        -(c0 - disc) / 2.0
    };
    let z1 = q / c_plus;
    let mut roots = vec![z1];
    if q.norm() > 1e-300 {
        roots.push(c_minus / q);
    }
    roots
}

/// Computes the zero set for the spin-↑ gain model at strength `gamma_up_gain`
/// over the momentum grid, for branch indices in `branches`.
pub fn fisher_zeros(
    k_grid: &[f64],
    gamma_up_gain: f64,
    branches: std::ops::RangeInclusive<i32>,
) -> Result<FisherZeroSet> {
    if k_grid.is_empty() {
        return Err(Error::domain("momentum grid is empty"));
    }
    let nk = k_grid.len();
    let mut coefficients = Vec::with_capacity(nk);
    let mut eigenvalues = Vec::with_capacity(nk);
    let mut flagged_k = Vec::new();
    let mut roots_per_k: Vec<[Complex64; 2]> = Vec::with_capacity(nk);

    for (ki, &k) in k_grid.iter().enumerate() {
        let h = hk_triplet_hamiltonian(k, gamma_up_gain);
        let psi = hk_triplet_initial_state(k)?;
        let es = eigensystem(&h)?;
        let left = match es.left {
            Some(ref l) => l,
            None => {
                flagged_k.push(ki);
                coefficients.push([Complex64::new(f64::NAN, 0.0); 3]);
                eigenvalues.push(Complex64::new(f64::NAN, 0.0));
                roots_per_k.push([Complex64::new(f64::NAN, 0.0); 2]);
                continue;
            }
        };
        // Order eigenpairs as (0, +ε, −ε).
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by(|&a, &b| {
            es.values[a]
                .norm()
                .partial_cmp(&es.values[b].norm())
                .unwrap()
        });
        let zero_idx = order[0];
        let (plus_idx, minus_idx) = {
            let rest: Vec<usize> = (0..3).filter(|&i| i != zero_idx).collect();
            if es.values[rest[0]].re >= es.values[rest[1]].re {
                (rest[0], rest[1])
            } else {
                (rest[1], rest[0])
            }
        };
        let eps = es.values[plus_idx];
        let weight = |idx: usize| -> Complex64 {
            let right_col = es.right.column(idx);
            let overlap_in: Complex64 = psi
                .iter()
                .zip(right_col.iter())
                .map(|(p, r)| p.conj() * r)
                .sum();
            let overlap_out: Complex64 = left
                .row(idx)
                .iter()
                .zip(psi.iter())
                .map(|(l, p)| l * p)
                .sum();
            overlap_in * overlap_out
        };
        let c0 = weight(zero_idx);
        let cp = weight(plus_idx);
        let cm = weight(minus_idx);
        coefficients.push([c0, cp, cm]);
        eigenvalues.push(eps);

        let roots = quadratic_roots(cp, c0, cm);
        let mut pair = [Complex64::new(f64::NAN, 0.0); 2];
        for (slot, z) in pair.iter_mut().zip(roots.iter()) {
            if z.norm() > 1e-14 {
                *slot = *z;
            }
        }
        roots_per_k.push(pair);
    }

    // Zero of branch n, root r at momentum index ki (principal log).
    let zero_at = |ki: usize, n: i32, root: usize| -> Complex64 {
        let z = roots_per_k[ki][root];
        let eps = eigenvalues[ki];
        if z.re.is_nan() || eps.re.is_nan() {
            return Complex64::new(f64::NAN, f64::NAN);
        }
        let i = Complex64::new(0.0, 1.0);
        (Complex64::new(2.0 * std::f64::consts::PI * n as f64, 0.0) + i * z.ln()) / eps
    };

    // Assemble curves by continuity in k. The principal log jumps by 2πi
    // when a root crosses the negative real axis, so each curve is continued
    // by nearest-previous-point matching over the pool of zeros at the next
    // momentum (both roots, branch indices padded by one). The matching is
    // one-to-one — assignments are claimed in order of increasing distance —
    // so distinct curves cannot collapse onto the same zero track.
    let (n_lo, n_hi) = (*branches.start(), *branches.end());
    let labels: Vec<(i32, u8)> = (n_lo..=n_hi)
        .flat_map(|n| [(n, 0u8), (n, 1u8)])
        .collect();
    let mut curves: Vec<Vec<Complex64>> = labels
        .iter()
        .map(|&(n, r)| vec![zero_at(0, n, r as usize)])
        .collect();
    for ki in 1..nk {
        let mut cands: Vec<Complex64> = Vec::new();
        for m in (n_lo - 1)..=(n_hi + 1) {
            for r in 0..2usize {
                let z = zero_at(ki, m, r);
                if !z.re.is_nan() {
                    cands.push(z);
                }
            }
        }
        // (distance, curve, candidate) triples, claimed greedily.
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ci, curve) in curves.iter().enumerate() {
            let prev = curve[ki - 1];
            if prev.re.is_nan() {
                continue;
            }
            for (zi, z) in cands.iter().enumerate() {
                pairs.push(((z - prev).norm(), ci, zi));
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut curve_done = vec![false; curves.len()];
        let mut cand_used = vec![false; cands.len()];
        let mut next: Vec<Complex64> = vec![Complex64::new(f64::NAN, f64::NAN); curves.len()];
        for (_, ci, zi) in pairs {
            if curve_done[ci] || cand_used[zi] {
                continue;
            }
            curve_done[ci] = true;
            cand_used[zi] = true;
            next[ci] = cands[zi];
        }
        for (ci, curve) in curves.iter_mut().enumerate() {
            // Curves with no valid previous point restart from their label.
            if !curve_done[ci] && curve[ki - 1].re.is_nan() {
                let (n, r) = labels[ci];
                next[ci] = zero_at(ki, n, r as usize);
            }
            curve.push(next[ci]);
        }
    }
    let mut branch_map = BTreeMap::new();
    for (label, curve) in labels.into_iter().zip(curves) {
        branch_map.insert(label, curve);
    }
    let principal_zeros: Vec<[Complex64; 2]> = (0..nk)
        .map(|ki| [zero_at(ki, 0, 0), zero_at(ki, 0, 1)])
        .collect();

    // Real-axis crossings: sign changes of Im t along each assembled curve.
    let mut crossings = Vec::new();
    for curve in branch_map.values() {
        for w in curve.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.re.is_nan() || b.re.is_nan() {
                continue;
            }
            if a.im == 0.0 {
                crossings.push(a.re);
            } else if a.im * b.im < 0.0 {
                let f = a.im / (a.im - b.im);
                crossings.push(a.re + f * (b.re - a.re));
            }
        }
    }
    crossings.retain(|t| *t > 1e-9 && t.is_finite());
    crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    crossings.dedup_by(|a, b| (*a - *b).abs() < 1e-6);

    Ok(FisherZeroSet {
        k_grid: k_grid.to_vec(),
        coefficients,
        eigenvalues,
        principal_zeros,
        branches: branch_map,
        flagged_k,
        crossings,
    })
}

impl FisherZeroSet {
    /// Largest back-substitution residual over all finite curve points.
    pub fn max_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for ((_, _), curve) in self.branches.iter() {
            for (ki, t) in curve.iter().enumerate() {
                if t.re.is_nan() {
                    continue;
                }
                let r = fisher_residual(&self.coefficients[ki], self.eigenvalues[ki], *t);
                worst = worst.max(r);
            }
        }
        worst
    }
}
