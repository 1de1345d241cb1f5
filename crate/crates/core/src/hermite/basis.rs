//! Basis change between products of univariate Hermite polynomials and the
//! folded polynomials H_m(a_k . x).
//!
//! For each multi-index k of order m a unit vector a_k is drawn; the matrix
//! A holds the degree-m monomials of those vectors and B solves
//! A B = diag((m!)^{-1} l_1! ... l_p!) over the shared lexicographic index
//! order. Random unit vectors make A invertible almost surely; draws are
//! retried until a conditioning floor and the identity residual hold.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::multi_index::{enumerate_multi_indices, MultiIndex};
use super::projection::ChaosProjection;
use super::factorial_t;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed;

#[derive(Clone, Copy, Debug)]
pub struct BasisOptions {
    /// Reject draws with sigma_min < floor * sigma_max. Scale-invariant:
    /// the raw determinant of a monomial matrix shrinks geometrically with
    /// its size even when the matrix is perfectly usable.
    pub conditioning_floor: f64,
    /// Required max-norm residual of A B - diag.
    pub residual_tol: f64,
    pub max_attempts: usize,
}

impl Default for BasisOptions {
    fn default() -> Self {
        BasisOptions {
            conditioning_floor: 1e-6,
            residual_tol: 1e-8,
            max_attempts: 50,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BasisChange<T> {
    p: usize,
    m: usize,
    indices: Vec<MultiIndex>,
    coeff_vectors: Vec<DVector<T>>,
    a: DMatrix<T>,
    a_inv: DMatrix<T>,
    b: DMatrix<T>,
    residual: T,
    cond: T,
}

impl<T: Scalar> BasisChange<T> {
    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn order(&self) -> usize {
        self.m
    }

    /// Shared lexicographic index order of rows and columns.
    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Unit vector a_k for the index at position `k` in [`Self::indices`].
    pub fn coeff_vector(&self, k: usize) -> &DVector<T> {
        &self.coeff_vectors[k]
    }

    pub fn matrix_a(&self) -> &DMatrix<T> {
        &self.a
    }

    pub fn matrix_a_inv(&self) -> &DMatrix<T> {
        &self.a_inv
    }

    pub fn matrix_b(&self) -> &DMatrix<T> {
        &self.b
    }

    /// Max-norm residual of A B - diag achieved at construction.
    pub fn residual(&self) -> T {
        self.residual
    }

    /// Spectral condition number of A.
    pub fn condition(&self) -> T {
        self.cond
    }

    /// b(k, l) entry by index positions.
    pub fn b_entry(&self, k: usize, l: usize) -> T {
        self.b[(k, l)]
    }

    /// The diagonal target: (m!)^{-1} l_1! ... l_p! at each index.
    pub fn diagonal_target(&self) -> DVector<T> {
        let m_fact = factorial_t::<T>(self.m);
        DVector::from_iterator(
            self.indices.len(),
            self.indices
                .iter()
                .map(|l| T::from_f64_c(l.factorial_product() as f64) / m_fact),
        )
    }
}

/// Build the basis change for (p, m) deterministically from `seed`.
pub fn build_basis_change<T: Scalar>(p: usize, m: usize, seed_val: u64) -> Result<BasisChange<T>> {
    build_basis_change_with(p, m, seed_val, BasisOptions::default())
}

pub fn build_basis_change_with<T: Scalar>(
    p: usize,
    m: usize,
    seed_val: u64,
    opts: BasisOptions,
) -> Result<BasisChange<T>> {
    assert!(p >= 1 && m >= 1, "p >= 1 and m >= 1");
    let indices = enumerate_multi_indices(p, m);
    let size = indices.len();
    let mut best_cond = f64::INFINITY;

    for attempt in 0..opts.max_attempts {
        let mut rng = seed::stream(seed_val, &[p as u64, m as u64, attempt as u64]);
        let vectors: Vec<DVector<T>> = (0..size).map(|_| draw_unit_vector(p, &mut rng)).collect();

        let mut a = DMatrix::<T>::zeros(size, size);
        for (col, v) in vectors.iter().enumerate() {
            for (row, l) in indices.iter().enumerate() {
                let mut entry = T::one();
                for (i, &li) in l.exponents().iter().enumerate() {
                    if li > 0 {
                        entry *= v[i].powi(li as i32);
                    }
                }
                a[(row, col)] = entry;
            }
        }

        let svd = a.clone().svd(false, false);
        let sigma_max = svd.singular_values.max();
        let sigma_min = svd.singular_values.min();
        let cond = (sigma_max / sigma_min).to_f64_c();
        best_cond = best_cond.min(cond);
        if sigma_min < T::from_f64_c(opts.conditioning_floor) * sigma_max {
            continue;
        }

        let lu = a.clone().lu();
        let Some(mut a_inv) = a.clone().try_inverse() else {
            continue;
        };
        // One refinement pass on the inverse.
        let eye = DMatrix::<T>::identity(size, size);
        let inv_err = &eye - &a * &a_inv;
        a_inv = &a_inv + &a_inv * inv_err;

        let m_fact = factorial_t::<T>(m);
        let mut lambda = DMatrix::<T>::zeros(size, size);
        for (i, l) in indices.iter().enumerate() {
            lambda[(i, i)] = T::from_f64_c(l.factorial_product() as f64) / m_fact;
        }

        // B solves A B = diag; refine the solve so the identity holds to
        // well below the tolerance even for moderately conditioned draws.
        let Some(mut b) = lu.solve(&lambda) else {
            continue;
        };
        for _ in 0..2 {
            let resid = &lambda - &a * &b;
            let Some(db) = lu.solve(&resid) else { break };
            b += db;
        }

        let residual = (&lambda - &a * &b).abs().max();
        if residual.to_f64_c() <= opts.residual_tol {
            return Ok(BasisChange {
                p,
                m,
                indices,
                coeff_vectors: vectors,
                a,
                a_inv,
                b,
                residual,
                cond: T::from_f64_c(cond),
            });
        }
    }

    Err(Error::BasisConditioning {
        attempts: opts.max_attempts,
        best_cond,
        floor: opts.conditioning_floor,
    })
}

/// Unit vector with the first nonzero component positive (sign-canonical,
/// so p = 1 always yields a = (1)).
fn draw_unit_vector<T: Scalar>(p: usize, rng: &mut impl rand::Rng) -> DVector<T> {
    loop {
        let mut v = DVector::<T>::from_iterator(p, (0..p).map(|_| T::standard_normal(rng)));
        let norm = v.norm();
        if norm.to_f64_c() < 1e-8 {
            continue;
        }
        v /= norm;
        if let Some(first) = v.iter().find(|c| c.abs() > T::from_f64_c(1e-12)) {
            if *first < T::zero() {
                v = -v;
            }
        }
        return v;
    }
}

/// Fold order-m chaos coefficients through B:
/// I(f; k) = sum over |l| = m of J_l (l_1! ... l_p!)^{-1} b(k, l).
///
/// Satisfies sum_k I(f;k) H_m(a_k . x) = sum_l J_l (prod l_i!)^{-1} H_l(x).
pub fn fold_projection<T: Scalar>(
    proj: &ChaosProjection<T>,
    bc: &BasisChange<T>,
) -> Result<BTreeMap<MultiIndex, T>> {
    if proj.dim() != bc.dim() || proj.order() != bc.order() {
        return Err(Error::ShapeMismatch {
            proj_p: proj.dim(),
            proj_m: proj.order(),
            basis_p: bc.dim(),
            basis_m: bc.order(),
        });
    }
    let mut folded = BTreeMap::new();
    for (k_pos, k) in bc.indices().iter().enumerate() {
        let mut acc = T::zero();
        for (l_pos, l) in bc.indices().iter().enumerate() {
            let j = proj.coefficient(l);
            if j != T::zero() {
                acc += j / T::from_f64_c(l.factorial_product() as f64) * bc.b_entry(k_pos, l_pos);
            }
        }
        folded.insert(k.clone(), acc);
    }
    Ok(folded)
}

pub use super::projection::tilde_j;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{hermite_eval, hermite_multi_eval};

    fn check_identity(bc: &BasisChange<f64>, tol: f64) {
        let size = bc.indices().len();
        let target = bc.diagonal_target();
        let prod = bc.matrix_a() * bc.matrix_b();
        for r in 0..size {
            for c in 0..size {
                let expect = if r == c { target[r] } else { 0.0 };
                assert!(
                    (prod[(r, c)] - expect).abs() <= tol,
                    "entry ({r},{c}): {} vs {expect}",
                    prod[(r, c)]
                );
            }
        }
    }

    #[test]
    fn single_monomial_case() {
        let bc = build_basis_change::<f64>(1, 3, 99).unwrap();
        assert_eq!(bc.indices().len(), 1);
        assert!((bc.matrix_a()[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((bc.matrix_b()[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_for_spec_cases() {
        let bc = build_basis_change::<f64>(2, 2, 42).unwrap();
        assert_eq!(bc.indices().len(), 3);
        check_identity(&bc, 1e-8);

        let bc = build_basis_change::<f64>(3, 2, 7).unwrap();
        assert_eq!(bc.indices().len(), 6);
        check_identity(&bc, 1e-8);
    }

    #[test]
    fn identity_across_full_range() {
        for p in 1..=4 {
            for m in 1..=4 {
                let bc = build_basis_change::<f64>(p, m, 1000 + (p * 10 + m) as u64).unwrap();
                check_identity(&bc, 1e-8);
                for v in (0..bc.indices().len()).map(|k| bc.coeff_vector(k)) {
                    assert!((v.norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = build_basis_change::<f64>(3, 3, 5).unwrap();
        let b = build_basis_change::<f64>(3, 3, 5).unwrap();
        assert_eq!(a.matrix_a(), b.matrix_a());
        assert_eq!(a.matrix_b(), b.matrix_b());
    }

    #[test]
    fn impossible_floor_reports_best_conditioning() {
        let opts = BasisOptions {
            conditioning_floor: 1.5, // sigma_min > 1.5 sigma_max is impossible
            ..BasisOptions::default()
        };
        let err = build_basis_change_with::<f64>(2, 2, 3, opts).unwrap_err();
        match err {
            Error::BasisConditioning { best_cond, .. } => assert!(best_cond.is_finite()),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn fold_zero_projection() {
        let bc = build_basis_change::<f64>(2, 2, 11).unwrap();
        let proj = ChaosProjection::new(2, 2, BTreeMap::new(), 0.0).unwrap();
        let folded = fold_projection(&proj, &bc).unwrap();
        assert!(folded.values().all(|&v| v == 0.0));
    }

    #[test]
    fn fold_univariate_order_two() {
        // p = 1, m = 2: B = [1], I = c * (2!)^{-1} * 1 = c/2.
        let bc = build_basis_change::<f64>(1, 2, 17).unwrap();
        let c = 3.7;
        let map: BTreeMap<_, _> = [(MultiIndex::new(vec![2]), c)].into_iter().collect();
        let proj = ChaosProjection::new(1, 2, map, 0.0).unwrap();
        let folded = fold_projection(&proj, &bc).unwrap();
        let got = folded.values().next().copied().unwrap();
        assert!((got - c / 2.0).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn folding_identity_random_points() {
        let mut rng = crate::seed::stream(4242, &[]);
        for &(p, m) in &[(2usize, 1usize), (2, 2), (3, 2), (2, 3)] {
            let bc = build_basis_change::<f64>(p, m, 7_000 + (p * 10 + m) as u64).unwrap();
            let mut map = BTreeMap::new();
            for l in bc.indices() {
                map.insert(l.clone(), f64::standard_normal(&mut rng));
            }
            let proj = ChaosProjection::new(p, m, map, 0.0).unwrap();
            let folded = fold_projection(&proj, &bc).unwrap();
            for _ in 0..100 {
                let x: Vec<f64> = (0..p).map(|_| f64::standard_normal(&mut rng)).collect();
                let chaos_side: f64 = bc
                    .indices()
                    .iter()
                    .map(|l| {
                        proj.coefficient(l) / l.factorial_product() as f64
                            * hermite_multi_eval(l, &x).unwrap()
                    })
                    .sum();
                let folded_side: f64 = bc
                    .indices()
                    .iter()
                    .enumerate()
                    .map(|(k_pos, k)| {
                        let a_k = bc.coeff_vector(k_pos);
                        let dot = a_k.iter().zip(&x).map(|(ai, xi)| ai * xi).sum::<f64>();
                        folded[k] * hermite_eval(m, dot)
                    })
                    .sum();
                assert!(
                    (chaos_side - folded_side).abs() <= 1e-9,
                    "p={p} m={m}: {chaos_side} vs {folded_side}"
                );
            }
        }
    }
}
