//! Hermite polynomial arithmetic.
//!
//! Probabilists' convention throughout: H_0 = 1, H_1 = x, and
//! H_{k+1}(x) = x H_k(x) - k H_{k-1}(x), orthogonal under the standard
//! normal weight with E[H_j H_k] = k! δ_jk. Multivariate polynomials are
//! coordinatewise products indexed by a [`MultiIndex`].

mod basis;
mod multi_index;
mod projection;

pub use basis::{build_basis_change, fold_projection, tilde_j, BasisChange, BasisOptions};
pub use multi_index::{binomial, enumerate_multi_indices, factorial, multi_index_count, MultiIndex};
pub use projection::ChaosProjection;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Evaluate H_k(x) by the three-term recurrence.
pub fn hermite_eval<T: Scalar>(order: usize, x: T) -> T {
    if order == 0 {
        return T::one();
    }
    let mut prev = T::one();
    let mut cur = x;
    for k in 1..order {
        let next = x * cur - T::from_usize_c(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Evaluate the multivariate polynomial H_l(x) = prod_i H_{l_i}(x_i).
pub fn hermite_multi_eval<T: Scalar>(l: &MultiIndex, x: &[T]) -> Result<T> {
    if l.dim() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            got: x.len(),
        });
    }
    Ok(l
        .exponents()
        .iter()
        .zip(x)
        .fold(T::one(), |acc, (&li, &xi)| acc * hermite_eval(li as usize, xi)))
}

/// n! as a scalar.
pub fn factorial_t<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::from_usize_c(i))
}

/// Right-hand side of the Hermite addition formula:
/// sum over |l| = m of m!/(l_1!...l_p!) * prod_i a_i^{l_i} H_{l_i}(x_i).
///
/// For a unit vector `a` this equals H_m(a . x); the pair is checked by the
/// identity suites.
pub fn addition_formula_rhs<T: Scalar>(a: &[T], x: &[T], m: usize) -> Result<T> {
    if a.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: x.len(),
        });
    }
    let norm2 = a.iter().fold(T::zero(), |acc, &ai| acc + ai * ai);
    let tol = T::from_f64_c(1e-12);
    if (norm2.sqrt() - T::one()).abs() > tol {
        return Err(Error::NonUnitVector {
            norm: norm2.sqrt().to_f64_c(),
        });
    }
    let m_fact = factorial_t::<T>(m);
    let mut sum = T::zero();
    for l in enumerate_multi_indices(a.len(), m) {
        let mut term = m_fact / T::from_f64_c(l.factorial_product() as f64);
        for ((&li, &ai), &xi) in l.exponents().iter().zip(a).zip(x) {
            let li = li as usize;
            if li > 0 {
                term = term * ai.powi(li as i32) * hermite_eval(li, xi);
            }
        }
        sum += term;
    }
    Ok(sum)
}
