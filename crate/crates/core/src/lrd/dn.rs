//! The exact normalization d_N and chaos covariance sums.
//!
//! d_N^2 = Var(sum_{j<=N} H_m(X_j^{(1)})) = m! sum_{|k|<N} (N-|k|) rho(k)^m
//! with rho = r^{(1,1)}, using E[H_m(X) H_m(Y)] = m! rho^m for jointly
//! standard pairs. That identity (and its multivariate matching form used
//! for limit variances) is an implementation fact checked against Monte
//! Carlo oracles in the test suites, not something the asymptotics supply.

use nalgebra::DMatrix;

use super::LrdModel;
use crate::error::{Error, Result};
use crate::hermite::{ChaosProjection, MultiIndex};
use crate::scalar::Scalar;

/// d_N computed in O(N) from the exact double-sum collapse.
pub fn d_n_exact<T: Scalar>(model: &LrdModel, m: usize, n: usize) -> T {
    assert!(m >= 1 && n >= 1, "m >= 1 and N >= 1");
    let mut acc = T::from_usize_c(n); // k = 0 term, rho(0) = 1
    for k in 1..n {
        let rho: T = model.rho11(k);
        acc += T::from_f64_c(2.0) * T::from_usize_c(n - k) * rho.powi(m as i32);
    }
    (crate::hermite::factorial_t::<T>(m) * acc).sqrt()
}

/// Reference slope 1 - mD/2 of log d_N against log N (valid for mD < 1).
pub fn d_n_asymptotic_exponent(model: &LrdModel, m: usize) -> Result<f64> {
    let md = m as f64 * model.memory_exponent();
    if md >= 1.0 {
        return Err(Error::RegimeViolation {
            m,
            d: model.memory_exponent(),
        });
    }
    Ok(1.0 - md / 2.0)
}

/// E[H_l(X) H_l'(Y)] for jointly Gaussian standard vectors with cross
/// covariance Sigma_ij = E[X_i Y_j]: zero unless |l| = |l'|, else the sum
/// over nonnegative integer matrices K with row sums l and column sums l'
/// of prod_i l_i! prod_j l'_j! prod_ij Sigma_ij^{K_ij} / K_ij!.
pub fn hermite_product_expectation<T: Scalar>(
    l: &MultiIndex,
    lp: &MultiIndex,
    sigma: &DMatrix<T>,
) -> T {
    if l.order() != lp.order() {
        return T::zero();
    }
    let p = l.dim();
    let q = lp.dim();
    debug_assert_eq!(sigma.nrows(), p);
    debug_assert_eq!(sigma.ncols(), q);
    let mut col_remaining: Vec<u32> = lp.exponents().to_vec();
    let factor = T::from_f64_c((l.factorial_product() * lp.factorial_product()) as f64);
    factor * matching_sum(l.exponents(), &mut col_remaining, 0, sigma, T::one())
}

fn matching_sum<T: Scalar>(
    rows: &[u32],
    cols: &mut [u32],
    row: usize,
    sigma: &DMatrix<T>,
    weight: T,
) -> T {
    if row == rows.len() {
        return if cols.iter().all(|&c| c == 0) {
            weight
        } else {
            T::zero()
        };
    }
    let budget = rows[row];
    let mut acc = T::zero();
    distribute(budget, 0, cols, sigma, row, weight, &mut acc, rows);
    acc
}

/// Distribute `remaining` units of row `row` over columns `col..`,
/// multiplying sigma powers and 1/K_ij! as we go.
#[allow(clippy::too_many_arguments)]
fn distribute<T: Scalar>(
    remaining: u32,
    col: usize,
    cols: &mut [u32],
    sigma: &DMatrix<T>,
    row: usize,
    weight: T,
    acc: &mut T,
    rows: &[u32],
) {
    if col == cols.len() {
        if remaining == 0 {
            *acc += matching_sum(rows, cols, row + 1, sigma, weight);
        }
        return;
    }
    let max_here = remaining.min(cols[col]);
    for k in 0..=max_here {
        let mut w = weight;
        for step in 0..k {
            w *= sigma[(row, col)] / T::from_usize_c(step as usize + 1);
        }
        cols[col] -= k;
        distribute(remaining - k, col + 1, cols, sigma, row, w, acc, rows);
        cols[col] += k;
    }
}

/// Cross covariance of the leading chaos term between times 0 and k:
/// sum over l, l' of (J_l / prod l!) (J_l' / prod l'!) E[H_l(X_0) H_l'(X_k)].
pub fn chaos_cross_covariance<T: Scalar>(
    proj: &ChaosProjection<T>,
    model: &LrdModel,
    k: i64,
) -> T {
    let sigma = if k >= 0 {
        model.cross_covariance::<T>(k as usize)
    } else {
        model.cross_covariance::<T>((-k) as usize).transpose()
    };
    let mut acc = T::zero();
    for (l, &jl) in proj.coefficients() {
        let wl = jl / T::from_f64_c(l.factorial_product() as f64);
        for (lp, &jlp) in proj.coefficients() {
            let wlp = jlp / T::from_f64_c(lp.factorial_product() as f64);
            acc += wl * wlp * hermite_product_expectation(l, lp, &sigma);
        }
    }
    acc
}

/// Var(sum_{j<=N} chaos(X_j)) by the exact covariance double sum.
pub fn chaos_partial_sum_variance<T: Scalar>(
    proj: &ChaosProjection<T>,
    model: &LrdModel,
    n: usize,
) -> T {
    let mut acc = T::from_usize_c(n) * chaos_cross_covariance(proj, model, 0);
    for k in 1..n {
        let fwd = chaos_cross_covariance(proj, model, k as i64);
        let bwd = chaos_cross_covariance(proj, model, -(k as i64));
        acc += T::from_usize_c(n - k) * (fwd + bwd);
    }
    acc
}
