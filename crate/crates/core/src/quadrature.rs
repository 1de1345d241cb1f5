//! Gaussian-measure quadrature.
//!
//! Rules integrate against the standard normal weight. The univariate rule
//! comes from the Golub-Welsch eigendecomposition of the Jacobi matrix for
//! the probabilists' recurrence (diagonal 0, off-diagonal sqrt(k)); weights
//! sum to one. Tensor products cover p <= 3; above that a randomly shifted
//! Kronecker lattice with replicated shifts provides error estimates by
//! replication, which stays honest for integrands with kinks.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::seed;

/// Univariate Gauss-Hermite rule for the standard normal weight.
#[derive(Clone, Debug)]
pub struct GaussHermite<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> GaussHermite<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut jacobi = DMatrix::<T>::zeros(n, n);
        for k in 1..n {
            let b = T::from_usize_c(k).sqrt();
            jacobi[(k - 1, k)] = b;
            jacobi[(k, k - 1)] = b;
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(T, T)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));

        // Symmetrize the +/- node pairs; the rule is symmetric by theory
        // and this removes the eigensolver's odd-moment noise.
        let mut nodes: Vec<T> = pairs.iter().map(|p| p.0).collect();
        let mut weights: Vec<T> = pairs.iter().map(|p| p.1).collect();
        let half = T::from_f64_c(0.5);
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = half * (nodes[j] - nodes[i]);
            nodes[i] = -x;
            nodes[j] = x;
            let w = half * (weights[i] + weights[j]);
            weights[i] = w;
            weights[j] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        GaussHermite { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// E[f(Z)], Z standard normal.
    pub fn integrate(&self, mut f: impl FnMut(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }

    /// E[f(Z)] for Z standard p-variate normal via the tensor product rule.
    pub fn integrate_tensor(&self, p: usize, mut f: impl FnMut(&[T]) -> T) -> T {
        let n = self.nodes.len();
        let total = n.checked_pow(p as u32).expect("tensor grid size overflow");
        let mut x = vec![T::zero(); p];
        let mut acc = T::zero();
        for flat in 0..total {
            let mut rest = flat;
            let mut w = T::one();
            for xi in x.iter_mut() {
                let digit = rest % n;
                rest /= n;
                *xi = self.nodes[digit];
                w *= self.weights[digit];
            }
            acc += w * f(&x);
        }
        acc
    }
}

/// Quadrature selection for coefficient and mean computations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadSpec {
    /// Points per axis for the tensor rule (p <= 3).
    pub tensor_order: usize,
    /// log2 of the lattice size for the QMC fallback (p > 3).
    pub qmc_log2_points: usize,
    /// Randomized replicates for the QMC error estimate.
    pub qmc_replicates: usize,
    /// Seed for the QMC shifts.
    pub qmc_seed: u64,
    /// Hard cap on the reported error estimate; `None` disables the check.
    pub tolerance: Option<f64>,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            tensor_order: 64,
            qmc_log2_points: 16,
            qmc_replicates: 8,
            qmc_seed: 0x9d2c_5680,
            tolerance: None,
        }
    }
}

const SHIFT_PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// E[f(Z)] with a replicated-shift Kronecker lattice; returns (mean, se).
pub fn qmc_gaussian<T: Scalar>(
    p: usize,
    spec: &QuadSpec,
    mut f: impl FnMut(&[T]) -> T,
) -> (T, T) {
    assert!(p <= SHIFT_PRIMES.len(), "QMC rule limited to p <= 16");
    let n = 1usize << spec.qmc_log2_points;
    let reps = spec.qmc_replicates.max(2);
    let alphas: Vec<f64> = SHIFT_PRIMES[..p]
        .iter()
        .map(|&q| (q as f64).sqrt().fract())
        .collect();
    let mut rng = seed::stream(spec.qmc_seed, &[p as u64]);
    let mut rep_means = Vec::with_capacity(reps);
    let mut z = vec![T::zero(); p];
    for _ in 0..reps {
        let shift: Vec<f64> = (0..p).map(|_| rng.random::<f64>()).collect();
        let mut acc = T::zero();
        for k in 0..n {
            for i in 0..p {
                let u = (k as f64 * alphas[i] + shift[i]).fract();
                let u = u.clamp(1e-15, 1.0 - 1e-15);
                z[i] = T::norm_quantile(T::from_f64_c(u));
            }
            acc += f(&z);
        }
        rep_means.push(acc / T::from_usize_c(n));
    }
    let reps_t = T::from_usize_c(reps);
    let mean = rep_means.iter().fold(T::zero(), |a, &b| a + b) / reps_t;
    let var = rep_means
        .iter()
        .fold(T::zero(), |a, &b| a + (b - mean) * (b - mean))
        / (reps_t - T::one());
    (mean, (var / reps_t).sqrt())
}
