//! The multivariate long-range dependent Gaussian law.
//!
//! Cross-covariances follow r^{(i,j)}(k) = c_ij k^{-D} L(k) for k >= 1 with
//! identity lag-0 covariance. The coefficients c_ij are otherwise
//! unconstrained (asymmetric C is allowed), so positive semidefiniteness is
//! validated, never assumed: the decay alone does not make a covariance.

mod dn;
mod sampler;

pub use dn::{
    chaos_partial_sum_variance, d_n_asymptotic_exponent, d_n_exact, hermite_product_expectation,
};
pub use sampler::{
    sample_cholesky, sample_circulant, CholeskySampler, CirculantOptions, CirculantSampler,
    Generator, PathSample,
};

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Slowly varying factor L(k).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum SlowlyVarying {
    One,
    /// L(k) = (ln(e + k))^beta.
    LogPow { beta: f64 },
}

impl SlowlyVarying {
    pub fn eval<T: Scalar>(&self, k: usize) -> T {
        match self {
            SlowlyVarying::One => T::one(),
            SlowlyVarying::LogPow { beta } => {
                let e = T::from_f64_c(std::f64::consts::E);
                (e + T::from_usize_c(k)).ln().powf(T::from_f64_c(*beta))
            }
        }
    }
}

/// The process law: dimension p, memory exponent D, coefficient matrix
/// (c_ij), slowly varying factor L.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LrdModel {
    pub p: usize,
    pub d: f64,
    /// Row-major coefficient matrix; c[i][j] multiplies r^{(i+1,j+1)}.
    pub c: Vec<Vec<f64>>,
    #[serde(default = "default_l")]
    pub l: SlowlyVarying,
}

fn default_l() -> SlowlyVarying {
    SlowlyVarying::One
}

impl LrdModel {
    pub fn new(p: usize, d: f64, c: Vec<Vec<f64>>, l: SlowlyVarying) -> Result<Self> {
        let model = LrdModel { p, d, c, l };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1 {
            return Err(Error::InvalidModel("dimension p must be >= 1".into()));
        }
        if !(self.d > 0.0 && self.d < 1.0) {
            return Err(Error::InvalidModel(format!(
                "memory exponent D must lie in (0, 1), got {}",
                self.d
            )));
        }
        if self.c.len() != self.p || self.c.iter().any(|row| row.len() != self.p) {
            return Err(Error::InvalidModel(format!(
                "coefficient matrix must be {p} x {p}",
                p = self.p
            )));
        }
        if self
            .c
            .iter()
            .all(|row| row.iter().all(|&v| v == 0.0))
        {
            return Err(Error::InvalidModel(
                "coefficients c_ij must not all be zero".into(),
            ));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn memory_exponent(&self) -> f64 {
        self.d
    }

    pub fn coefficient_matrix<T: Scalar>(&self) -> DMatrix<T> {
        DMatrix::from_fn(self.p, self.p, |i, j| T::from_f64_c(self.c[i][j]))
    }

    /// r^{(i,j)}(k) as a matrix: identity at lag 0, c_ij k^{-D} L(k) else.
    pub fn cross_covariance<T: Scalar>(&self, k: usize) -> DMatrix<T> {
        if k == 0 {
            return DMatrix::identity(self.p, self.p);
        }
        let scale = self.decay::<T>(k);
        DMatrix::from_fn(self.p, self.p, |i, j| T::from_f64_c(self.c[i][j]) * scale)
    }

    /// k^{-D} L(k) for k >= 1.
    pub fn decay<T: Scalar>(&self, k: usize) -> T {
        debug_assert!(k >= 1);
        let l: T = self.l.eval(k);
        T::from_usize_c(k).powf(T::from_f64_c(-self.d)) * l
    }

    /// r^{(1,1)}(k), the sequence entering d_N.
    pub fn rho11<T: Scalar>(&self, k: usize) -> T {
        if k == 0 {
            T::one()
        } else {
            T::from_f64_c(self.c[0][0]) * self.decay::<T>(k)
        }
    }

    /// Stable digest of the model parameters.
    pub fn digest(&self) -> String {
        let canon = serde_json::to_string(self).expect("model serializes");
        format!("{:016x}", crate::seed::fnv1a(canon.as_bytes()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PsdMethod {
    DenseEigen,
    CirculantSpectrum,
}

/// Positive-semidefiniteness report for the length-N block-Toeplitz
/// covariance.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PsdReport {
    pub min_eigenvalue: f64,
    pub threshold: f64,
    pub valid: bool,
    pub method: PsdMethod,
    pub n: usize,
}

/// Smallest eigenvalue of the Np x Np covariance (dense for N <= 512) or
/// of the circulant spectral blocks (large N). The verdict fails below
/// -1e-10 times the trace scale N p.
pub fn validate_psd(model: &LrdModel, n: usize) -> PsdReport {
    assert!(n >= 2, "N >= 2");
    let threshold = -1e-10 * (n * model.dim()) as f64;
    if n <= 512 {
        let sigma = block_toeplitz::<f64>(model, n);
        let eigs = sigma.symmetric_eigenvalues();
        let min_eigenvalue = eigs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        PsdReport {
            min_eigenvalue,
            threshold,
            valid: min_eigenvalue >= threshold,
            method: PsdMethod::DenseEigen,
            n,
        }
    } else {
        let m = (2 * n).next_power_of_two();
        let blocks = spectral_blocks::<f64>(model, m);
        let mut min_eigenvalue = f64::INFINITY;
        for f in &blocks {
            let eigs = f.clone().symmetric_eigen().eigenvalues;
            for &lam in eigs.iter() {
                min_eigenvalue = min_eigenvalue.min(lam);
            }
        }
        PsdReport {
            min_eigenvalue,
            threshold,
            valid: min_eigenvalue >= threshold,
            method: PsdMethod::CirculantSpectrum,
            n,
        }
    }
}

/// Dense Np x Np covariance of (X_1, ..., X_N) with time-major layout.
pub(crate) fn block_toeplitz<T: Scalar>(model: &LrdModel, n: usize) -> DMatrix<T> {
    let p = model.dim();
    let mut sigma = DMatrix::<T>::zeros(n * p, n * p);
    let blocks: Vec<DMatrix<T>> = (0..n).map(|k| model.cross_covariance(k)).collect();
    for a in 0..n {
        for b in a..n {
            let r = &blocks[b - a];
            for i in 0..p {
                for j in 0..p {
                    // Cov(X_a^{(i)}, X_b^{(j)}) = r^{(i,j)}(b - a).
                    sigma[(a * p + i, b * p + j)] = r[(i, j)];
                    sigma[(b * p + j, a * p + i)] = r[(i, j)];
                }
            }
        }
    }
    sigma
}

/// Hermitian spectral blocks F_j of the length-M block-circulant embedding
/// of the two-sided covariance sequence.
pub(crate) fn spectral_blocks<T: Scalar>(model: &LrdModel, m: usize) -> Vec<DMatrix<Complex<T>>> {
    let p = model.dim();
    // Block sequence with S(M - k) = S(k)^T; the midpoint is symmetrized.
    let mut seq: Vec<DMatrix<T>> = Vec::with_capacity(m);
    for k in 0..m {
        let lag = k.min(m - k);
        let r = model.cross_covariance::<T>(lag);
        let block = if k <= m / 2 {
            if k == m / 2 {
                (&r + r.transpose()) * T::from_f64_c(0.5)
            } else {
                r
            }
        } else {
            r.transpose()
        };
        seq.push(block);
    }

    let mut planner = rustfft::FftPlanner::<T>::new();
    let fft = planner.plan_fft_forward(m);
    let mut blocks = vec![DMatrix::<Complex<T>>::zeros(p, p); m];
    let mut buf = vec![Complex::new(T::zero(), T::zero()); m];
    for i in 0..p {
        for j in 0..p {
            for (k, slot) in buf.iter_mut().enumerate() {
                *slot = Complex::new(seq[k][(i, j)], T::zero());
            }
            fft.process(&mut buf);
            for (f, &v) in blocks.iter_mut().zip(buf.iter()) {
                f[(i, j)] = v;
            }
        }
    }
    // Enforce Hermitian symmetry against FFT rounding.
    let half = Complex::new(T::from_f64_c(0.5), T::zero());
    for f in &mut blocks {
        let h = f.adjoint();
        *f = (&*f + h) * half;
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model_p1(c11: f64, d: f64) -> LrdModel {
        LrdModel::new(1, d, vec![vec![c11]], SlowlyVarying::One).unwrap()
    }

    #[test]
    fn construction_validates_definition() {
        assert!(LrdModel::new(1, 0.4, vec![vec![0.0]], SlowlyVarying::One).is_err());
        assert!(LrdModel::new(1, 0.0, vec![vec![1.0]], SlowlyVarying::One).is_err());
        assert!(LrdModel::new(1, 1.0, vec![vec![1.0]], SlowlyVarying::One).is_err());
        assert!(LrdModel::new(2, 0.4, vec![vec![1.0]], SlowlyVarying::One).is_err());
        assert!(LrdModel::new(2, 0.4, vec![vec![0.5, 0.0], vec![0.0, 0.5]], SlowlyVarying::One).is_ok());
    }

    #[test]
    fn cross_covariance_examples() {
        let m = model_p1(1.0, 0.4);
        let r0 = m.cross_covariance::<f64>(0);
        assert_eq!(r0[(0, 0)], 1.0);

        let r16 = m.cross_covariance::<f64>(16);
        assert!((r16[(0, 0)] - 16f64.powf(-0.4)).abs() < 1e-15);
        assert!((r16[(0, 0)] - 0.32987697769322355).abs() < 1e-10);

        let diag = LrdModel::new(
            2,
            0.3,
            vec![vec![0.7, 0.0], vec![0.0, 0.4]],
            SlowlyVarying::One,
        )
        .unwrap();
        let r1 = diag.cross_covariance::<f64>(1);
        assert_eq!(r1[(0, 0)], 0.7);
        assert_eq!(r1[(1, 1)], 0.4);
        assert_eq!(r1[(0, 1)], 0.0);
    }

    #[test]
    fn slowly_varying_log_pow() {
        let m = LrdModel::new(
            1,
            0.4,
            vec![vec![0.5]],
            SlowlyVarying::LogPow { beta: 1.5 },
        )
        .unwrap();
        let k = 10usize;
        let expect = 0.5 * (10f64).powf(-0.4) * (std::f64::consts::E + 10.0).ln().powf(1.5);
        assert!((m.rho11::<f64>(k) - expect).abs() < 1e-15);
    }

    #[test]
    fn psd_validation_examples() {
        // c11 = 0.8 stays below the validity bound 1/(2 eta(0.4)) ~ 0.854.
        let report = validate_psd(&model_p1(0.8, 0.4), 128);
        assert!(report.valid, "min eig {}", report.min_eigenvalue);

        // c11 = 1 exceeds it; the finite-N matrix is already indefinite.
        let report = validate_psd(&model_p1(1.0, 0.4), 128);
        assert!(!report.valid, "min eig {}", report.min_eigenvalue);
        assert!(report.min_eigenvalue < -0.1);

        // Lag-1 correlation of 2 cannot be a correlation.
        let bad = LrdModel::new(
            2,
            0.9,
            vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            SlowlyVarying::One,
        )
        .unwrap();
        let report = validate_psd(&bad, 64);
        assert!(!report.valid);
    }

    #[test]
    fn psd_circulant_route_agrees_on_validity() {
        let good = LrdModel::new(
            2,
            0.4,
            vec![vec![0.45, 0.3], vec![0.3, 0.45]],
            SlowlyVarying::One,
        )
        .unwrap();
        let dense = validate_psd(&good, 256);
        assert!(dense.valid);
        assert_eq!(dense.method, PsdMethod::DenseEigen);
        let spectral = validate_psd(&good, 1024);
        assert!(spectral.valid);
        assert_eq!(spectral.method, PsdMethod::CirculantSpectrum);

        let bad = model_p1(1.0, 0.4);
        let spectral = validate_psd(&bad, 1024);
        assert!(!spectral.valid);
    }

    #[test]
    fn digest_is_stable_and_distinguishes() {
        let a = model_p1(0.8, 0.4);
        let b = model_p1(0.8, 0.4);
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), model_p1(0.7, 0.4).digest());
    }
}
