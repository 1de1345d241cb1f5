//! Exact (Cholesky) and FFT (circulant embedding) path samplers.
//!
//! Cholesky factors the dense Np x Np covariance and is the small-N oracle.
//! The circulant sampler embeds the two-sided block sequence into a
//! length-M block circulant, takes the Hermitian square root of each
//! spectral block, and synthesizes paths in O(p^2 M log M); negative
//! spectral eigenvalues are clipped to zero with the relative clipped mass
//! recorded, and the embedding doubles when the mass exceeds the ceiling.
//! LRD covariances are exactly the case where embeddings can fail to be
//! nonnegative, hence the diagnostics.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{block_toeplitz, spectral_blocks, LrdModel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed;

pub const CHOLESKY_MAX_N: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Cholesky,
    Circulant,
}

/// One sampled path: N observations of the p-variate process.
#[derive(Clone, Debug)]
pub struct PathSample<T> {
    values: Vec<T>, // row-major N x p
    n: usize,
    p: usize,
    pub model_digest: String,
    pub seed: u64,
    pub generator: Generator,
    /// Relative clipped spectral mass (circulant only).
    pub clipped_mass: Option<T>,
}

impl<T: Scalar> PathSample<T> {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    /// Observation X_j (0-based row).
    pub fn row(&self, j: usize) -> &[T] {
        &self.values[j * self.p..(j + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.values.chunks_exact(self.p)
    }

    /// CSV with one row per observation and a header x1..xp.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.p {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("x{}", i + 1));
        }
        out.push('\n');
        for row in self.rows() {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&crate::report::fmt_float(v.to_f64_c()));
            }
            out.push('\n');
        }
        out
    }
}

/// Exact sampler from the dense covariance factorization.
#[derive(Debug)]
pub struct CholeskySampler<T> {
    factor: DMatrix<T>,
    n: usize,
    p: usize,
    digest: String,
}

impl<T: Scalar> CholeskySampler<T> {
    pub fn new(model: &LrdModel, n: usize) -> Result<Self> {
        model.validate()?;
        if n < 1 || n > CHOLESKY_MAX_N {
            return Err(Error::InvalidConfig(format!(
                "Cholesky sampler supports 1 <= N <= {CHOLESKY_MAX_N}, got {n}"
            )));
        }
        let sigma = block_toeplitz::<T>(model, n);
        match sigma.clone().cholesky() {
            Some(chol) => Ok(CholeskySampler {
                factor: chol.unpack(),
                n,
                p: model.dim(),
                digest: model.digest(),
            }),
            None => {
                let min_eig = sigma
                    .symmetric_eigenvalues()
                    .iter()
                    .fold(f64::INFINITY, |a, &b| a.min(b.to_f64_c()));
                Err(Error::CovarianceNotPsd {
                    min_eigenvalue: min_eig,
                    threshold: 0.0,
                })
            }
        }
    }

    pub fn sample(&self, seed_val: u64) -> PathSample<T> {
        let mut rng = seed::stream(seed_val, &[]);
        let dim = self.n * self.p;
        let z = DVector::<T>::from_iterator(dim, (0..dim).map(|_| T::standard_normal(&mut rng)));
        let x = &self.factor * z;
        PathSample {
            values: x.iter().copied().collect(),
            n: self.n,
            p: self.p,
            model_digest: self.digest.clone(),
            seed: seed_val,
            generator: Generator::Cholesky,
            clipped_mass: None,
        }
    }
}

/// Exact draw from the block-Toeplitz law (factorization recomputed per
/// call; use [`CholeskySampler`] for replicates).
pub fn sample_cholesky<T: Scalar>(model: &LrdModel, n: usize, seed_val: u64) -> Result<PathSample<T>> {
    Ok(CholeskySampler::new(model, n)?.sample(seed_val))
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CirculantOptions {
    /// Ceiling on the relative clipped spectral mass.
    pub clip_ceiling: f64,
    /// Automatic embedding-size doublings before giving up.
    pub max_doublings: usize,
}

impl Default for CirculantOptions {
    fn default() -> Self {
        CirculantOptions {
            clip_ceiling: 1e-3,
            max_doublings: 2,
        }
    }
}

/// FFT sampler from the block-circulant embedding.
pub struct CirculantSampler<T> {
    sqrt_blocks: Vec<DMatrix<Complex<T>>>,
    m: usize,
    n: usize,
    p: usize,
    clipped_mass: T,
    digest: String,
    fft: std::sync::Arc<dyn rustfft::Fft<T>>,
}

impl<T: Scalar> CirculantSampler<T> {
    pub fn new(model: &LrdModel, n: usize, opts: CirculantOptions) -> Result<Self> {
        model.validate()?;
        if n < 2 {
            return Err(Error::InvalidConfig(format!(
                "circulant sampler needs N >= 2, got {n}"
            )));
        }
        let p = model.dim();
        let mut m = (2 * n).next_power_of_two();
        let mut last_mass = f64::INFINITY;
        for doubling in 0..=opts.max_doublings {
            let blocks = spectral_blocks::<T>(model, m);
            let mut clipped = T::zero();
            let mut total = T::zero();
            let mut sqrt_blocks = Vec::with_capacity(m);
            for f in blocks {
                let eig = f.symmetric_eigen();
                let mut lam = DVector::<T>::zeros(p);
                for i in 0..p {
                    let v = eig.eigenvalues[i];
                    total += v.abs();
                    if v < T::zero() {
                        clipped += -v;
                        lam[i] = T::zero();
                    } else {
                        lam[i] = v;
                    }
                }
                // G = U sqrt(diag) U^H, so G G^H equals the clipped block.
                let u = &eig.eigenvectors;
                let mut scaled = u.clone();
                for i in 0..p {
                    let s = Complex::new(lam[i].sqrt(), T::zero());
                    scaled.column_mut(i).iter_mut().for_each(|e| *e *= s);
                }
                sqrt_blocks.push(&scaled * u.adjoint());
            }
            let mass = if total > T::zero() { clipped / total } else { T::zero() };
            last_mass = mass.to_f64_c();
            if last_mass <= opts.clip_ceiling {
                let mut planner = rustfft::FftPlanner::<T>::new();
                let fft = planner.plan_fft_forward(m);
                return Ok(CirculantSampler {
                    sqrt_blocks,
                    m,
                    n,
                    p,
                    clipped_mass: mass,
                    digest: model.digest(),
                    fft,
                });
            }
            if doubling < opts.max_doublings {
                m *= 2;
            }
        }
        Err(Error::ClippedMassExceeded {
            mass: last_mass,
            ceiling: opts.clip_ceiling,
            doublings: opts.max_doublings,
        })
    }

    pub fn embedding_len(&self) -> usize {
        self.m
    }

    pub fn clipped_mass(&self) -> T {
        self.clipped_mass
    }

    pub fn sample(&self, seed_val: u64) -> PathSample<T> {
        let mut rng = seed::stream(seed_val, &[]);
        let (m, p) = (self.m, self.p);
        // Per frequency: W_j = G_j xi_j with xi proper complex Gaussian
        // (components u + iv, u, v ~ N(0, I)). The forward transform then
        // yields Cov(x_{s+k}, x_s) = S(k)^T, matching r^{(i,j)}.
        let mut comp = vec![vec![Complex::new(T::zero(), T::zero()); m]; p];
        let mut xi = DVector::<Complex<T>>::zeros(p);
        for j in 0..m {
            for i in 0..p {
                xi[i] = Complex::new(T::standard_normal(&mut rng), T::standard_normal(&mut rng));
            }
            let w = &self.sqrt_blocks[j] * &xi;
            for i in 0..p {
                comp[i][j] = w[i];
            }
        }
        let scale = T::one() / T::from_usize_c(m).sqrt();
        let mut values = vec![T::zero(); self.n * p];
        for i in 0..p {
            self.fft.process(&mut comp[i]);
            for t in 0..self.n {
                values[t * p + i] = comp[i][t].re * scale;
            }
        }
        PathSample {
            values,
            n: self.n,
            p,
            model_digest: self.digest.clone(),
            seed: seed_val,
            generator: Generator::Circulant,
            clipped_mass: Some(self.clipped_mass),
        }
    }
}

/// Circulant-embedding draw (spectral setup recomputed per call; use
/// [`CirculantSampler`] for replicates).
pub fn sample_circulant<T: Scalar>(
    model: &LrdModel,
    n: usize,
    seed_val: u64,
) -> Result<PathSample<T>> {
    Ok(CirculantSampler::new(model, n, CirculantOptions::default())?.sample(seed_val))
}
