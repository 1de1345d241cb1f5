//! Long-range dependent Gaussian simulation and the function-indexed
//! sequential empirical process.
//!
//! The crate provides, bottom-up:
//!
//! * Hermite polynomial arithmetic: multivariate evaluation, the addition
//!   formula for folded arguments, and the monomial basis change between
//!   product polynomials and folded polynomials ([`hermite`]);
//! * parametrized function classes with exact or quadrature Gaussian
//!   means and chaos coefficients, L2 bracket covers, and the entropy and
//!   moment conditions ([`function_class`]);
//! * the multivariate LRD Gaussian law with exact (Cholesky) and FFT
//!   (circulant embedding) samplers and the exact normalization d_N
//!   ([`lrd`]);
//! * the sequential empirical process R_N(f, t) and the reduced statistic
//!   S_N(n, f) with its sup functional ([`sep`]);
//! * a seeded Monte Carlo harness that turns the asymptotic statements
//!   into desk-scale verdicts with reproducible reports ([`experiments`]).
//!
//! Numeric kernels are generic over [`scalar::Scalar`] (`f64` or `f32`);
//! the experiment layer is instantiated at `f64`.

pub mod error;
pub mod function_class;
pub mod hermite;
pub mod lrd;
pub mod quadrature;
pub mod report;
pub mod sep;
pub mod scalar;
pub mod seed;

pub use error::{Error, Result};
pub use scalar::Scalar;
