//! Scalar abstraction for the numeric kernels.
//!
//! All core math is generic over [`Scalar`], which bundles the field
//! operations from `nalgebra::RealField` with the special functions the
//! Gaussian computations need (error function, incomplete gamma) and a
//! standard-normal sampler. `f64` is the working type everywhere in the
//! experiment layer; `f32` is supported for the kernels.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftNum;

pub trait Scalar: RealField + FromPrimitive + ToPrimitive + FftNum + Copy {
    fn erf(self) -> Self;
    fn erfc(self) -> Self;
    /// Inverse of `erfc`, defined on (0, 2).
    fn erfc_inv(self) -> Self;
    /// Regularized lower incomplete gamma P(a, x).
    fn gamma_lr(a: Self, x: Self) -> Self;
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    #[inline]
    fn from_f64_c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 conversion")
    }

    #[inline]
    fn from_usize_c(v: usize) -> Self {
        Self::from_usize(v).expect("usize conversion")
    }

    #[inline]
    fn to_f64_c(self) -> f64 {
        self.to_f64().expect("f64 conversion")
    }

    /// Standard normal CDF.
    #[inline]
    fn norm_cdf(self) -> Self {
        let half = Self::from_f64_c(0.5);
        half * (-self / Self::from_f64_c(std::f64::consts::SQRT_2)).erfc()
    }

    /// Standard normal density.
    #[inline]
    fn norm_pdf(self) -> Self {
        let two_pi = Self::two_pi();
        (-self * self / Self::from_f64_c(2.0)).exp() / two_pi.sqrt()
    }

    /// Standard normal quantile, defined on (0, 1).
    #[inline]
    fn norm_quantile(u: Self) -> Self {
        -Self::from_f64_c(std::f64::consts::SQRT_2) * (u + u).erfc_inv()
    }

    /// Chi-square CDF with `dof` degrees of freedom.
    #[inline]
    fn chi2_cdf(dof: usize, x: Self) -> Self {
        if x <= Self::zero() {
            return Self::zero();
        }
        let two = Self::from_f64_c(2.0);
        Self::gamma_lr(Self::from_usize_c(dof) / two, x / two)
    }

    /// Chi-square quantile via monotone bisection on the CDF.
    fn chi2_quantile(dof: usize, u: Self) -> Self {
        assert!(u >= Self::zero() && u < Self::one(), "quantile level in [0,1)");
        if u == Self::zero() {
            return Self::zero();
        }
        let mut hi = Self::from_usize_c(dof.max(1)) * Self::from_f64_c(2.0);
        while Self::chi2_cdf(dof, hi) < u {
            hi = hi * Self::from_f64_c(2.0);
        }
        let mut lo = Self::zero();
        for _ in 0..200 {
            let mid = (lo + hi) / Self::from_f64_c(2.0);
            if Self::chi2_cdf(dof, mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= Self::default_epsilon() * hi {
                break;
            }
        }
        (lo + hi) / Self::from_f64_c(2.0)
    }
}

impl Scalar for f64 {
    #[inline]
    fn erf(self) -> Self {
        libm::erf(self)
    }

    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }

    #[inline]
    fn erfc_inv(self) -> Self {
        // statrs's inverse is ~1e-11 accurate; one Newton step against the
        // full-precision libm::erfc polishes it to machine precision.
        let mut x = statrs::function::erf::erfc_inv(self);
        let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
        for _ in 0..2 {
            let deriv = -two_over_sqrt_pi * (-x * x).exp();
            if deriv == 0.0 {
                break;
            }
            x -= (libm::erfc(x) - self) / deriv;
        }
        x
    }

    #[inline]
    fn gamma_lr(a: Self, x: Self) -> Self {
        statrs::function::gamma::gamma_lr(a, x)
    }

    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Scalar for f32 {
    #[inline]
    fn erf(self) -> Self {
        libm::erf(self as f64) as f32
    }

    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self as f64) as f32
    }

    #[inline]
    fn erfc_inv(self) -> Self {
        Scalar::erfc_inv(self as f64) as f32
    }

    #[inline]
    fn gamma_lr(a: Self, x: Self) -> Self {
        statrs::function::gamma::gamma_lr(a as f64, x as f64) as f32
    }

    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_reference_values() {
        assert!((0.0f64.norm_cdf() - 0.5).abs() < 1e-15);
        // Phi(1.96) from tabulated value.
        assert!((1.96f64.norm_cdf() - 0.975_002_104_851_779_7).abs() < 1e-12);
        assert!(((-40.0f64).norm_cdf()).abs() < 1e-300);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &u in &[1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9] {
            let x = f64::norm_quantile(u);
            assert!((x.norm_cdf() - u).abs() < 1e-12, "u={u}");
        }
    }

    #[test]
    fn chi2_cdf_closed_form_dof2() {
        // dof = 2 is Exp(1/2): F(x) = 1 - exp(-x/2).
        for &x in &[0.1, 1.0, 3.0, 10.0] {
            let expect = 1.0 - (-x / 2.0f64).exp();
            assert!((f64::chi2_cdf(2, x) - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn chi2_quantile_inverts() {
        for dof in [1usize, 2, 3, 7] {
            for &u in &[0.05, 0.5, 0.95] {
                let x = f64::chi2_quantile(dof, u);
                assert!((f64::chi2_cdf(dof, x) - u).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn f32_lane_matches_f64() {
        let a = Scalar::erf(0.7f32);
        let b = Scalar::erf(0.7f64);
        assert!((a as f64 - b).abs() < 1e-6);
    }
}
