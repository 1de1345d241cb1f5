use std::collections::BTreeMap;

use super::multi_index::MultiIndex;
use super::{factorial_t, hermite_multi_eval};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Order-m chaos coefficients of a function: l -> J_l for |l| = m.
///
/// This is the leading term subtracted in the reduced statistic; missing
/// keys are zero coefficients.
#[derive(Clone, Debug)]
pub struct ChaosProjection<T> {
    p: usize,
    m: usize,
    coefficients: BTreeMap<MultiIndex, T>,
    quadrature_error: T,
}

impl<T: Scalar> ChaosProjection<T> {
    pub fn new(
        p: usize,
        m: usize,
        coefficients: BTreeMap<MultiIndex, T>,
        quadrature_error: T,
    ) -> Result<Self> {
        for l in coefficients.keys() {
            if l.dim() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: l.dim(),
                });
            }
            if l.order() != m {
                return Err(Error::OrderMismatch {
                    proj_m: l.order(),
                    m,
                });
            }
        }
        Ok(ChaosProjection {
            p,
            m,
            coefficients,
            quadrature_error,
        })
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn quadrature_error(&self) -> T {
        self.quadrature_error
    }

    /// J_l, zero for absent keys.
    pub fn coefficient(&self, l: &MultiIndex) -> T {
        self.coefficients.get(l).copied().unwrap_or_else(T::zero)
    }

    pub fn coefficients(&self) -> &BTreeMap<MultiIndex, T> {
        &self.coefficients
    }

    /// Largest |J_l| over stored coefficients.
    pub fn max_abs(&self) -> T {
        self.coefficients
            .values()
            .fold(T::zero(), |acc, &v| if v.abs() > acc { v.abs() } else { acc })
    }

    /// The leading chaos term: sum over |l| = m of J_l / (l_1! ... l_p!) H_l(x).
    pub fn eval_leading(&self, x: &[T]) -> Result<T> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: x.len(),
            });
        }
        let mut sum = T::zero();
        for (l, &j) in &self.coefficients {
            let weight = j / T::from_f64_c(l.factorial_product() as f64);
            sum += weight * hermite_multi_eval(l, x)?;
        }
        Ok(sum)
    }

    /// Variance of the leading chaos term under the standard normal:
    /// sum over |l| = m of J_l^2 / (l_1! ... l_p!).
    pub fn leading_variance(&self) -> T {
        self.coefficients.iter().fold(T::zero(), |acc, (l, &j)| {
            acc + j * j / T::from_f64_c(l.factorial_product() as f64)
        })
    }

    pub fn scaled(&self, factor: T) -> Self {
        let coefficients = self
            .coefficients
            .iter()
            .map(|(l, &j)| (l.clone(), j * factor))
            .collect();
        ChaosProjection {
            p: self.p,
            m: self.m,
            coefficients,
            quadrature_error: self.quadrature_error * factor.abs(),
        }
    }
}

/// Coefficient of the Theorem-1 limit combination for a component tuple
/// (j_1, ..., j_m): (m!)^{-1} J_l with l_i = #{u : j_u = i}.
/// Invariant under permutations of the tuple.
pub fn tilde_j<T: Scalar>(proj: &ChaosProjection<T>, tuple: &[usize]) -> Result<T> {
    if tuple.len() != proj.order() {
        return Err(Error::OrderMismatch {
            proj_m: proj.order(),
            m: tuple.len(),
        });
    }
    let mut counts = vec![0u32; proj.dim()];
    for &j in tuple {
        if j == 0 || j > proj.dim() {
            return Err(Error::ComponentOutOfRange {
                index: j,
                p: proj.dim(),
            });
        }
        counts[j - 1] += 1;
    }
    let l = MultiIndex::new(counts);
    Ok(proj.coefficient(&l) / factorial_t::<T>(proj.order()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proj_from(p: usize, m: usize, entries: &[(&[u32], f64)]) -> ChaosProjection<f64> {
        let map = entries
            .iter()
            .map(|(e, v)| (MultiIndex::new(e.to_vec()), *v))
            .collect();
        ChaosProjection::new(p, m, map, 0.0).unwrap()
    }

    #[test]
    fn rejects_wrong_order_keys() {
        let map: BTreeMap<_, _> = [(MultiIndex::new(vec![1, 0]), 1.0)].into_iter().collect();
        assert!(ChaosProjection::new(2, 2, map, 0.0).is_err());
    }

    #[test]
    fn tilde_j_order_one() {
        let proj = proj_from(2, 1, &[(&[1, 0], 2.0), (&[0, 1], 0.0)]);
        assert_eq!(tilde_j(&proj, &[1]).unwrap(), 2.0);
        assert_eq!(tilde_j(&proj, &[2]).unwrap(), 0.0);
    }

    #[test]
    fn tilde_j_symmetric_in_tuple() {
        let proj = proj_from(2, 2, &[(&[2, 0], 4.0), (&[1, 1], -3.0), (&[0, 2], 1.0)]);
        let a = tilde_j(&proj, &[1, 2]).unwrap();
        let b = tilde_j(&proj, &[2, 1]).unwrap();
        assert_eq!(a, b);
        assert!((a - (-3.0 / 2.0)).abs() < 1e-15);
        // (1,1) tuple maps to l = (2,0): (2!)^{-1} * 4 = 2.
        assert!((tilde_j(&proj, &[1, 1]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn tilde_j_range_check() {
        let proj = proj_from(2, 1, &[(&[1, 0], 1.0)]);
        assert!(tilde_j(&proj, &[3]).is_err());
        assert!(tilde_j(&proj, &[0]).is_err());
    }
}
