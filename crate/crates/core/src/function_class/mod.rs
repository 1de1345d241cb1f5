//! Parametrized function classes over the standard Gaussian measure.
//!
//! A class is a finite grid of members; the sup over the class in any
//! experiment means the max over this grid. Means and Hermite coefficients
//! route through closed forms wherever the member kind admits one
//! (half-spaces and rectangles via the univariate identity
//! int_{-inf}^c H_m phi = -H_{m-1}(c) phi(c), balls via chi-square CDFs):
//! tensor Gauss-Hermite on indicator integrands stalls near 1e-2 accuracy,
//! which would leak straight into the reduced statistic. Quadrature remains
//! the route for custom members and the oracle in tests.

mod bracket;

pub use bracket::{
    build_bracket_cover, entropy_condition, minimal_2q, Bracket, BracketCover, BracketFn,
    EntropyInput, EntropyVerdict,
};

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{
    enumerate_multi_indices, hermite_eval, hermite_multi_eval, ChaosProjection, MultiIndex,
};
use crate::quadrature::{qmc_gaussian, GaussHermite, QuadSpec};
use crate::scalar::Scalar;

/// One member of a function class.
#[derive(Clone)]
pub enum ClassMember<T> {
    /// 1{v . x <= c}; the direction need not be normalized.
    HalfSpace { direction: Vec<T>, offset: T },
    /// 1{x_i <= c_i for all i}.
    Hyperrectangle { corner: Vec<T> },
    /// 1{|x|_2 <= r}, the indicator-of-G case with G the Euclidean norm.
    Ball { radius: T },
    /// Finite Hermite expansion f = sum_l coeff_l H_l (all orders allowed).
    Polynomial { coefficients: BTreeMap<MultiIndex, T> },
    /// Arbitrary evaluator; means and coefficients go through quadrature.
    Custom {
        f: Arc<dyn Fn(&[T]) -> T + Send + Sync>,
        bound: T,
        label: String,
    },
}

impl<T: std::fmt::Debug> std::fmt::Debug for ClassMember<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassMember::HalfSpace { direction, offset } => f
                .debug_struct("HalfSpace")
                .field("direction", direction)
                .field("offset", offset)
                .finish(),
            ClassMember::Hyperrectangle { corner } => f
                .debug_struct("Hyperrectangle")
                .field("corner", corner)
                .finish(),
            ClassMember::Ball { radius } => {
                f.debug_struct("Ball").field("radius", radius).finish()
            }
            ClassMember::Polynomial { coefficients } => f
                .debug_struct("Polynomial")
                .field("coefficients", coefficients)
                .finish(),
            ClassMember::Custom { label, .. } => {
                f.debug_struct("Custom").field("label", label).finish()
            }
        }
    }
}

impl<T: Scalar> ClassMember<T> {
    pub fn eval(&self, x: &[T]) -> T {
        match self {
            ClassMember::HalfSpace { direction, offset } => {
                let dot = direction
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&v, &xi)| acc + v * xi);
                if dot <= *offset {
                    T::one()
                } else {
                    T::zero()
                }
            }
            ClassMember::Hyperrectangle { corner } => {
                if corner.iter().zip(x).all(|(&c, &xi)| xi <= c) {
                    T::one()
                } else {
                    T::zero()
                }
            }
            ClassMember::Ball { radius } => {
                let norm2 = x.iter().fold(T::zero(), |acc, &xi| acc + xi * xi);
                if norm2 <= *radius * *radius {
                    T::one()
                } else {
                    T::zero()
                }
            }
            ClassMember::Polynomial { coefficients } => coefficients
                .iter()
                .fold(T::zero(), |acc, (l, &c)| {
                    acc + c * hermite_multi_eval(l, x).expect("dimension validated")
                }),
            ClassMember::Custom { f, .. } => f(x),
        }
    }

    /// Dimension constraint the member imposes, if any.
    fn required_dim(&self) -> Option<usize> {
        match self {
            ClassMember::HalfSpace { direction, .. } => Some(direction.len()),
            ClassMember::Hyperrectangle { corner } => Some(corner.len()),
            ClassMember::Ball { .. } => None,
            ClassMember::Polynomial { coefficients } => {
                coefficients.keys().next().map(|l| l.dim())
            }
            ClassMember::Custom { .. } => None,
        }
    }

    fn is_indicator(&self) -> bool {
        matches!(
            self,
            ClassMember::HalfSpace { .. } | ClassMember::Hyperrectangle { .. } | ClassMember::Ball { .. }
        )
    }

    fn nominal_bound(&self) -> Option<T> {
        match self {
            m if m.is_indicator() => Some(T::one()),
            ClassMember::Custom { bound, .. } => Some(*bound),
            _ => None,
        }
    }
}

/// A finite grid of members over R^p.
#[derive(Clone, Debug)]
pub struct FunctionClass<T> {
    dim: usize,
    members: Vec<ClassMember<T>>,
    uniform_bound: Option<T>,
    quad: QuadSpec,
}

impl<T: Scalar> FunctionClass<T> {
    pub fn new(dim: usize, members: Vec<ClassMember<T>>, quad: QuadSpec) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let mut bound = Some(T::zero());
        for m in &members {
            if let Some(req) = m.required_dim() {
                if req != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: req,
                    });
                }
            }
            bound = match (bound, m.nominal_bound()) {
                (Some(b), Some(nb)) => Some(if nb > b { nb } else { b }),
                _ => None,
            };
        }
        Ok(FunctionClass {
            dim,
            members,
            uniform_bound: bound,
            quad,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[ClassMember<T>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Uniform bound over the grid; `None` when a member is unbounded
    /// (polynomial members serve as diagnostic classes only).
    pub fn uniform_bound(&self) -> Option<T> {
        self.uniform_bound
    }

    pub fn quad(&self) -> &QuadSpec {
        &self.quad
    }

    pub fn mean(&self, idx: usize) -> Result<Computed<T>> {
        class_mean(&self.members[idx], self.dim, &self.quad)
    }

    pub fn coefficient(&self, idx: usize, l: &MultiIndex) -> Result<Computed<T>> {
        hermite_coefficient(&self.members[idx], self.dim, l, &self.quad)
    }

    pub fn project_leading(&self, idx: usize, m: usize) -> Result<ChaosProjection<T>> {
        project_leading(&self.members[idx], self.dim, m, &self.quad)
    }

    pub fn hermite_rank(&self, max_order: usize, tol: T) -> Result<usize> {
        hermite_rank(self, max_order, tol)
    }
}

/// How a value was computed, with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Route {
    ClosedForm,
    TensorGaussHermite,
    Qmc,
}

#[derive(Clone, Copy, Debug)]
pub struct Computed<T> {
    pub value: T,
    pub error: T,
    pub route: Route,
}

impl<T: Scalar> Computed<T> {
    fn closed(value: T) -> Self {
        Computed {
            value,
            error: T::zero(),
            route: Route::ClosedForm,
        }
    }

    fn check_tolerance(self, quad: &QuadSpec) -> Result<Self> {
        if let Some(tol) = quad.tolerance {
            if self.error.to_f64_c() > tol {
                return Err(Error::QuadratureTolerance {
                    estimate: self.error.to_f64_c(),
                    tolerance: tol,
                });
            }
        }
        Ok(self)
    }
}

/// int_{-inf}^{c} H_m(u) phi(u) du: Phi(c) for m = 0, else -H_{m-1}(c) phi(c).
pub fn half_line_hermite_integral<T: Scalar>(m: usize, c: T) -> T {
    if m == 0 {
        c.norm_cdf()
    } else {
        -hermite_eval(m - 1, c) * c.norm_pdf()
    }
}

fn direction_norm<T: Scalar>(direction: &[T]) -> T {
    direction
        .iter()
        .fold(T::zero(), |acc, &v| acc + v * v)
        .sqrt()
}

/// E f(X) for X standard p-variate normal.
pub fn class_mean<T: Scalar>(
    member: &ClassMember<T>,
    p: usize,
    quad: &QuadSpec,
) -> Result<Computed<T>> {
    match member {
        ClassMember::HalfSpace { direction, offset } => {
            let norm = direction_norm(direction);
            Ok(Computed::closed((*offset / norm).norm_cdf()))
        }
        ClassMember::Hyperrectangle { corner } => Ok(Computed::closed(
            corner
                .iter()
                .fold(T::one(), |acc, &c| acc * c.norm_cdf()),
        )),
        ClassMember::Ball { radius } => Ok(Computed::closed(T::chi2_cdf(p, *radius * *radius))),
        ClassMember::Polynomial { coefficients } => {
            let zero_key = MultiIndex::new(vec![0; p]);
            Ok(Computed::closed(
                coefficients.get(&zero_key).copied().unwrap_or_else(T::zero),
            ))
        }
        ClassMember::Custom { .. } => {
            quadrature_expectation(member, p, quad, |_x| T::one())?.check_tolerance(quad)
        }
    }
}

/// Hermite coefficient J_l(f) = E[f(X) H_l(X)].
pub fn hermite_coefficient<T: Scalar>(
    member: &ClassMember<T>,
    p: usize,
    l: &MultiIndex,
    quad: &QuadSpec,
) -> Result<Computed<T>> {
    if l.dim() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: l.dim(),
        });
    }
    if l.order() == 0 {
        return class_mean(member, p, quad);
    }
    match member {
        ClassMember::HalfSpace { direction, offset } => {
            // f depends on the standard normal u = v.x/|v| alone, so
            // J_l = u_m(c/|v|) prod_i (v_i/|v|)^{l_i} with m = |l|.
            let norm = direction_norm(direction);
            let base = half_line_hermite_integral(l.order(), *offset / norm);
            let mut value = base;
            for (&li, &vi) in l.exponents().iter().zip(direction) {
                if li > 0 {
                    value *= (vi / norm).powi(li as i32);
                }
            }
            Ok(Computed::closed(value))
        }
        ClassMember::Hyperrectangle { corner } => {
            // Componentwise independence factorizes the integral.
            let mut value = T::one();
            for (&li, &ci) in l.exponents().iter().zip(corner) {
                value *= half_line_hermite_integral(li as usize, ci);
            }
            Ok(Computed::closed(value))
        }
        ClassMember::Ball { radius } => {
            if l.exponents().iter().any(|&li| li % 2 == 1) {
                // Radial symmetry kills every index with an odd component.
                return Ok(Computed::closed(T::zero()));
            }
            if l.order() == 2 {
                // l = 2 e_i: E[1{R<=r}(X_i^2 - 1)] = F_{p+2}(r^2) - F_p(r^2).
                let r2 = *radius * *radius;
                return Ok(Computed::closed(
                    T::chi2_cdf(p + 2, r2) - T::chi2_cdf(p, r2),
                ));
            }
            quadrature_coefficient(member, p, l, quad)
        }
        ClassMember::Polynomial { coefficients } => {
            let c = coefficients.get(l).copied().unwrap_or_else(T::zero);
            Ok(Computed::closed(
                c * T::from_f64_c(l.factorial_product() as f64),
            ))
        }
        ClassMember::Custom { .. } => quadrature_coefficient(member, p, l, quad),
    }
}

fn quadrature_coefficient<T: Scalar>(
    member: &ClassMember<T>,
    p: usize,
    l: &MultiIndex,
    quad: &QuadSpec,
) -> Result<Computed<T>> {
    quadrature_expectation(member, p, quad, |x| {
        hermite_multi_eval(l, x).expect("dimension validated")
    })?
    .check_tolerance(quad)
}

/// E[f(X) g(X)] by tensor Gauss-Hermite (p <= 3, error from halving the
/// order) or the QMC rule (p > 3, error from replicate spread).
fn quadrature_expectation<T: Scalar>(
    member: &ClassMember<T>,
    p: usize,
    quad: &QuadSpec,
    g: impl Fn(&[T]) -> T,
) -> Result<Computed<T>> {
    if p <= 3 {
        let full = GaussHermite::<T>::new(quad.tensor_order);
        let half = GaussHermite::<T>::new((quad.tensor_order / 2).max(2));
        let value = full.integrate_tensor(p, |x| member.eval(x) * g(x));
        let coarse = half.integrate_tensor(p, |x| member.eval(x) * g(x));
        Ok(Computed {
            value,
            error: (value - coarse).abs(),
            route: Route::TensorGaussHermite,
        })
    } else {
        let (value, se) = qmc_gaussian(p, quad, |x| member.eval(x) * g(x));
        Ok(Computed {
            value,
            error: se,
            route: Route::Qmc,
        })
    }
}

/// All coefficients of order exactly m.
pub fn project_leading<T: Scalar>(
    member: &ClassMember<T>,
    p: usize,
    m: usize,
    quad: &QuadSpec,
) -> Result<ChaosProjection<T>> {
    assert!(m >= 1, "leading order m >= 1");
    let mut coeffs = BTreeMap::new();
    let mut worst = T::zero();
    for l in enumerate_multi_indices(p, m) {
        let c = hermite_coefficient(member, p, &l, quad)?;
        if c.error > worst {
            worst = c.error;
        }
        if c.value != T::zero() {
            coeffs.insert(l, c.value);
        }
    }
    ChaosProjection::new(p, m, coeffs, worst)
}

/// Smallest order <= max_order at which some member has a coefficient that
/// clears the tolerance (3 standard errors for QMC routes, `tol` otherwise).
pub fn hermite_rank<T: Scalar>(
    class: &FunctionClass<T>,
    max_order: usize,
    tol: T,
) -> Result<usize> {
    assert!(max_order >= 1);
    let three = T::from_f64_c(3.0);
    for m in 1..=max_order {
        for member in class.members() {
            for l in enumerate_multi_indices(class.dim(), m) {
                let c = hermite_coefficient(member, class.dim(), &l, class.quad())?;
                let threshold = match c.route {
                    Route::Qmc => {
                        let spread = three * c.error;
                        if spread > tol {
                            spread
                        } else {
                            tol
                        }
                    }
                    _ => tol,
                };
                if c.value.abs() > threshold {
                    return Ok(m);
                }
            }
        }
    }
    Err(Error::RankUndetermined {
        max_order,
        tol: tol.to_f64_c(),
    })
}

/// Serializable description of a function class (the CLI config form).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassDescriptor {
    /// Grid of 1{v.x <= c} over directions x offsets. `fan` generates
    /// evenly spaced directions over the upper half-circle (p = 2 only).
    HalfSpace {
        #[serde(default)]
        directions: Vec<Vec<f64>>,
        #[serde(default)]
        fan: Option<usize>,
        offsets: Vec<f64>,
    },
    Hyperrectangle { corners: Vec<Vec<f64>> },
    Ball { radii: Vec<f64> },
    /// Members given by explicit Hermite expansions.
    Polynomial { members: Vec<PolynomialSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialSpec {
    pub terms: Vec<PolynomialTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialTerm {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

impl ClassDescriptor {
    pub fn build<T: Scalar>(&self, p: usize, quad: QuadSpec) -> Result<FunctionClass<T>> {
        let members = match self {
            ClassDescriptor::HalfSpace {
                directions,
                fan,
                offsets,
            } => {
                let mut dirs: Vec<Vec<T>> = directions
                    .iter()
                    .map(|d| d.iter().map(|&v| T::from_f64_c(v)).collect())
                    .collect();
                if let Some(count) = fan {
                    if p != 2 {
                        return Err(Error::InvalidConfig(
                            "direction fan requires p = 2".into(),
                        ));
                    }
                    for j in 0..*count {
                        let theta = std::f64::consts::PI * j as f64 / *count as f64;
                        dirs.push(vec![
                            T::from_f64_c(theta.cos()),
                            T::from_f64_c(theta.sin()),
                        ]);
                    }
                }
                if dirs.is_empty() || offsets.is_empty() {
                    return Err(Error::EmptyGrid);
                }
                dirs.iter()
                    .flat_map(|d| {
                        offsets.iter().map(move |&c| ClassMember::HalfSpace {
                            direction: d.clone(),
                            offset: T::from_f64_c(c),
                        })
                    })
                    .collect()
            }
            ClassDescriptor::Hyperrectangle { corners } => corners
                .iter()
                .map(|c| ClassMember::Hyperrectangle {
                    corner: c.iter().map(|&v| T::from_f64_c(v)).collect(),
                })
                .collect(),
            ClassDescriptor::Ball { radii } => radii
                .iter()
                .map(|&r| ClassMember::Ball {
                    radius: T::from_f64_c(r),
                })
                .collect(),
            ClassDescriptor::Polynomial { members } => members
                .iter()
                .map(|spec| {
                    let coefficients = spec
                        .terms
                        .iter()
                        .map(|t| (MultiIndex::new(t.exponents.clone()), T::from_f64_c(t.coeff)))
                        .collect();
                    ClassMember::Polynomial { coefficients }
                })
                .collect(),
        };
        FunctionClass::new(p, members, quad)
    }
}

#[cfg(test)]
mod tests;
