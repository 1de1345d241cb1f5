//! L2 bracket covers and the entropy and moment conditions.
//!
//! Covers are constructive upper bounds: the monotone one-parameter
//! families (half-spaces with a fixed direction, balls) are sliced at
//! quantiles of the induced scalar law so consecutive indicators have L2
//! gap exactly epsilon; rectangle grids (p <= 2) slice each axis at
//! marginal quantiles with half the squared budget per axis.

use serde::{Deserialize, Serialize};

use super::{ClassMember, FunctionClass};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A bracket bound; `Zero`/`One` are the constant edge functions.
#[derive(Clone, Debug)]
pub enum BracketFn<T> {
    Zero,
    One,
    Member(ClassMember<T>),
}

impl<T: Scalar> BracketFn<T> {
    pub fn eval(&self, x: &[T]) -> T {
        match self {
            BracketFn::Zero => T::zero(),
            BracketFn::One => T::one(),
            BracketFn::Member(m) => m.eval(x),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Bracket<T> {
    pub lower: BracketFn<T>,
    pub upper: BracketFn<T>,
}

#[derive(Clone, Debug)]
pub struct BracketCover<T> {
    epsilon: T,
    brackets: Vec<Bracket<T>>,
}

impl<T: Scalar> BracketCover<T> {
    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn brackets(&self) -> &[Bracket<T>] {
        &self.brackets
    }

    /// N(epsilon) upper bound realized by this cover.
    pub fn count(&self) -> usize {
        self.brackets.len()
    }

    /// Index of the bracket sandwiching `member`, by pointwise comparison
    /// on the evaluation grid `probes` (used by the validity checks).
    pub fn assign(&self, member: &ClassMember<T>, probes: &[Vec<T>]) -> Option<usize> {
        self.brackets.iter().position(|b| {
            probes.iter().all(|x| {
                let f = member.eval(x);
                b.lower.eval(x) <= f && f <= b.upper.eval(x)
            })
        })
    }
}

/// Constructive epsilon-bracket cover of a supported class.
pub fn build_bracket_cover<T: Scalar>(
    class: &FunctionClass<T>,
    epsilon: T,
) -> Result<BracketCover<T>> {
    assert!(epsilon > T::zero(), "epsilon > 0");
    let eps2 = epsilon * epsilon;
    let members = class.members();
    let all_half_space = members
        .iter()
        .all(|m| matches!(m, ClassMember::HalfSpace { .. }));
    let all_ball = members.iter().all(|m| matches!(m, ClassMember::Ball { .. }));
    let all_rect = members
        .iter()
        .all(|m| matches!(m, ClassMember::Hyperrectangle { .. }));

    if all_half_space {
        let ClassMember::HalfSpace { direction, .. } = &members[0] else {
            unreachable!()
        };
        let dir = direction.clone();
        let norm = super::direction_norm(&dir);
        for m in members {
            let ClassMember::HalfSpace { direction: d, .. } = m else {
                unreachable!()
            };
            let aligned = d
                .iter()
                .zip(&dir)
                .all(|(&a, &b)| (a / super::direction_norm(d) - b / norm).abs() < T::from_f64_c(1e-12));
            if !aligned {
                return Err(Error::UnsupportedClassKind {
                    kind: "half_space with varying directions".into(),
                });
            }
        }
        // Slice at Phi-quantiles: gap^2 between consecutive cuts is 1/K.
        let k = ceil_recip(eps2);
        let dir_unit: Vec<T> = dir.iter().map(|&v| v / norm).collect();
        let cut = |j: usize| -> BracketFn<T> {
            if j == 0 {
                BracketFn::Zero
            } else if j == k {
                BracketFn::One
            } else {
                let q = T::norm_quantile(T::from_usize_c(j) / T::from_usize_c(k));
                BracketFn::Member(ClassMember::HalfSpace {
                    direction: dir_unit.clone(),
                    offset: q,
                })
            }
        };
        let brackets = (0..k)
            .map(|j| Bracket {
                lower: cut(j),
                upper: cut(j + 1),
            })
            .collect();
        return Ok(BracketCover { epsilon, brackets });
    }

    if all_ball {
        let p = class.dim();
        let k = ceil_recip(eps2);
        let cut = |j: usize| -> BracketFn<T> {
            if j == 0 {
                BracketFn::Zero
            } else if j == k {
                BracketFn::One
            } else {
                let q = T::chi2_quantile(p, T::from_usize_c(j) / T::from_usize_c(k));
                BracketFn::Member(ClassMember::Ball { radius: q.sqrt() })
            }
        };
        let brackets = (0..k)
            .map(|j| Bracket {
                lower: cut(j),
                upper: cut(j + 1),
            })
            .collect();
        return Ok(BracketCover { epsilon, brackets });
    }

    if all_rect {
        let p = class.dim();
        if p > 2 {
            return Err(Error::UnsupportedClassKind {
                kind: format!("hyperrectangle cover limited to p <= 2 (got p = {p})"),
            });
        }
        // Per-axis quantile cuts with squared budget eps^2 / p each; the
        // product-CDF increment is bounded by the sum of axis increments.
        let k_axis = ceil_recip(eps2 / T::from_usize_c(p));
        let axis_cut = |j: usize| -> Option<T> {
            if j == 0 {
                None // -infinity
            } else if j == k_axis {
                Some(T::from_f64_c(1e12)) // +infinity surrogate: Phi = 1 exactly
            } else {
                Some(T::norm_quantile(
                    T::from_usize_c(j) / T::from_usize_c(k_axis),
                ))
            }
        };
        let mut brackets = Vec::new();
        let cells: Vec<Vec<usize>> = if p == 1 {
            (0..k_axis).map(|i| vec![i]).collect()
        } else {
            (0..k_axis)
                .flat_map(|i| (0..k_axis).map(move |j| vec![i, j]))
                .collect()
        };
        for cell in cells {
            let lower_corner: Option<Vec<T>> =
                cell.iter().map(|&i| axis_cut(i)).collect();
            let upper_corner: Vec<T> = cell
                .iter()
                .map(|&i| axis_cut(i + 1).expect("upper cut exists"))
                .collect();
            let lower = match lower_corner {
                Some(corner) => BracketFn::Member(ClassMember::Hyperrectangle { corner }),
                None => BracketFn::Zero, // any -infinity component empties the box
            };
            let upper = BracketFn::Member(ClassMember::Hyperrectangle {
                corner: upper_corner,
            });
            brackets.push(Bracket { lower, upper });
        }
        return Ok(BracketCover { epsilon, brackets });
    }

    Err(Error::UnsupportedClassKind {
        kind: "bracket construction supports half_space (fixed direction), ball, hyperrectangle"
            .into(),
    })
}

/// ceil(1/x) as a count.
fn ceil_recip<T: Scalar>(x: T) -> usize {
    let inv = (T::one() / x).to_f64_c();
    inv.ceil() as usize
}

/// Growth input for the entropy condition.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum EntropyInput {
    /// N(eps) = c * eps^{-a}.
    PowerLaw { c: f64, a: f64 },
    /// Sampled (eps, N(eps)) pairs with eps in (0, 1].
    Samples { pairs: Vec<(f64, f64)> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyVerdict {
    pub finite: bool,
    /// Value of the integral when finite (power law: exact; samples:
    /// trapezoid over the sampled range plus a fitted tail).
    pub integral: Option<f64>,
    /// Growth exponent: given (power law) or fitted near eps -> 0.
    pub exponent: f64,
    pub r: usize,
}

/// Evaluate condition (B): int_0^1 eps^{r-1} N(eps)^2 deps < infinity.
/// For a power law the integral is finite iff r > 2a.
pub fn entropy_condition(input: &EntropyInput, r: usize) -> Result<EntropyVerdict> {
    assert!(r >= 1, "r >= 1");
    match input {
        EntropyInput::PowerLaw { c, a } => {
            let finite = (r as f64) > 2.0 * a;
            let integral = finite.then(|| c * c / (r as f64 - 2.0 * a));
            Ok(EntropyVerdict {
                finite,
                integral,
                exponent: *a,
                r,
            })
        }
        EntropyInput::Samples { pairs } => {
            if pairs.len() < 2 {
                return Err(Error::EntropySamples("need at least two samples".into()));
            }
            let mut pts = pairs.clone();
            pts.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite eps"));
            for &(eps, n) in &pts {
                if !(eps > 0.0 && eps <= 1.0) || n < 1.0 || !n.is_finite() {
                    return Err(Error::EntropySamples(format!(
                        "sample (eps = {eps}, N = {n}) outside (0,1] x [1,inf)"
                    )));
                }
            }
            if pts.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::EntropySamples("duplicate eps values".into()));
            }
            // Slope of log N against log(1/eps) near zero: take the
            // smallest half of the samples (at least two).
            let take = (pts.len() / 2).max(2);
            let xs: Vec<f64> = pts[..take].iter().map(|&(e, _)| (1.0 / e).ln()).collect();
            let ys: Vec<f64> = pts[..take].iter().map(|&(_, n)| n.ln()).collect();
            let (a_hat, log_c_hat) = ols(&xs, &ys);
            let finite = (r as f64) > 2.0 * a_hat;

            let integral = finite.then(|| {
                let mut total = 0.0;
                let g = |eps: f64, n: f64| eps.powi(r as i32 - 1) * n * n;
                for w in pts.windows(2) {
                    let (e0, n0) = w[0];
                    let (e1, n1) = w[1];
                    total += 0.5 * (g(e0, n0) + g(e1, n1)) * (e1 - e0);
                }
                // Fitted power-law tail on (0, eps_min].
                let c_hat = log_c_hat.exp();
                let e_min = pts[0].0;
                total += c_hat * c_hat * e_min.powf(r as f64 - 2.0 * a_hat)
                    / (r as f64 - 2.0 * a_hat);
                // Constant-N head on [eps_max, 1] (the cover cannot shrink
                // as eps grows past the largest sample).
                let (e_max, n_max) = *pts.last().expect("nonempty");
                if e_max < 1.0 {
                    let rr = r as f64;
                    total += n_max * n_max * (1.0 - e_max.powf(rr)) / rr;
                }
                total
            });
            Ok(EntropyVerdict {
                finite,
                integral,
                exponent: a_hat,
                r,
            })
        }
    }
}

fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    let slope = if denom.abs() < 1e-300 {
        0.0
    } else {
        (n * sxy - sx * sy) / denom
    };
    (slope, (sy - slope * sx) / n)
}

/// Condition (C): the smallest even integer strictly above
/// max(mDr/(1 - mD), mr). The lower bound is mr exactly when D <= 1/(m+1).
pub fn minimal_2q(m: usize, d: f64, r: usize) -> Result<usize> {
    if !(d > 0.0 && d < 1.0 / m as f64) {
        return Err(Error::RegimeViolation { m, d });
    }
    let md = m as f64 * d;
    let bound = (md * r as f64 / (1.0 - md)).max((m * r) as f64);
    // Relative nudge so boundary cases (the bound an exact even integer)
    // stay strict under floating-point rounding.
    let b = bound * (1.0 + 1e-12);
    let mut k = b.floor() as usize + 1;
    if k % 2 == 1 {
        k += 1;
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_2q_examples() {
        assert_eq!(minimal_2q(1, 0.4, 2).unwrap(), 4);
        assert_eq!(minimal_2q(2, 0.4, 1).unwrap(), 6);
        // Boundary D = 1/(m+1): both sides of the max agree at mr.
        assert_eq!(minimal_2q(1, 0.5, 2).unwrap(), 4);
        assert!(minimal_2q(2, 0.6, 1).is_err());
        assert!(minimal_2q(1, 0.0, 1).is_err());
    }

    #[test]
    fn minimal_2q_monotone() {
        // Nondecreasing in D, r, m over valid domains.
        let mut prev = 0;
        for d in [0.05, 0.15, 0.25, 0.35, 0.45] {
            let v = minimal_2q(2, d, 2).unwrap();
            assert!(v >= prev, "D monotonicity");
            prev = v;
        }
        let mut prev = 0;
        for r in 1..=6 {
            let v = minimal_2q(1, 0.3, r).unwrap();
            assert!(v >= prev, "r monotonicity");
            prev = v;
        }
        for d in [0.05, 0.1, 0.2] {
            let mut prev = 0;
            for m in 1..=4 {
                let v = minimal_2q(m, d, 2).unwrap();
                assert!(v >= prev, "m monotonicity at D={d}");
                prev = v;
            }
        }
    }

    #[test]
    fn entropy_power_law_examples() {
        let v = entropy_condition(&EntropyInput::PowerLaw { c: 1.0, a: 1.0 }, 1).unwrap();
        assert!(!v.finite);
        let v = entropy_condition(&EntropyInput::PowerLaw { c: 1.0, a: 1.0 }, 3).unwrap();
        assert!(v.finite);
        assert!((v.integral.unwrap() - 1.0).abs() < 1e-12);
        let v = entropy_condition(&EntropyInput::PowerLaw { c: 1.0, a: 2.0 }, 5).unwrap();
        assert!(v.finite);
    }

    #[test]
    fn entropy_boundary_is_strict() {
        // r = 2a diverges (the integrand is eps^{-1}).
        let v = entropy_condition(&EntropyInput::PowerLaw { c: 3.0, a: 1.0 }, 2).unwrap();
        assert!(!v.finite);
    }

    #[test]
    fn entropy_sampled_recovers_power_law() {
        let pairs: Vec<(f64, f64)> = (1..=20)
            .map(|i| {
                let eps = i as f64 / 20.0;
                (eps, (eps.powf(-1.5)).ceil())
            })
            .collect();
        let v = entropy_condition(&EntropyInput::Samples { pairs: pairs.clone() }, 4).unwrap();
        assert!(v.finite, "r=4 > 2a=3");
        assert!((v.exponent - 1.5).abs() < 0.2, "fitted {}", v.exponent);
        let v = entropy_condition(&EntropyInput::Samples { pairs }, 2).unwrap();
        assert!(!v.finite, "r=2 < 2a=3");
    }

    #[test]
    fn entropy_rejects_ill_formed() {
        assert!(entropy_condition(
            &EntropyInput::Samples {
                pairs: vec![(0.5, 10.0)]
            },
            1
        )
        .is_err());
        assert!(entropy_condition(
            &EntropyInput::Samples {
                pairs: vec![(0.0, 10.0), (0.5, 3.0)]
            },
            1
        )
        .is_err());
        assert!(entropy_condition(
            &EntropyInput::Samples {
                pairs: vec![(0.5, 10.0), (0.5, 3.0)]
            },
            1
        )
        .is_err());
    }
}
