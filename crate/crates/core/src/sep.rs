//! The function-indexed sequential empirical process and the reduced
//! statistic of the reduction principle.
//!
//! R_N(f, t) = sum_{j <= floor(Nt)} (f(X_j) - E f(X_1)) is a step function
//! in t with jumps at j/N. The reduced statistic subtracts the leading
//! order-m chaos term with coefficients J_l and normalizes by d_N:
//! S_N(n, f) = d_N^{-1} sum_{j<=n} (f(X_j) - Ef - sum_{|l|=m} J_l H_l(X_j)
//! / (l_1! ... l_p!)); its max over n and the class grid is the quantity
//! whose decay the reduction experiment measures.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function_class::{class_mean, ClassMember, FunctionClass};
use crate::hermite::ChaosProjection;
use crate::lrd::PathSample;
use crate::quadrature::QuadSpec;
use crate::report::CsvTable;
use crate::scalar::Scalar;

/// Normalization of a SEP surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SepNormalization<T> {
    None,
    ByDn(T),
}

/// R_N(f, t) on a member grid x t grid.
#[derive(Clone, Debug)]
pub struct SepSurface<T> {
    values: Vec<T>, // member-major: values[f * t_len + ti]
    t_grid: Vec<T>,
    n_members: usize,
    pub normalization: SepNormalization<T>,
}

impl<T: Scalar> SepSurface<T> {
    pub fn t_grid(&self) -> &[T] {
        &self.t_grid
    }

    pub fn n_members(&self) -> usize {
        self.n_members
    }

    pub fn value(&self, member: usize, t_idx: usize) -> T {
        self.values[member * self.t_grid.len() + t_idx]
    }

    pub fn member_values(&self, member: usize) -> &[T] {
        let w = self.t_grid.len();
        &self.values[member * w..(member + 1) * w]
    }

    /// Long-format CSV: f_id, t, value.
    pub fn to_csv(&self) -> String {
        let mut table = CsvTable::new(vec!["f_id", "t", "value"]);
        for f in 0..self.n_members {
            for (ti, &t) in self.t_grid.iter().enumerate() {
                table.push_row(vec![
                    f.to_string(),
                    CsvTable::cell_float(t.to_f64_c()),
                    CsvTable::cell_float(self.value(f, ti).to_f64_c()),
                ]);
            }
        }
        table.to_string()
    }
}

/// Default t grid {0, 1/N, ..., 1}: the exact jump points.
pub fn jump_t_grid<T: Scalar>(n: usize) -> Vec<T> {
    (0..=n)
        .map(|j| T::from_usize_c(j) / T::from_usize_c(n))
        .collect()
}

/// R_N(f, t) for every member of the class and every t in the grid.
pub fn compute_sep<T: Scalar>(
    path: &PathSample<T>,
    class: &FunctionClass<T>,
    t_grid: &[T],
    normalization: SepNormalization<T>,
) -> Result<SepSurface<T>> {
    if class.dim() != path.dim() {
        return Err(Error::DimensionMismatch {
            expected: class.dim(),
            got: path.dim(),
        });
    }
    let n = path.len();
    let nf = T::from_usize_c(n);
    let scale = match normalization {
        SepNormalization::None => T::one(),
        SepNormalization::ByDn(dn) => T::one() / dn,
    };
    // floor(N t) per grid point, clamped into [0, N].
    let cut: Vec<usize> = t_grid
        .iter()
        .map(|&t| {
            let raw = (nf * t).floor().to_f64_c();
            (raw.max(0.0) as usize).min(n)
        })
        .collect();

    let mut values = vec![T::zero(); class.len() * t_grid.len()];
    let results: Result<Vec<Vec<T>>> = class
        .members()
        .par_iter()
        .map(|member| {
            let mean = class_mean(member, class.dim(), class.quad())?.value;
            let mut cumsum = Vec::with_capacity(n + 1);
            let mut acc = T::zero();
            cumsum.push(acc);
            for x in path.rows() {
                acc += member.eval(x) - mean;
                cumsum.push(acc);
            }
            Ok(cut.iter().map(|&c| cumsum[c] * scale).collect())
        })
        .collect();
    for (f, row) in results?.into_iter().enumerate() {
        values[f * t_grid.len()..(f + 1) * t_grid.len()].copy_from_slice(&row);
    }
    Ok(SepSurface {
        values,
        t_grid: t_grid.to_vec(),
        n_members: class.len(),
        normalization,
    })
}

/// The classical sequential empirical process: p = 1, half-line
/// indicators 1{Y_j <= x} centered at Phi(x).
pub fn classical_sep<T: Scalar>(
    path: &PathSample<T>,
    x_grid: &[T],
    t_grid: &[T],
) -> Result<SepSurface<T>> {
    if path.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: path.dim(),
        });
    }
    let members: Vec<ClassMember<T>> = x_grid
        .iter()
        .map(|&x| ClassMember::HalfSpace {
            direction: vec![T::one()],
            offset: x,
        })
        .collect();
    let class = FunctionClass::new(1, members, QuadSpec::default())?;
    compute_sep(path, &class, t_grid, SepNormalization::None)
}

/// S_N(n, f) for n = 0..N plus the running maximum of |S_N(n, f)|.
#[derive(Clone, Debug)]
pub struct ReducedStat<T> {
    values: Vec<T>, // index n
    sup: T,
}

impl<T: Scalar> ReducedStat<T> {
    /// S_N(n, f); index 0 is the empty sum.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, n: usize) -> T {
        self.values[n]
    }

    /// max_{n <= N} |S_N(n, f)|.
    pub fn sup(&self) -> T {
        self.sup
    }

    pub fn to_csv(&self) -> String {
        let mut table = CsvTable::new(vec!["n", "value"]);
        for (n, v) in self.values.iter().enumerate() {
            table.push_row(vec![n.to_string(), CsvTable::cell_float(v.to_f64_c())]);
        }
        table.to_string()
    }
}

/// Reduced statistic for one member with its order-m projection.
pub fn compute_reduced<T: Scalar>(
    path: &PathSample<T>,
    member: &ClassMember<T>,
    m: usize,
    proj: &ChaosProjection<T>,
    dn: T,
    quad: &QuadSpec,
) -> Result<ReducedStat<T>> {
    if proj.order() != m {
        return Err(Error::OrderMismatch {
            proj_m: proj.order(),
            m,
        });
    }
    if proj.dim() != path.dim() {
        return Err(Error::DimensionMismatch {
            expected: path.dim(),
            got: proj.dim(),
        });
    }
    assert!(dn > T::zero(), "d_N must be positive");
    let mean = class_mean(member, path.dim(), quad)?.value;
    let inv = T::one() / dn;
    let mut values = Vec::with_capacity(path.len() + 1);
    let mut acc = T::zero();
    let mut sup = T::zero();
    values.push(T::zero());
    for x in path.rows() {
        acc += member.eval(x) - mean - proj.eval_leading(x)?;
        let s = acc * inv;
        values.push(s);
        if s.abs() > sup {
            sup = s.abs();
        }
    }
    Ok(ReducedStat { values, sup })
}

/// max over n <= N and the class grid of |S_N(n, f)|; single pass over the
/// path per member, members in parallel.
pub fn sup_stat<T: Scalar>(
    path: &PathSample<T>,
    class: &FunctionClass<T>,
    m: usize,
    projections: &[ChaosProjection<T>],
    dn: T,
) -> Result<T> {
    if class.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if projections.len() != class.len() {
        return Err(Error::DimensionMismatch {
            expected: class.len(),
            got: projections.len(),
        });
    }
    let sups: Result<Vec<T>> = class
        .members()
        .par_iter()
        .zip(projections.par_iter())
        .map(|(member, proj)| {
            compute_reduced(path, member, m, proj, dn, class.quad()).map(|r| r.sup())
        })
        .collect();
    Ok(sups?
        .into_iter()
        .fold(T::zero(), |a, b| if b > a { b } else { a }))
}
