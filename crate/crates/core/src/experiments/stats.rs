//! Summary statistics and the goodness-of-fit machinery for the
//! experiment harness. Everything here is deterministic given its input
//! order; parallel callers must hand over index-ordered vectors.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    /// Normal-approximation standard error of the median.
    pub se_median: f64,
}

pub fn summary(values: &[f64]) -> SummaryStats {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
    let n = sorted.len();
    let nf = n as f64;
    let mean = sorted.iter().sum::<f64>() / nf;
    let var = if n > 1 {
        sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)
    } else {
        0.0
    };
    let sd = var.sqrt();
    SummaryStats {
        count: n,
        mean,
        sd,
        min: sorted[0],
        max: sorted[n - 1],
        q25: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        q75: quantile(&sorted, 0.75),
        se_median: 1.2533141373155003 * sd / nf.sqrt(),
    }
}

/// Linear-interpolation quantile on a sorted slice.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Sample variance with the standard error of the variance estimate
/// (from the fourth central moment).
pub fn variance_with_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let var = m2 * n / (n - 1.0);
    let se = ((m4 - m2 * m2).max(0.0) / n).sqrt();
    (var, se)
}

/// One-sample Kolmogorov-Smirnov distance against a continuous CDF.
pub fn ks_statistic(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite sample"));
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let upper = (i as f64 + 1.0) / n - f;
        let lower = f - i as f64 / n;
        d = d.max(upper).max(lower);
    }
    d
}

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} e^{-2k^2 l^2}.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0f64;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub sample_size: usize,
}

/// Asymptotic one-sample KS test for a simple hypothesis.
pub fn ks_test(values: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let d = ks_statistic(values, cdf);
    let n = values.len() as f64;
    KsResult {
        statistic: d,
        p_value: kolmogorov_sf(n.sqrt() * d),
        sample_size: values.len(),
    }
}

/// OLS fit y = slope x + intercept.
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    #[test]
    fn summary_basic() {
        let s = summary(&[3.0, 1.0, 2.0, 4.0]);
        assert_eq!(s.count, 4);
        assert_eq!(s.min, 1.0);
        assert_eq!(s.max, 4.0);
        assert!((s.median - 2.5).abs() < 1e-15);
        assert!((s.mean - 2.5).abs() < 1e-15);
    }

    #[test]
    fn kolmogorov_reference_values() {
        // Q(1.627620) ~ 0.010 (the 1% critical point);
        // Q(1.358) ~ 0.05; standard tables.
        assert!((kolmogorov_sf(1.62762) - 0.01).abs() < 2e-4);
        assert!((kolmogorov_sf(1.35810) - 0.05).abs() < 1e-3);
        assert!(kolmogorov_sf(0.0) == 1.0);
        assert!(kolmogorov_sf(3.0) < 1e-7);
    }

    #[test]
    fn ks_accepts_true_normal_rejects_shifted() {
        let mut rng = crate::seed::stream(3131, &[]);
        let sample: Vec<f64> = (0..800).map(|_| f64::standard_normal(&mut rng)).collect();
        let ks = ks_test(&sample, |x| x.norm_cdf());
        assert!(ks.p_value > 0.01, "true model rejected: p = {}", ks.p_value);

        let ks = ks_test(&sample, |x| (x - 0.5).norm_cdf());
        assert!(ks.p_value < 1e-4, "shifted model accepted: p = {}", ks.p_value);
    }

    #[test]
    fn ols_recovers_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let (s, b) = ols(&xs, &ys);
        assert!((s - 2.5).abs() < 1e-12);
        assert!((b + 1.0).abs() < 1e-12);
    }

    #[test]
    fn variance_se_sane() {
        let mut rng = crate::seed::stream(777, &[]);
        let sample: Vec<f64> = (0..2000).map(|_| f64::standard_normal(&mut rng)).collect();
        let (var, se) = variance_with_se(&sample);
        assert!((var - 1.0).abs() < 4.0 * se, "var {var} se {se}");
        assert!(se < 0.1);
    }
}
