use serde::{Deserialize, Serialize};

/// Exponent tuple (l_1, ..., l_p) indexing a multivariate Hermite polynomial.
///
/// Ordering is lexicographic on the exponent tuple; every table keyed by
/// `MultiIndex` (basis matrices, chaos coefficients) shares this order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        assert!(!exponents.is_empty(), "multi-index needs at least one component");
        MultiIndex(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Number of components p.
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total order m = l_1 + ... + l_p.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&l| l as usize).sum()
    }

    /// Product of component factorials l_1! ... l_p! (exact in u128).
    pub fn factorial_product(&self) -> u128 {
        self.0.iter().map(|&l| factorial(l as usize)).product()
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All multi-indices with p components summing to m, in lexicographic order.
/// The count is binomial(m + p - 1, m).
pub fn enumerate_multi_indices(p: usize, m: usize) -> Vec<MultiIndex> {
    assert!(p >= 1, "p >= 1");
    let mut out = Vec::with_capacity(multi_index_count(p, m));
    let mut current = vec![0u32; p];
    fill(&mut out, &mut current, 0, m);
    out
}

fn fill(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, pos: usize, remaining: usize) {
    if pos + 1 == current.len() {
        current[pos] = remaining as u32;
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for v in 0..=remaining {
        current[pos] = v as u32;
        fill(out, current, pos + 1, remaining - v);
    }
    current[pos] = 0;
}

/// binomial(m + p - 1, m), the number of multi-indices of order m in dimension p.
pub fn multi_index_count(p: usize, m: usize) -> usize {
    binomial(m + p - 1, m)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}
