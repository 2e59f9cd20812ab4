//! Brute-force reference implementations.
//!
//! Nothing here reuses the fast paths: sums are plain left-to-right `f64`
//! loops over expanded sequences, subsets and permutations are enumerated
//! outright, and weights are read one at a time through
//! [`WeightFamily::weight_at`].

use crate::error::{Error, Result};
use crate::functionals::StepSequence;
use crate::norms::FiniteVector;
use crate::weights::WeightFamily;

pub const MAX_SUBSET_LEN: usize = 20;
pub const MAX_PERMUTATION_LEN: usize = 8;
pub const MAX_SCAN: u64 = 1_000_000;
pub const MAX_GRID_TUPLES: f64 = 1e7;

/// Garling norm by enumerating all `2^m` increasing selections.
pub fn garling_norm_bruteforce(b: &FiniteVector, fam: &WeightFamily, p: f64) -> Result<f64> {
    let m = b.len();
    if m > MAX_SUBSET_LEN {
        return Err(Error::Size(format!(
            "subset enumeration supports m <= {MAX_SUBSET_LEN}, got {m}"
        )));
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidInput(format!("exponent p must be >= 1, got {p}")));
    }
    let c: Vec<f64> = b.entries().iter().map(|x| x.abs().powf(p)).collect();
    let mut best = 0.0f64;
    for mask in 0u32..(1u32 << m) {
        let mut total = 0.0;
        let mut slot = 0u64;
        for (i, ci) in c.iter().enumerate() {
            if mask >> i & 1 == 1 {
                slot += 1;
                total += ci * fam.weight_at(slot);
            }
        }
        if total > best {
            best = total;
        }
    }
    Ok(best.powf(1.0 / p))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RearrangementCheck {
    pub holds: bool,
    /// `sum a_i b_{n+1-i}`.
    pub reversed_sum: f64,
    /// `sum a_i b_i`.
    pub identity_sum: f64,
    pub min_sum: f64,
    pub max_sum: f64,
    /// 0-based permutations attaining the extreme sums (first found).
    pub min_permutation: Vec<usize>,
    pub max_permutation: Vec<usize>,
}

fn non_increasing_non_negative(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite() && *v >= 0.0) && x.windows(2).all(|p| p[0] >= p[1])
}

/// Heap's algorithm; calls `visit` once per permutation of `0..n`.
fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    visit(&perm);
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            visit(&perm);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}

/// Checks `sum a_i b_{n+1-i} <= sum a_i b_sigma(i) <= sum a_i b_i` over all
/// `n!` permutations of the first `n` entries. Comparisons allow a rounding
/// slack of `4 n eps` times the largest product sum.
pub fn rearrangement_check(a: &[f64], b: &[f64], n: usize) -> Result<RearrangementCheck> {
    if n == 0 || n > MAX_PERMUTATION_LEN {
        return Err(Error::Size(format!(
            "permutation enumeration supports 1 <= n <= {MAX_PERMUTATION_LEN}, got {n}"
        )));
    }
    if a.len() < n || b.len() < n {
        return Err(Error::InvalidInput(format!("need at least {n} entries in both tuples")));
    }
    let (a, b) = (&a[..n], &b[..n]);
    if !non_increasing_non_negative(a) || !non_increasing_non_negative(b) {
        return Err(Error::InvalidInput(
            "both tuples must be non-increasing and non-negative".into(),
        ));
    }
    let pair_sum = |sigma: &dyn Fn(usize) -> usize| {
        let mut s = 0.0;
        for i in 0..n {
            s += a[i] * b[sigma(i)];
        }
        s
    };
    let reversed_sum = pair_sum(&|i| n - 1 - i);
    let identity_sum = pair_sum(&|i| i);
    let slack = 4.0 * n as f64 * f64::EPSILON * identity_sum.abs().max(f64::MIN_POSITIVE);

    let mut holds = true;
    let mut min_sum = f64::INFINITY;
    let mut max_sum = f64::NEG_INFINITY;
    let mut min_permutation = Vec::new();
    let mut max_permutation = Vec::new();
    for_each_permutation(n, |perm| {
        let s = pair_sum(&|i| perm[i]);
        if s < reversed_sum - slack || s > identity_sum + slack {
            holds = false;
        }
        if s < min_sum {
            min_sum = s;
            min_permutation = perm.to_vec();
        }
        if s > max_sum {
            max_sum = s;
            max_permutation = perm.to_vec();
        }
    });
    Ok(RearrangementCheck {
        holds,
        reversed_sum,
        identity_sum,
        min_sum,
        max_sum,
        min_permutation,
        max_permutation,
    })
}

fn naive_a(a: &[f64], fam: &WeightFamily) -> f64 {
    let mut s = 0.0;
    for (i, ai) in a.iter().enumerate() {
        s += ai * fam.weight_at(i as u64 + 1);
    }
    s
}

fn naive_b_at(a: &[f64], fam: &WeightFamily, n: usize) -> f64 {
    let mut s = 0.0;
    for i in 1..=n.min(a.len()) {
        s += a[i - 1] * fam.weight_at((1 + n - i) as u64);
    }
    s
}

fn naive_b(a: &[f64], fam: &WeightFamily, limit: usize) -> (f64, u64) {
    let mut best = f64::NEG_INFINITY;
    let mut best_n = 1;
    for n in 1..=limit {
        let s = naive_b_at(a, fam, n);
        if s > best {
            best = s;
            best_n = n as u64;
        }
    }
    (best, best_n)
}

/// `max_{1 <= n <= scan} B(f, w, n)` from the expanded sequence.
pub fn functional_b_bruteforce(f: &StepSequence, fam: &WeightFamily, scan: u64) -> Result<(f64, u64)> {
    let m = f.support_len();
    if scan < m.max(1) {
        return Err(Error::InvalidInput(format!(
            "scan limit {scan} must be at least the support length {m}"
        )));
    }
    if scan > MAX_SCAN {
        return Err(Error::Resource(format!("scan limit {scan} exceeds {MAX_SCAN}")));
    }
    let a = f.expand();
    Ok(naive_b(&a, fam, scan as usize))
}

/// `A(f, w)` from the expanded sequence.
pub fn functional_a_bruteforce(f: &StepSequence, fam: &WeightFamily) -> Result<f64> {
    let m = f.support_len();
    if m > MAX_SCAN {
        return Err(Error::Resource(format!("support {m} exceeds {MAX_SCAN}")));
    }
    Ok(naive_a(&f.expand(), fam))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustiveRatio {
    pub ratio: f64,
    /// The maximizing sequence, trailing zeros dropped.
    pub sequence: Vec<f64>,
}

/// Maximizes `A/B` over non-zero non-increasing sequences of support at most
/// `m` with values in `grid`. Ties keep the first sequence in enumeration
/// order (grid sorted decreasingly, longer prefixes of larger values first).
pub fn exhaustive_ratio(fam: &WeightFamily, m: usize, grid: &[f64]) -> Result<ExhaustiveRatio> {
    if m == 0 {
        return Err(Error::InvalidInput("support bound m must be at least 1".into()));
    }
    let mut values: Vec<f64> = grid.to_vec();
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidInput("grid values must be positive and finite".into()));
    }
    values.sort_by(|x, y| y.total_cmp(x));
    values.dedup();
    if values.is_empty() {
        return Err(Error::InvalidInput("grid must be non-empty".into()));
    }
    if (values.len() as f64).powi(m as i32) > MAX_GRID_TUPLES {
        return Err(Error::Size(format!(
            "|grid|^m = {}^{m} exceeds {MAX_GRID_TUPLES}",
            values.len()
        )));
    }

    let mut best = ExhaustiveRatio {
        ratio: f64::NEG_INFINITY,
        sequence: Vec::new(),
    };
    let mut current: Vec<f64> = Vec::with_capacity(m);
    // Each prefix is itself a candidate (the rest zero); extend with values
    // no larger than the last one.
    fn extend(
        fam: &WeightFamily,
        values: &[f64],
        start: usize,
        m: usize,
        current: &mut Vec<f64>,
        best: &mut ExhaustiveRatio,
    ) {
        for idx in start..values.len() {
            current.push(values[idx]);
            let a = naive_a(current, fam);
            let (b, _) = naive_b(current, fam, current.len());
            let ratio = a / b;
            if ratio > best.ratio {
                best.ratio = ratio;
                best.sequence = current.clone();
            }
            if current.len() < m {
                extend(fam, values, idx, m, current, best);
            }
            current.pop();
        }
    }
    extend(fam, &values, 0, m, &mut current, &mut best);
    Ok(best)
}
