//! Weighted Lorentz and Garling norms of finite vectors.
//!
//! Lorentz: `(sum (b*_i)^p w_i)^(1/p)` with `b*` the decreasing
//! rearrangement of `|b|`.
//!
//! Garling: `sup_phi (sum |b_phi(i)|^p w_i)^(1/p)` over increasing index maps.
//! For a vector of length `m` this is a maximum-weight increasing selection:
//! choose `i_1 < ... < i_t` maximizing `sum_j c_{i_j} w_j` with `c = |b|^p`.
//! Trailing positions contribute nothing and weights are positive, so a
//! finite selection attains the supremum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::StepSequence;
use crate::summation::Compensated;
use crate::weights::WeightFamily;
use crate::witness::{build_witness, find_block_lengths, DEFAULT_SLACK};

/// Largest vector the Garling dynamic program accepts. The selector table
/// takes `m^2 / 16` bytes.
pub const MAX_DP_LEN: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteVector {
    entries: Vec<f64>,
}

impl FiniteVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("vector must have at least one entry".into()));
        }
        if let Some(bad) = entries.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite entry {bad}")));
        }
        Ok(FiniteVector { entries })
    }

    /// Builds from complex entries given as `(re, im)` pairs; only moduli matter.
    pub fn from_complex(entries: &[(f64, f64)]) -> Result<Self> {
        Self::new(entries.iter().map(|&(re, im)| re.hypot(im)).collect())
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn reversed(&self) -> FiniteVector {
        FiniteVector {
            entries: self.entries.iter().rev().copied().collect(),
        }
    }
}

/// A norm value with the index list that attains it (1-based).
///
/// For the Garling norm `selector` is the increasing list `i_1 < ... < i_t`;
/// for the Lorentz norm it is the sorting permutation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub p: f64,
    pub selector: Vec<usize>,
    /// `value^p`, summed directly rather than re-powered.
    #[serde(skip)]
    pub powered: f64,
}

fn check_p(p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidInput(format!("exponent p must be a real >= 1, got {p}")));
    }
    Ok(())
}

#[inline]
fn pow_abs(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x.abs()
    } else {
        x.abs().powf(p)
    }
}

fn root(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else {
        x.powf(1.0 / p)
    }
}

fn weights(fam: &WeightFamily, m: usize) -> Vec<f64> {
    (1..=m as u64).map(|i| fam.weight_at(i)).collect()
}

/// `sum_j c_{selector[j]} w_{j+1}` for a 1-based selector.
fn selection_sum(c: &[f64], w: &[f64], selector: &[usize]) -> f64 {
    selector
        .iter()
        .zip(w)
        .map(|(&i, &wj)| c[i - 1] * wj)
        .sum::<Compensated>()
        .value()
}

pub fn lorentz_norm(b: &FiniteVector, fam: &WeightFamily, p: f64) -> Result<NormResult> {
    check_p(p)?;
    let c: Vec<f64> = b.entries().iter().map(|&x| pow_abs(x, p)).collect();
    let mut order: Vec<usize> = (1..=c.len()).collect();
    // stable: equal moduli keep their original order
    order.sort_by(|&i, &j| c[j - 1].total_cmp(&c[i - 1]));
    let w = weights(fam, c.len());
    let powered = selection_sum(&c, &w, &order);
    Ok(NormResult {
        value: root(powered, p),
        p,
        selector: order,
        powered,
    })
}

/// Lower-triangular bit table: row `i` holds bits for `j = 0..=i`.
struct TakeTable {
    bits: Vec<u64>,
}

impl TakeTable {
    fn new(m: usize) -> Self {
        let total = m * (m + 1) / 2;
        TakeTable {
            bits: vec![0; total.div_ceil(64)],
        }
    }

    #[inline]
    fn offset(i: usize) -> usize {
        i * (i + 1) / 2
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize) {
        let k = Self::offset(i) + j;
        self.bits[k >> 6] |= 1 << (k & 63);
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> bool {
        let k = Self::offset(i) + j;
        self.bits[k >> 6] >> (k & 63) & 1 == 1
    }
}

/// Garling norm by dynamic programming over (position, number selected).
///
/// `best[j]` holds the best total obtainable from the current suffix when
/// `j` entries were already selected before it (so the next weight is
/// `w_{j+1}`); positions are processed right to left with
/// `best[j] = max(best[j], c_i w_{j+1} + best[j+1])`. Recording the take/skip
/// choice per state lets a single forward walk recover the optimal selector
/// whose 0/1 indicator vector is lexicographically smallest: on a tie the
/// current position is skipped.
pub fn garling_norm(b: &FiniteVector, fam: &WeightFamily, p: f64) -> Result<NormResult> {
    check_p(p)?;
    let m = b.len();
    if m > MAX_DP_LEN {
        return Err(Error::Size(format!(
            "Garling norm supports vectors up to length {MAX_DP_LEN}, got {m}"
        )));
    }
    let c: Vec<f64> = b.entries().iter().map(|&x| pow_abs(x, p)).collect();
    let w = weights(fam, m);
    let mut best = vec![0.0f64; m + 1];
    let mut table = TakeTable::new(m);
    for i in (0..m).rev() {
        let ci = c[i];
        for j in 0..=i {
            let take = ci * w[j] + best[j + 1];
            let skip = best[j];
            if take > skip {
                best[j] = take;
                table.set(i, j);
            }
        }
    }
    let mut selector = Vec::new();
    for i in 0..m {
        if table.get(i, selector.len()) {
            selector.push(i + 1);
        }
    }
    let powered = selection_sum(&c, &w, &selector);
    Ok(NormResult {
        value: root(powered, p),
        p,
        selector,
        powered,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricDefect {
    /// `forward.value^p / reversed.value^p`.
    pub defect: f64,
    pub forward: NormResult,
    pub reversed: NormResult,
}

/// Compares the Garling norm of `sum_{i<=r} a_i^(1/p) e_i` with that of its
/// reversal `sum_{i<=r} a_{1+r-i}^(1/p) e_i`. A symmetric basis would keep
/// the ratio of their `p`-th powers bounded.
pub fn symmetric_defect(a: &StepSequence, fam: &WeightFamily, p: f64, r: u64) -> Result<SymmetricDefect> {
    check_p(p)?;
    let m = a.support_len();
    if r == 0 || r > m {
        return Err(Error::InvalidInput(format!(
            "prefix length r = {r} must lie in 1..={m} (support length)"
        )));
    }
    if r as usize > MAX_DP_LEN {
        return Err(Error::Size(format!("prefix length {r} exceeds {MAX_DP_LEN}")));
    }
    let prefix: Vec<f64> = a
        .expand()
        .into_iter()
        .take(r as usize)
        .map(|x| root(x, p))
        .collect();
    let forward_vec = FiniteVector::new(prefix)?;
    let forward = garling_norm(&forward_vec, fam, p)?;
    let reversed = garling_norm(&forward_vec.reversed(), fam, p)?;
    Ok(SymmetricDefect {
        defect: forward.powered / reversed.powered,
        forward,
        reversed,
    })
}

/// `||g_r||_d^p / ||g_r||_g^p` where `g_r` reverses `(a_i^(1/p))` over the
/// support of the witness `f^(r)`. The Lorentz side equals `A(f^(r))` and the
/// Garling side is at most `B(f^(r))`, so the gap is at least `r/6`.
pub fn inclusion_gap(fam: &WeightFamily, p: f64, r: usize) -> Result<f64> {
    check_p(p)?;
    let d = find_block_lengths(fam, r, DEFAULT_SLACK, fam.cap())?;
    let f = build_witness(fam, &d)?;
    inclusion_gap_for(&f, fam, p)
}

/// [`inclusion_gap`] for an already constructed non-increasing sequence.
pub fn inclusion_gap_for(f: &StepSequence, fam: &WeightFamily, p: f64) -> Result<f64> {
    check_p(p)?;
    let m = f.support_len();
    if m as usize > MAX_DP_LEN {
        return Err(Error::Size(format!("witness support {m} exceeds {MAX_DP_LEN}")));
    }
    let g = FiniteVector::new(f.expand().into_iter().rev().map(|x| root(x, p)).collect())?;
    let lorentz = lorentz_norm(&g, fam, p)?;
    let garling = garling_norm(&g, fam, p)?;
    Ok(lorentz.powered / garling.powered)
}
