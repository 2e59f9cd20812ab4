//! The functionals `A(f, w) = sum a_i w_i` and
//! `B(f, w) = sup_n sum_{i<=n} a_i w_{1+n-i}` on run-length-encoded
//! non-increasing sequences.
//!
//! A [`StepSequence`] stores `f` as runs `(length, value)` with strictly
//! decreasing values. Both functionals are evaluated run by run from prefix
//! sums of the weights, so the cost depends on the number of runs (and, for
//! `B`, on the support length) but never on materializing `f`.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, rational_to_f64};
use crate::summation::Compensated;
use crate::weights::WeightFamily;

/// Scalar types a [`StepSequence`] can carry.
pub trait StepValue: Clone + PartialOrd + Zero + Debug {
    /// Finite and non-negative.
    fn is_admissible(&self) -> bool;
}

impl StepValue for f64 {
    fn is_admissible(&self) -> bool {
        self.is_finite() && *self >= 0.0
    }
}

impl StepValue for BigRational {
    fn is_admissible(&self) -> bool {
        !self.is_negative()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Run<V = f64> {
    pub len: u64,
    pub value: V,
}

impl<V> Run<V> {
    pub fn new(len: u64, value: V) -> Self {
        Run { len, value }
    }
}

/// A finitely supported, non-increasing, non-negative sequence in canonical
/// run-length form: lengths positive, values strictly decreasing and
/// strictly positive. The zero sequence has no runs.
#[derive(Clone, Debug, PartialEq)]
pub struct StepSequence<V = f64> {
    runs: Vec<Run<V>>,
}

impl<V: StepValue> StepSequence<V> {
    /// Validates and canonicalizes: adjacent equal values are merged and a
    /// trailing run of zeros is dropped. Increasing values, negative or
    /// non-finite values, and empty runs are rejected.
    pub fn new(runs: Vec<Run<V>>) -> Result<Self> {
        let mut out: Vec<Run<V>> = Vec::with_capacity(runs.len());
        for (idx, run) in runs.into_iter().enumerate() {
            if run.len == 0 {
                return Err(Error::InvalidInput(format!("run {idx} has zero length")));
            }
            if !run.value.is_admissible() {
                return Err(Error::InvalidInput(format!(
                    "run {idx} has inadmissible value {:?}",
                    run.value
                )));
            }
            match out.last_mut() {
                Some(prev) if run.value > prev.value => {
                    return Err(Error::InvalidInput(format!(
                        "run {idx} increases: {:?} after {:?}",
                        run.value, prev.value
                    )));
                }
                Some(prev) if run.value == prev.value => {
                    prev.len = prev.len.checked_add(run.len).ok_or_else(|| {
                        Error::InvalidInput("support length overflows u64".into())
                    })?;
                }
                _ => out.push(run),
            }
        }
        if out.last().is_some_and(|r| r.value.is_zero()) {
            out.pop();
        }
        let seq = StepSequence { runs: out };
        seq.runs
            .iter()
            .try_fold(0u64, |acc, r| acc.checked_add(r.len))
            .ok_or_else(|| Error::InvalidInput("support length overflows u64".into()))?;
        Ok(seq)
    }

    /// Compresses an explicit non-increasing sequence.
    pub fn from_values(values: &[V]) -> Result<Self> {
        Self::new(values.iter().map(|v| Run::new(1, v.clone())).collect())
    }

    pub fn runs(&self) -> &[Run<V>] {
        &self.runs
    }

    /// Number of nonzero terms `m`.
    pub fn support_len(&self) -> u64 {
        self.runs.iter().map(|r| r.len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.runs.is_empty()
    }

    /// Run end points `n_0 = 0 < n_1 < ... < n_r = m`.
    pub fn boundaries(&self) -> Vec<u64> {
        let mut acc = 0;
        std::iter::once(0)
            .chain(self.runs.iter().map(|r| {
                acc += r.len;
                acc
            }))
            .collect()
    }

    /// The first `m` terms, `a_1, ..., a_m`.
    pub fn expand(&self) -> Vec<V> {
        self.runs
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.value.clone(), r.len as usize))
            .collect()
    }

    /// `a_i` for `i >= 1` (zero beyond the support).
    pub fn term(&self, i: u64) -> V {
        let mut end = 0;
        for run in &self.runs {
            end += run.len;
            if i <= end {
                return run.value.clone();
            }
        }
        V::zero()
    }

    /// Applies `g` to every value; `g` must be strictly increasing with `g(0) = 0`
    /// for the result to stay canonical.
    pub fn map_values<U: StepValue>(&self, g: impl Fn(&V) -> U) -> Result<StepSequence<U>> {
        StepSequence::new(self.runs.iter().map(|r| Run::new(r.len, g(&r.value))).collect())
    }
}

impl StepSequence<BigRational> {
    pub fn to_f64(&self) -> StepSequence<f64> {
        // Distinct rationals can round to the same float, so re-canonicalize.
        StepSequence::new(
            self.runs
                .iter()
                .map(|r| Run::new(r.len, rational_to_f64(&r.value)))
                .collect(),
        )
        .expect("rounding preserves monotonicity")
    }
}

#[derive(Serialize, Deserialize)]
struct StepJson {
    runs: Vec<(u64, JsonScalar)>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonScalar {
    Text(String),
    Number(f64),
}

impl StepSequence<BigRational> {
    /// Parses `{"runs": [[len, "value"], ...]}`; values are decimal strings,
    /// rationals `"p/q"`, or plain JSON numbers.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: StepJson = serde_json::from_str(text)?;
        let runs = raw
            .runs
            .into_iter()
            .map(|(len, v)| {
                let value = match v {
                    JsonScalar::Text(s) => parse_rational(&s)?,
                    JsonScalar::Number(x) => BigRational::from_float(x)
                        .ok_or_else(|| Error::Parse(format!("non-finite run value {x}")))?,
                };
                Ok(Run::new(len, value))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(runs)
    }

    pub fn to_json(&self) -> String {
        let raw = StepJson {
            runs: self
                .runs
                .iter()
                .map(|r| (r.len, JsonScalar::Text(format_rational(&r.value))))
                .collect(),
        };
        serde_json::to_string(&raw).expect("serializable")
    }
}

/// `A`, `B`, the smallest maximizing window length, and `A / B` for one `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub argmax_n: u64,
    pub ratio: f64,
}

fn check_support(f: &StepSequence, fam: &WeightFamily) -> Result<u64> {
    let m = f.support_len();
    if m > fam.cap() {
        return Err(Error::Resource(format!(
            "support length {m} exceeds prefix-sum cap {}",
            fam.cap()
        )));
    }
    Ok(m)
}

/// `A(f, w) = sum_i a_i w_i`, one prefix-sum difference per run.
pub fn functional_a(f: &StepSequence, fam: &WeightFamily) -> Result<f64> {
    check_support(f, fam)?;
    let mut total = Compensated::ZERO;
    let mut start = 0u64;
    let mut w_start = Compensated::ZERO;
    for run in f.runs() {
        let end = start + run.len;
        let w_end = fam.prefix_sum_compensated(end)?;
        total.add_f64(run.value * w_end.diff(&w_start));
        start = end;
        w_start = w_end;
    }
    Ok(total.value())
}

/// `B(f, w, n) = sum_{i=1}^n a_i w_{1+n-i}`.
///
/// The run on `(s, e]` meets the reversed window in weights
/// `w_{n-min(e,n)+1}, ..., w_{n-s}`, i.e. `W(n-s) - W(n-min(e,n))`.
pub fn functional_b_at(f: &StepSequence, fam: &WeightFamily, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("window length n must be at least 1".into()));
    }
    check_support(f, fam)?;
    if n > fam.cap() {
        return Err(Error::Resource(format!("window length {n} exceeds cap {}", fam.cap())));
    }
    let mut total = Compensated::ZERO;
    let mut start = 0u64;
    for run in f.runs() {
        if start >= n {
            break;
        }
        let end = (start + run.len).min(n);
        let hi = fam.prefix_sum_compensated(n - start)?;
        let lo = fam.prefix_sum_compensated(n - end)?;
        total.add_f64(run.value * hi.diff(&lo));
        start += run.len;
    }
    Ok(total.value())
}

/// `B(f, w) = max_{1 <= n <= m} B(f, w, n)` together with the smallest
/// maximizing `n`.
///
/// Windows longer than the support never help: for `n > m` each `a_i` meets
/// `w_{1+n-i} <= w_{1+m-i}`. The scan keeps one running prefix sum
/// `W(n - n_j)` per run boundary and advances all of them by one weight per
/// step, so it costs `O(m * runs)` weight evaluations. The zero sequence
/// returns `(0, 1)`.
pub fn functional_b(f: &StepSequence, fam: &WeightFamily) -> Result<(f64, u64)> {
    let m = check_support(f, fam)?;
    if f.is_zero() {
        return Ok((0.0, 1));
    }
    let bounds = f.boundaries();
    let values: Vec<f64> = f.runs().iter().map(|r| r.value).collect();
    // cursors[j] = W(n - bounds[j]) once n > bounds[j], zero before.
    let mut cursors = vec![Compensated::ZERO; bounds.len()];
    let mut best = f64::NEG_INFINITY;
    let mut best_n = 1;
    for n in 1..=m {
        for (cursor, &b) in cursors.iter_mut().zip(&bounds) {
            if n > b {
                cursor.add_f64(fam.weight_at(n - b));
            } else {
                break;
            }
        }
        let mut total = Compensated::ZERO;
        for (k, &v) in values.iter().enumerate() {
            if bounds[k] >= n {
                break;
            }
            total.add_f64(v * cursors[k].diff(&cursors[k + 1]));
        }
        let value = total.value();
        if value > best {
            best = value;
            best_n = n;
        }
    }
    Ok((best, best_n))
}

/// Assembles `A`, `B` and `A / B`; the zero sequence is rejected here.
pub fn ratio(f: &StepSequence, fam: &WeightFamily) -> Result<FunctionalReport> {
    if f.is_zero() {
        return Err(Error::InvalidInput(
            "ratio is undefined for the zero sequence (B = 0)".into(),
        ));
    }
    let a = functional_a(f, fam)?;
    let (b, argmax_n) = functional_b(f, fam)?;
    Ok(FunctionalReport {
        a,
        b,
        argmax_n,
        ratio: a / b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(runs: &[(u64, f64)]) -> StepSequence {
        StepSequence::new(runs.iter().map(|&(l, v)| Run::new(l, v)).collect()).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * b.abs().max(1.0)
    }

    #[test]
    fn a_examples() {
        let h = WeightFamily::harmonic();
        assert!(close(functional_a(&seq(&[(2, 1.0)]), &h).unwrap(), 1.5));
        assert_eq!(functional_a(&seq(&[(1, 1.0)]), &h).unwrap(), 1.0);
        let p = WeightFamily::power(0.5).unwrap();
        let expected = 2.0 + 2f64.powf(-0.5) + 3f64.powf(-0.5);
        assert!(close(functional_a(&seq(&[(1, 2.0), (2, 1.0)]), &p).unwrap(), expected));
        assert!((expected - 3.28446).abs() < 1e-5);
    }

    #[test]
    fn b_at_examples() {
        let h = WeightFamily::harmonic();
        let f = seq(&[(2, 1.0)]);
        assert!(close(functional_b_at(&f, &h, 2).unwrap(), 1.5));
        assert!(close(functional_b_at(&f, &h, 3).unwrap(), 5.0 / 6.0));
        let p = WeightFamily::power(0.5).unwrap();
        assert_eq!(functional_b_at(&seq(&[(1, 5.0)]), &p, 1).unwrap(), 5.0);
        assert!(functional_b_at(&f, &h, 0).is_err());
    }

    #[test]
    fn b_examples() {
        let h = WeightFamily::harmonic();
        let (b, n) = functional_b(&seq(&[(2, 1.0)]), &h).unwrap();
        assert!(close(b, 1.5));
        assert_eq!(n, 2);
        assert_eq!(functional_b(&seq(&[(1, 1.0)]), &h).unwrap(), (1.0, 1));
        let p = WeightFamily::power(0.5).unwrap();
        let (b, n) = functional_b(&seq(&[(1, 2.0), (1, 1.0)]), &p).unwrap();
        assert!(close(b, 1.0 + 2f64.sqrt()));
        assert_eq!(n, 2);
    }

    #[test]
    fn ratio_examples() {
        let h = WeightFamily::harmonic();
        let rep = ratio(&seq(&[(2, 1.0)]), &h).unwrap();
        assert!(close(rep.ratio, 1.0));
        let rep = ratio(&seq(&[(1, 1.0)]), &WeightFamily::power(0.5).unwrap()).unwrap();
        assert_eq!((rep.a, rep.b, rep.argmax_n, rep.ratio), (1.0, 1.0, 1, 1.0));
    }

    #[test]
    fn zero_sequence() {
        let h = WeightFamily::harmonic();
        let z = StepSequence::<f64>::new(vec![Run::new(3, 0.0)]).unwrap();
        assert!(z.is_zero());
        assert_eq!(functional_a(&z, &h).unwrap(), 0.0);
        assert_eq!(functional_b(&z, &h).unwrap().0, 0.0);
        assert!(matches!(ratio(&z, &h), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn construction_canonicalizes_and_validates() {
        let f = seq(&[(1, 3.0), (2, 3.0), (1, 1.0), (4, 0.0)]);
        assert_eq!(f.runs(), &[Run::new(3, 3.0), Run::new(1, 1.0)]);
        assert_eq!(f.support_len(), 4);
        assert_eq!(f.boundaries(), vec![0, 3, 4]);
        assert_eq!(f.expand(), vec![3.0, 3.0, 3.0, 1.0]);
        assert_eq!(f.term(4), 1.0);
        assert_eq!(f.term(5), 0.0);

        assert!(StepSequence::new(vec![Run::new(1, 1.0), Run::new(1, 2.0)]).is_err());
        assert!(StepSequence::new(vec![Run::new(0, 1.0)]).is_err());
        assert!(StepSequence::new(vec![Run::new(1, -1.0)]).is_err());
        assert!(StepSequence::new(vec![Run::new(1, f64::NAN)]).is_err());
        assert!(StepSequence::new(vec![Run::new(1, 1.0), Run::new(1, 0.0), Run::new(1, 0.0)]).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let f = StepSequence::from_json(r#"{"runs": [[2, "1"], [3, "1/2"], [1, 0.25]]}"#).unwrap();
        assert_eq!(f.support_len(), 6);
        assert_eq!(f.to_json(), r#"{"runs":[[2,"1"],[3,"1/2"],[1,"1/4"]]}"#);
        assert_eq!(StepSequence::from_json(&f.to_json()).unwrap(), f);
        assert!(StepSequence::from_json(r#"{"runs": [[1, "1/2"], [1, "1"]]}"#).is_err());
        assert!(StepSequence::from_json(r#"{"runs": [[1, "x"]]}"#).is_err());
    }

    #[test]
    fn support_beyond_cap_is_a_resource_error() {
        let h = WeightFamily::harmonic().with_cap(10);
        let f = seq(&[(11, 1.0)]);
        assert!(matches!(functional_a(&f, &h), Err(Error::Resource(_))));
        assert!(matches!(functional_b(&f, &h), Err(Error::Resource(_))));
    }

    #[test]
    fn scan_and_pointwise_agree() {
        let p = WeightFamily::power(0.3).unwrap();
        let f = seq(&[(3, 2.0), (5, 1.5), (1, 0.2), (7, 0.1)]);
        let (b, n) = functional_b(&f, &p).unwrap();
        let pointwise = (1..=f.support_len())
            .map(|k| functional_b_at(&f, &p, k).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(close(b, pointwise));
        assert!(close(functional_b_at(&f, &p, n).unwrap(), b));
    }
}
