//! Witness sequences on which `A(f, w) / B(f, w)` exceeds any prescribed
//! bound, for weights that vanish but are not summable.
//!
//! Block lengths `d_1 < d_2 < ...` (with `d_0 = 0`, `n_k = d_1 + ... + d_k`)
//! are chosen so that
//!
//! * (i)  `W(n_{k-1}) <= W(d_k) / 2`, and
//! * (ii) `W(d_{k-1} + d_k) - W(d_k) <= 2^(1-k) W(d_{k-1})`.
//!
//! The witness `f^(r)` takes the value `1 / W(d_k)` on `(n_{k-1}, n_k]`.
//! Condition (i) gives `A(f^(r)) >= r/2` and condition (ii) gives
//! `B(f^(r)) <= 3`, hence `A / B >= r/6`.
//!
//! Both conditions are monotone in `d_k`: `W` increases, and the window sum
//! `W(d_{k-1} + d_k) - W(d_k)` can only shrink as the window slides right
//! over non-increasing weights. The search therefore finds each minimal
//! `d_k` by doubling and bisection.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{functional_a_exact, functional_b_exact, ExactPrefix};
use crate::functionals::{functional_a, functional_b, Run, StepSequence};
use crate::scalar::{format_f64, format_rational, parse_f64};
use crate::weights::WeightFamily;

/// Multiplicative margin applied to the right-hand sides during the search.
pub const DEFAULT_SLACK: f64 = 1e-9;
/// Relative tolerance for the `A >= r/2` and `B <= 3` checks in float mode.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const MAX_SLACK: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    Rational,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(Mode::Float),
            "rational" => Ok(Mode::Rational),
            _ => Err(Error::Parse(format!("unknown mode {s:?} (expected float or rational)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// `W(d_k)/2 - W(n_{k-1})` for `k = 1..r`.
    pub cond_i: Vec<String>,
    /// `2^(1-k) W(d_{k-1}) - (W(d_{k-1} + d_k) - W(d_k))` for `k = 1..r`.
    pub cond_ii: Vec<String>,
}

/// The bounds guaranteed by the construction, independent of numerics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedBounds {
    pub a_lower: String,
    pub b_upper: String,
    pub ratio_lower: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub family: String,
    pub r: usize,
    pub d: Vec<u64>,
    pub n: Vec<u64>,
    pub block_values: Vec<String>,
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
    pub argmax_n: u64,
    pub ratio: String,
    pub certified: CertifiedBounds,
    pub margins: Margins,
    pub slack: f64,
    pub tolerance: f64,
    pub mode: Mode,
}

impl WitnessCertificate {
    pub fn a_value(&self) -> f64 {
        parse_f64(&self.a).unwrap_or(f64::NAN)
    }

    pub fn b_value(&self) -> f64 {
        parse_f64(&self.b).unwrap_or(f64::NAN)
    }

    pub fn ratio_value(&self) -> f64 {
        parse_f64(&self.ratio).unwrap_or(f64::NAN)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn check_search_args(fam: &WeightFamily, r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be at least 1".into()));
    }
    fam.require_vanishing_divergent()
}

/// Smallest `x` in `[1, cap]` with `pred(x)`, for `pred` monotone
/// (false ... false true ... true). `None` if `pred(cap)` is false.
fn first_true(cap: u64, mut pred: impl FnMut(u64) -> Result<bool>) -> Result<Option<u64>> {
    if cap == 0 {
        return Ok(None);
    }
    if pred(1)? {
        return Ok(Some(1));
    }
    let mut lo = 1;
    let mut hi = 2u64;
    loop {
        let probe = hi.min(cap);
        if pred(probe)? {
            hi = probe;
            break;
        }
        if probe == cap {
            return Ok(None);
        }
        lo = probe;
        hi = hi.saturating_mul(2);
    }
    // pred(lo) false, pred(hi) true
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Componentwise-minimal block lengths `d_1..d_r` satisfying (i) and (ii)
/// with right-hand sides scaled by `1 - slack`.
pub fn find_block_lengths(fam: &WeightFamily, r: usize, slack: f64, cap: u64) -> Result<Vec<u64>> {
    check_search_args(fam, r)?;
    let mut d: Vec<u64> = Vec::with_capacity(r);
    for _ in 0..r {
        extend_block_lengths(fam, &mut d, slack, cap)?;
    }
    Ok(d)
}

/// Appends the minimal next block length to `d`. Minimality of every block
/// means `d` for `r` is a prefix of `d` for `r + 1`.
pub fn extend_block_lengths(fam: &WeightFamily, d: &mut Vec<u64>, slack: f64, cap: u64) -> Result<u64> {
    fam.require_vanishing_divergent()?;
    if !(0.0..=MAX_SLACK).contains(&slack) {
        return Err(Error::InvalidInput(format!("slack must lie in [0, {MAX_SLACK}], got {slack}")));
    }
    let keep = 1.0 - slack;
    let k = d.len() + 1;
    let d_prev = d.last().copied().unwrap_or(0);
    let n_prev: u64 = d.iter().sum();
    let w_n_prev = fam.prefix_sum(n_prev)?;
    let w_d_prev = fam.prefix_sum(d_prev)?;
    let scale_ii = keep * 0.5f64.powi(k as i32 - 1);
    let found = first_true(cap, |x| {
        let w_x = fam.prefix_sum_compensated(x)?;
        if w_n_prev > keep * 0.5 * w_x.value() {
            return Ok(false);
        }
        let window = fam.prefix_sum_compensated(d_prev + x)?.diff(&w_x);
        Ok(window <= scale_ii * w_d_prev)
    })?;
    let d_k = found.ok_or(Error::Infeasible { k, cap })?;
    d.push(d_k);
    Ok(d_k)
}

/// As [`find_block_lengths`], deciding both conditions in exact rational
/// arithmetic (no slack).
pub fn find_block_lengths_exact(fam: &WeightFamily, r: usize, cap: u64) -> Result<Vec<u64>> {
    check_search_args(fam, r)?;
    let mut w = ExactPrefix::new(fam)?;
    let mut d: Vec<u64> = Vec::with_capacity(r);
    let mut n_prev = 0u64;
    for k in 1..=r {
        let d_prev = d.last().copied().unwrap_or(0);
        let twice_w_n_prev = w.get(n_prev)? * BigRational::from_integer(2.into());
        let w_d_prev = w.get(d_prev)?.clone();
        let pow = BigRational::from_integer(num_traits::pow(BigInt::from(2), k - 1));
        let found = first_true(cap, |x| {
            if &twice_w_n_prev > w.get(x)? {
                return Ok(false);
            }
            Ok(w.window(x, d_prev + x)? * &pow <= w_d_prev)
        })?;
        let d_k = found.ok_or(Error::Infeasible { k, cap })?;
        d.push(d_k);
        n_prev += d_k;
    }
    Ok(d)
}

fn check_blocks(d: &[u64]) -> Result<()> {
    if d.is_empty() {
        return Err(Error::InvalidInput("block lengths must be non-empty".into()));
    }
    if d.contains(&0) {
        return Err(Error::InvalidInput("block lengths must be positive".into()));
    }
    d.iter()
        .try_fold(0u64, |acc, &x| acc.checked_add(x))
        .ok_or_else(|| Error::InvalidInput("total support overflows u64".into()))?;
    Ok(())
}

/// `f^(r)` with value `1 / W(d_k)` on the `k`-th block.
pub fn build_witness(fam: &WeightFamily, d: &[u64]) -> Result<StepSequence> {
    check_blocks(d)?;
    let mut runs: Vec<Run> = Vec::with_capacity(d.len());
    for (k, &len) in d.iter().enumerate() {
        let value = 1.0 / fam.prefix_sum(len)?;
        if let Some(prev) = runs.last() {
            if value >= prev.value {
                return Err(Error::InvalidInput(format!(
                    "block values do not decrease at k = {}: W(d_k) must grow (condition (i))",
                    k + 1
                )));
            }
        }
        runs.push(Run::new(len, value));
    }
    StepSequence::new(runs)
}

pub fn build_witness_exact(fam: &WeightFamily, d: &[u64]) -> Result<StepSequence<BigRational>> {
    check_blocks(d)?;
    let mut w = ExactPrefix::new(fam)?;
    build_witness_with(&mut w, d)
}

fn build_witness_with(w: &mut ExactPrefix<'_>, d: &[u64]) -> Result<StepSequence<BigRational>> {
    let mut runs: Vec<Run<BigRational>> = Vec::with_capacity(d.len());
    for (k, &len) in d.iter().enumerate() {
        let value = w.get(len)?.recip();
        if let Some(prev) = runs.last() {
            if value >= prev.value {
                return Err(Error::InvalidInput(format!(
                    "block values do not decrease at k = {}: W(d_k) must grow (condition (i))",
                    k + 1
                )));
            }
        }
        runs.push(Run::new(len, value));
    }
    StepSequence::new(runs)
}

fn certified_bounds(r: usize) -> CertifiedBounds {
    let q = |num: usize, den: usize| {
        format_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    };
    CertifiedBounds {
        a_lower: q(r, 2),
        b_upper: "3".into(),
        ratio_lower: q(r, 6),
    }
}

fn failure(condition: String, residual: String) -> Error {
    Error::Certification { condition, residual }
}

/// Re-derives everything from `fam` and `d`: both conditions, the witness,
/// `A`, `B` and the ratio, and checks `A >= r/2`, `B <= 3`.
///
/// In float mode the conditions are checked as computed and the two bounds
/// with relative `tolerance`; in rational mode everything is exact.
pub fn verify_certificate(
    fam: &WeightFamily,
    d: &[u64],
    tolerance: f64,
    mode: Mode,
) -> Result<WitnessCertificate> {
    check_blocks(d)?;
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(Error::InvalidInput(format!("tolerance must be non-negative, got {tolerance}")));
    }
    match mode {
        Mode::Float => verify_float(fam, d, tolerance),
        Mode::Rational => verify_rational(fam, d, tolerance),
    }
}

fn partial_sums(d: &[u64]) -> Vec<u64> {
    d.iter()
        .scan(0u64, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

fn verify_float(fam: &WeightFamily, d: &[u64], tolerance: f64) -> Result<WitnessCertificate> {
    let r = d.len();
    let n = partial_sums(d);
    let mut cond_i = Vec::with_capacity(r);
    let mut cond_ii = Vec::with_capacity(r);
    for k in 1..=r {
        let d_k = d[k - 1];
        let d_prev = if k == 1 { 0 } else { d[k - 2] };
        let n_prev = if k == 1 { 0 } else { n[k - 2] };

        let w_d_k = fam.prefix_sum_compensated(d_k)?;
        let res_i = 0.5 * w_d_k.value() - fam.prefix_sum(n_prev)?;
        if res_i < 0.0 {
            return Err(failure(format!("condition (i) at k = {k}"), format_f64(res_i)));
        }
        let window = fam.prefix_sum_compensated(d_prev + d_k)?.diff(&w_d_k);
        let res_ii = 0.5f64.powi(k as i32 - 1) * fam.prefix_sum(d_prev)? - window;
        if res_ii < 0.0 {
            return Err(failure(format!("condition (ii) at k = {k}"), format_f64(res_ii)));
        }
        cond_i.push(format_f64(res_i));
        cond_ii.push(format_f64(res_ii));
    }

    let f = build_witness(fam, d)?;
    let a = functional_a(&f, fam)?;
    let (b, argmax_n) = functional_b(&f, fam)?;
    let a_lower = r as f64 / 2.0;
    if a < a_lower * (1.0 - tolerance) {
        return Err(failure(format!("A >= {a_lower}"), format_f64(a - a_lower)));
    }
    if b > 3.0 * (1.0 + tolerance) {
        return Err(failure("B <= 3".into(), format_f64(3.0 - b)));
    }
    Ok(WitnessCertificate {
        family: fam.spec(),
        r,
        d: d.to_vec(),
        n,
        block_values: f.runs().iter().map(|run| format_f64(run.value)).collect(),
        a: format_f64(a),
        b: format_f64(b),
        argmax_n,
        ratio: format_f64(a / b),
        certified: certified_bounds(r),
        margins: Margins { cond_i, cond_ii },
        slack: 0.0,
        tolerance,
        mode: Mode::Float,
    })
}

fn verify_rational(fam: &WeightFamily, d: &[u64], tolerance: f64) -> Result<WitnessCertificate> {
    let r = d.len();
    let n = partial_sums(d);
    let mut w = ExactPrefix::new(fam)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut cond_i = Vec::with_capacity(r);
    let mut cond_ii = Vec::with_capacity(r);
    for k in 1..=r {
        let d_k = d[k - 1];
        let d_prev = if k == 1 { 0 } else { d[k - 2] };
        let n_prev = if k == 1 { 0 } else { n[k - 2] };

        let res_i = &half * w.get(d_k)? - w.get(n_prev)?;
        if res_i < BigRational::zero() {
            return Err(failure(format!("condition (i) at k = {k}"), format_rational(&res_i)));
        }
        let scale = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(2), k - 1));
        let res_ii = scale * w.get(d_prev)? - w.window(d_k, d_prev + d_k)?;
        if res_ii < BigRational::zero() {
            return Err(failure(format!("condition (ii) at k = {k}"), format_rational(&res_ii)));
        }
        cond_i.push(format_rational(&res_i));
        cond_ii.push(format_rational(&res_ii));
    }

    let f = build_witness_with(&mut w, d)?;
    let a = functional_a_exact(&f, &mut w)?;
    let (b, argmax_n) = functional_b_exact(&f, &mut w)?;
    let a_lower = BigRational::new(BigInt::from(r), BigInt::from(2));
    if a < a_lower {
        return Err(failure(format!("A >= {}", format_rational(&a_lower)), format_rational(&(&a - &a_lower))));
    }
    let three = BigRational::from_integer(BigInt::from(3));
    if b > three {
        return Err(failure("B <= 3".into(), format_rational(&(&three - &b))));
    }
    let ratio = &a / &b;
    Ok(WitnessCertificate {
        family: fam.spec(),
        r,
        d: d.to_vec(),
        n,
        block_values: f.runs().iter().map(|run| format_rational(&run.value)).collect(),
        a: format_rational(&a),
        b: format_rational(&b),
        argmax_n,
        ratio: format_rational(&ratio),
        certified: certified_bounds(r),
        margins: Margins { cond_i, cond_ii },
        slack: 0.0,
        tolerance,
        mode: Mode::Rational,
    })
}

/// Searches, then certifies. The recorded slack is the one used in the search.
pub fn certify(fam: &WeightFamily, r: usize, slack: f64, cap: u64, mode: Mode) -> Result<WitnessCertificate> {
    let (d, slack) = match mode {
        Mode::Float => (find_block_lengths(fam, r, slack, cap)?, slack),
        Mode::Rational => (find_block_lengths_exact(fam, r, cap)?, 0.0),
    };
    let mut cert = verify_certificate(fam, &d, DEFAULT_TOLERANCE, mode)?;
    cert.slack = slack;
    Ok(cert)
}

/// Re-checks a stored certificate from scratch. Every recorded quantity
/// must match the recomputation: exactly in rational mode, within the
/// certificate's tolerance in float mode.
pub fn reverify(cert: &WitnessCertificate) -> Result<WitnessCertificate> {
    let fam = WeightFamily::parse(&cert.family)?;
    if cert.r != cert.d.len() {
        return Err(Error::InvalidInput(format!(
            "certificate declares r = {} but lists {} block lengths",
            cert.r,
            cert.d.len()
        )));
    }
    let mut fresh = verify_certificate(&fam, &cert.d, cert.tolerance, cert.mode)?;
    fresh.slack = cert.slack;
    let mismatch = |field: &str, recorded: &str, recomputed: &str| {
        failure(
            format!("recorded {field} matches recomputation"),
            format!("recorded {recorded}, recomputed {recomputed}"),
        )
    };
    let same = |x: &str, y: &str| -> bool {
        match cert.mode {
            Mode::Rational => x == y,
            Mode::Float => match (parse_f64(x), parse_f64(y)) {
                (Ok(a), Ok(b)) => (a - b).abs() <= cert.tolerance.max(1e-12) * a.abs().max(b.abs()).max(1e-300),
                _ => false,
            },
        }
    };
    for (field, recorded, recomputed) in [
        ("A", &cert.a, &fresh.a),
        ("B", &cert.b, &fresh.b),
        ("ratio", &cert.ratio, &fresh.ratio),
    ] {
        if !same(recorded, recomputed) {
            return Err(mismatch(field, recorded, recomputed));
        }
    }
    if cert.n != fresh.n || cert.argmax_n != fresh.argmax_n {
        return Err(mismatch("n / argmax_n", &format!("{:?}", cert.n), &format!("{:?}", fresh.n)));
    }
    if cert.certified != fresh.certified {
        return Err(mismatch(
            "certified bounds",
            &format!("{:?}", cert.certified),
            &format!("{:?}", fresh.certified),
        ));
    }
    Ok(fresh)
}

/// `(r/6, A/B)` for the constructed witness `f^(r)`.
pub fn lower_bound_s(fam: &WeightFamily, r: usize) -> Result<(f64, f64)> {
    let d = find_block_lengths(fam, r, DEFAULT_SLACK, fam.cap())?;
    let f = build_witness(fam, &d)?;
    let a = functional_a(&f, fam)?;
    let (b, _) = functional_b(&f, fam)?;
    Ok((r as f64 / 6.0, a / b))
}
