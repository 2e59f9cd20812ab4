//! Weight sequences `w = (w_i)`, their prefix sums `W(n)`, and the
//! summable / bounded-below / vanishing-but-divergent classification.
//!
//! Every family is normalized (`w_1 = 1`), non-increasing and strictly
//! positive. Prefix sums are served from a block cache: `W` is stored at every
//! multiple of [`BLOCK`] up to [`DENSE_LIMIT`], and at every multiple of
//! [`COARSE_BLOCK`] beyond it, so a query only sums the gap to the nearest
//! checkpoint below. Checkpoints are always filled in index order, so a value
//! never depends on which queries came first.

use std::fmt;
use std::path::Path;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, rational_to_f64};
use crate::summation::Compensated;

/// Block size of the dense prefix-sum cache.
pub const BLOCK: u64 = 1024;
/// Largest index covered by the dense cache.
pub const DENSE_LIMIT: u64 = 1 << 32;
/// Checkpoint spacing past the dense range.
pub const COARSE_BLOCK: u64 = 1 << 20;
/// Default maximum index for prefix-sum queries.
pub const DEFAULT_CAP: u64 = 1 << 40;
/// Partial-sum length used for summability constants.
pub const SUMMABLE_PARTIAL_TERMS: u64 = 1_000_000;

/// How an explicit weight list is continued past its last entry `w_L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailRule {
    /// `w_i = w_L` for `i > L`.
    Constant,
    /// `w_i = w_L * L / i` for `i > L`.
    Pattern,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyKind {
    /// `w_i = i^(-alpha)`.
    Power { alpha: f64 },
    /// `w_i = 1 / i`.
    Harmonic,
    /// `w_i = max(floor, 1 / i)`.
    ConstantTail { floor: f64 },
    ExplicitRational {
        values: Vec<BigRational>,
        tail: TailRule,
        /// Where the list came from, used as the family's spec string.
        source: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `sum w_i < infinity`.
    Summable,
    /// `inf w_i > 0`.
    BoundedBelow,
    /// `w` tends to zero but is not summable.
    CZeroNotEllOne,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Branch::Summable => "Summable",
            Branch::BoundedBelow => "BoundedBelow",
            Branch::CZeroNotEllOne => "CZeroNotEllOne",
        };
        f.write_str(s)
    }
}

/// Which side of the dichotomy a weight falls on. For the first two branches
/// `constant` is a `C` with `A(f) <= C * B(f)` for all non-increasing `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub branch: Branch,
    pub constant: Option<f64>,
    pub evidence: String,
}

#[derive(Debug, Default, Clone)]
struct PrefixCache {
    /// `blocks[k] = W(k * BLOCK)`.
    blocks: Vec<Compensated>,
    /// `coarse[k] = W(dense_limit + k * COARSE_BLOCK)`.
    coarse: Vec<Compensated>,
}

#[derive(Debug, Deserialize)]
struct ExplicitFile {
    #[serde(alias = "values")]
    weights: Vec<String>,
    tail: TailRule,
}

pub struct WeightFamily {
    kind: FamilyKind,
    cap: u64,
    dense_limit: u64,
    /// Float copies of explicit weights and the tail parameter (`w_L` or `w_L * L`).
    explicit_f64: Vec<f64>,
    explicit_tail_f64: f64,
    cache: RwLock<PrefixCache>,
}

impl Clone for WeightFamily {
    fn clone(&self) -> Self {
        let cache = self.cache.read().expect("prefix cache poisoned").clone();
        WeightFamily {
            kind: self.kind.clone(),
            cap: self.cap,
            dense_limit: self.dense_limit,
            explicit_f64: self.explicit_f64.clone(),
            explicit_tail_f64: self.explicit_tail_f64,
            cache: RwLock::new(cache),
        }
    }
}

impl fmt::Debug for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFamily")
            .field("kind", &self.kind)
            .field("cap", &self.cap)
            .finish()
    }
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

impl WeightFamily {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidInput(format!(
                "power exponent must be a positive real, got {alpha}"
            )));
        }
        Ok(Self::from_kind(FamilyKind::Power { alpha }))
    }

    pub fn harmonic() -> Self {
        Self::from_kind(FamilyKind::Harmonic)
    }

    pub fn constant_tail(floor: f64) -> Result<Self> {
        if !(floor > 0.0 && floor <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "constant-tail floor must lie in (0, 1], got {floor}"
            )));
        }
        Ok(Self::from_kind(FamilyKind::ConstantTail { floor }))
    }

    pub fn explicit(values: Vec<BigRational>, tail: TailRule, source: impl Into<String>) -> Result<Self> {
        let first = values
            .first()
            .ok_or_else(|| Error::InvalidInput("explicit weight list is empty".into()))?;
        if !first.is_one() {
            return Err(Error::InvalidInput(format!(
                "explicit weights must start with w_1 = 1, got {}",
                format_rational(first)
            )));
        }
        for (i, pair) in values.windows(2).enumerate() {
            if pair[1] > pair[0] {
                return Err(Error::InvalidInput(format!(
                    "explicit weights increase at index {}",
                    i + 2
                )));
            }
        }
        if let Some(last) = values.last() {
            if !last.is_positive() {
                return Err(Error::InvalidInput("explicit weights must be strictly positive".into()));
            }
        }
        let explicit_f64 = values.iter().map(rational_to_f64).collect::<Vec<_>>();
        let last = values.last().cloned().unwrap_or_else(BigRational::one);
        let tail_param = match tail {
            TailRule::Constant => last,
            TailRule::Pattern => last * BigRational::from_integer(BigInt::from(values.len())),
        };
        let mut fam = Self::from_kind(FamilyKind::ExplicitRational {
            values,
            tail,
            source: source.into(),
        });
        fam.explicit_f64 = explicit_f64;
        fam.explicit_tail_f64 = rational_to_f64(&tail_param);
        Ok(fam)
    }

    /// Reads `{"weights": ["1", "1/2", ...], "tail": "constant" | "pattern"}`.
    pub fn explicit_from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: ExplicitFile = serde_json::from_str(&text)?;
        let values = file
            .weights
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        Self::explicit(values, file.tail, format!("explicit:{}", path.display()))
    }

    /// Parses `power:<alpha>`, `harmonic`, `ctail:<floor>` or `explicit:<file.json>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (spec, None),
        };
        let number = |a: Option<&str>| -> Result<f64> {
            let a = a.ok_or_else(|| Error::Parse(format!("family {spec:?} needs a parameter")))?;
            Ok(rational_to_f64(&parse_rational(a)?))
        };
        match name {
            "power" => Self::power(number(arg)?),
            "harmonic" if arg.is_none() => Ok(Self::harmonic()),
            "ctail" => Self::constant_tail(number(arg)?),
            "explicit" => {
                let path = arg.ok_or_else(|| Error::Parse("explicit family needs a file path".into()))?;
                Self::explicit_from_file(Path::new(path))
            }
            _ => Err(Error::Parse(format!("unknown weight family {spec:?}"))),
        }
    }

    fn from_kind(kind: FamilyKind) -> Self {
        WeightFamily {
            kind,
            cap: DEFAULT_CAP,
            dense_limit: DENSE_LIMIT,
            explicit_f64: Vec::new(),
            explicit_tail_f64: 0.0,
            cache: RwLock::new(PrefixCache {
                blocks: vec![Compensated::ZERO],
                coarse: Vec::new(),
            }),
        }
    }

    /// Sets the largest admissible prefix-sum index.
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    #[cfg(test)]
    fn with_dense_limit(mut self, limit: u64) -> Self {
        assert_eq!(limit % BLOCK, 0);
        self.dense_limit = limit;
        self
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    /// Canonical configuration string; [`WeightFamily::parse`] reads it back.
    pub fn spec(&self) -> String {
        match &self.kind {
            FamilyKind::Power { alpha } => format!("power:{alpha}"),
            FamilyKind::Harmonic => "harmonic".to_string(),
            FamilyKind::ConstantTail { floor } => format!("ctail:{floor}"),
            FamilyKind::ExplicitRational { source, .. } => source.clone(),
        }
    }

    /// `w_i` for `i >= 1`.
    #[inline]
    pub fn weight_at(&self, i: u64) -> f64 {
        assert!(i >= 1, "weights are indexed from 1");
        match &self.kind {
            FamilyKind::Harmonic => 1.0 / i as f64,
            FamilyKind::Power { alpha } => power_weight(*alpha, i),
            FamilyKind::ConstantTail { floor } => floor.max(1.0 / i as f64),
            FamilyKind::ExplicitRational { values, tail, .. } => {
                let len = values.len() as u64;
                if i <= len {
                    self.explicit_f64[(i - 1) as usize]
                } else {
                    match tail {
                        TailRule::Constant => self.explicit_tail_f64,
                        TailRule::Pattern => self.explicit_tail_f64 / i as f64,
                    }
                }
            }
        }
    }

    /// Exact `w_i`, when the family takes rational values.
    pub fn weight_exact(&self, i: u64) -> Option<BigRational> {
        assert!(i >= 1, "weights are indexed from 1");
        let recip = |n: BigInt| BigRational::new(BigInt::one(), n);
        match &self.kind {
            FamilyKind::Harmonic => Some(recip(BigInt::from(i))),
            FamilyKind::Power { alpha } => {
                let k = integer_exponent(*alpha)?;
                Some(recip(num_traits::pow(BigInt::from(i), k)))
            }
            FamilyKind::ConstantTail { floor } => {
                let floor = BigRational::from_float(*floor)?;
                Some(floor.max(recip(BigInt::from(i))))
            }
            FamilyKind::ExplicitRational { values, tail, .. } => {
                let len = values.len() as u64;
                if i <= len {
                    return Some(values[(i - 1) as usize].clone());
                }
                let last = values.last()?.clone();
                Some(match tail {
                    TailRule::Constant => last,
                    TailRule::Pattern => {
                        last * BigRational::new(BigInt::from(len), BigInt::from(i))
                    }
                })
            }
        }
    }

    /// True when [`WeightFamily::weight_exact`] is available at every index.
    pub fn is_rational(&self) -> bool {
        match &self.kind {
            FamilyKind::Harmonic | FamilyKind::ExplicitRational { .. } => true,
            FamilyKind::Power { alpha } => integer_exponent(*alpha).is_some(),
            FamilyKind::ConstantTail { floor } => floor.is_finite(),
        }
    }

    fn check_cap(&self, n: u64) -> Result<()> {
        if n > self.cap {
            return Err(Error::Resource(format!(
                "prefix sum index {n} exceeds cap {}",
                self.cap
            )));
        }
        Ok(())
    }

    /// `W(n) = w_1 + ... + w_n`, with `W(0) = 0`.
    pub fn prefix_sum(&self, n: u64) -> Result<f64> {
        self.prefix_sum_compensated(n).map(|c| c.value())
    }

    /// `W(n)` as an unevaluated double-double, for differences of nearby sums.
    pub fn prefix_sum_compensated(&self, n: u64) -> Result<Compensated> {
        self.check_cap(n)?;
        if n <= self.dense_limit {
            let k = (n / BLOCK) as usize;
            let base = self.dense_checkpoint(k);
            Ok(self.sum_range(base, k as u64 * BLOCK, n))
        } else {
            let k = ((n - self.dense_limit) / COARSE_BLOCK) as usize;
            let base = self.coarse_checkpoint(k);
            let start = self.dense_limit + k as u64 * COARSE_BLOCK;
            Ok(self.sum_range(base, start, n))
        }
    }

    /// `W(hi) - W(lo)` for `lo <= hi`.
    pub fn window_sum(&self, lo: u64, hi: u64) -> Result<f64> {
        debug_assert!(lo <= hi);
        let a = self.prefix_sum_compensated(hi)?;
        let b = self.prefix_sum_compensated(lo)?;
        Ok(a.diff(&b))
    }

    /// Adds `w_{from+1} + ... + w_to` to `acc`.
    fn sum_range(&self, mut acc: Compensated, from: u64, to: u64) -> Compensated {
        for i in from + 1..=to {
            acc.add_f64(self.weight_at(i));
        }
        acc
    }

    fn dense_checkpoint(&self, k: usize) -> Compensated {
        {
            let cache = self.cache.read().expect("prefix cache poisoned");
            if let Some(c) = cache.blocks.get(k) {
                return *c;
            }
        }
        let mut cache = self.cache.write().expect("prefix cache poisoned");
        while cache.blocks.len() <= k {
            let j = cache.blocks.len() as u64;
            let last = *cache.blocks.last().expect("block 0 always present");
            let next = self.sum_range(last, (j - 1) * BLOCK, j * BLOCK);
            cache.blocks.push(next);
        }
        cache.blocks[k]
    }

    fn coarse_checkpoint(&self, k: usize) -> Compensated {
        {
            let cache = self.cache.read().expect("prefix cache poisoned");
            if let Some(c) = cache.coarse.get(k) {
                return *c;
            }
        }
        let top = self.dense_checkpoint((self.dense_limit / BLOCK) as usize);
        let mut cache = self.cache.write().expect("prefix cache poisoned");
        if cache.coarse.is_empty() {
            cache.coarse.push(top);
        }
        while cache.coarse.len() <= k {
            let j = cache.coarse.len() as u64;
            let last = *cache.coarse.last().expect("non-empty");
            let start = self.dense_limit + (j - 1) * COARSE_BLOCK;
            let next = self.sum_range(last, start, start + COARSE_BLOCK);
            cache.coarse.push(next);
        }
        cache.coarse[k]
    }

    /// `inf_i w_i`, zero when the weights vanish.
    pub fn infimum(&self) -> f64 {
        match &self.kind {
            FamilyKind::ConstantTail { floor } => *floor,
            FamilyKind::ExplicitRational { tail: TailRule::Constant, .. } => self.explicit_tail_f64,
            _ => 0.0,
        }
    }

    pub fn classify(&self) -> Classification {
        match &self.kind {
            FamilyKind::Power { alpha } if *alpha > 1.0 => {
                let (bound, evidence) = power_sum_upper_bound(*alpha);
                Classification {
                    branch: Branch::Summable,
                    constant: Some(bound),
                    evidence,
                }
            }
            FamilyKind::Power { alpha } => Classification {
                branch: Branch::CZeroNotEllOne,
                constant: None,
                evidence: format!("p-series with exponent {alpha} <= 1 diverges and i^-{alpha} -> 0"),
            },
            FamilyKind::Harmonic => Classification {
                branch: Branch::CZeroNotEllOne,
                constant: None,
                evidence: "harmonic series diverges and 1/i -> 0".into(),
            },
            FamilyKind::ConstantTail { floor } => Classification {
                branch: Branch::BoundedBelow,
                constant: Some(1.0 / floor),
                evidence: format!("inf w_i = {floor}, constant w_1 / w_inf"),
            },
            FamilyKind::ExplicitRational { values, tail, .. } => {
                let last = values.last().expect("validated non-empty");
                match tail {
                    TailRule::Constant => Classification {
                        branch: Branch::BoundedBelow,
                        constant: Some(rational_to_f64(&last.recip())),
                        evidence: format!(
                            "constant tail, inf w_i = w_{} = {}",
                            values.len(),
                            format_rational(last)
                        ),
                    },
                    TailRule::Pattern => Classification {
                        branch: Branch::CZeroNotEllOne,
                        constant: None,
                        evidence: format!(
                            "pattern tail w_i = w_L * L / i with L = {}, a multiple of the harmonic tail",
                            values.len()
                        ),
                    },
                }
            }
        }
    }

    /// Shorthand for the branch requested by the witness construction.
    pub fn require_vanishing_divergent(&self) -> Result<()> {
        let class = self.classify();
        if class.branch != Branch::CZeroNotEllOne {
            return Err(Error::Precondition(format!(
                "{} is {} ({}); no witness exists",
                self.spec(),
                class.branch,
                class.evidence
            )));
        }
        Ok(())
    }
}

#[inline]
fn power_weight(alpha: f64, i: u64) -> f64 {
    let x = i as f64;
    if alpha == 0.5 {
        1.0 / x.sqrt()
    } else if alpha == 1.0 {
        1.0 / x
    } else if alpha == 2.0 {
        1.0 / (x * x)
    } else {
        x.powf(-alpha)
    }
}

fn integer_exponent(alpha: f64) -> Option<usize> {
    (alpha.fract() == 0.0 && (1.0..=64.0).contains(&alpha)).then_some(alpha as usize)
}

/// Upper bound on `sum_{i>=1} i^-alpha` for `alpha > 1`: the partial sum up to
/// `N` plus the tail majorant `int_N^inf x^-alpha dx = N^(1-alpha) / (alpha-1)`,
/// rounded upward.
fn power_sum_upper_bound(alpha: f64) -> (f64, String) {
    let n = SUMMABLE_PARTIAL_TERMS;
    let mut acc = Compensated::ZERO;
    for i in 1..=n {
        acc.add_f64(power_weight(alpha, i));
    }
    let partial = acc.value();
    let tail = (n as f64).powf(1.0 - alpha) / (alpha - 1.0);
    // Each weight carries at most one rounding; the compensated sum adds a
    // few more ulps. 1e-12 relative covers both.
    let bound = ((partial + tail) * (1.0 + 1e-12)).next_up();
    let evidence = format!(
        "partial sum to N = {n} is {partial:.17e}; tail <= N^(1-alpha)/(alpha-1) = {tail:.17e}"
    );
    (bound, evidence)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn point_values() {
        assert_eq!(WeightFamily::harmonic().weight_at(3), 1.0 / 3.0);
        assert_eq!(WeightFamily::power(0.5).unwrap().weight_at(4), 0.5);
        assert_eq!(WeightFamily::constant_tail(0.25).unwrap().weight_at(10), 0.25);
        assert_eq!(WeightFamily::constant_tail(0.25).unwrap().weight_at(2), 0.5);
    }

    #[test]
    fn prefix_sums_small() {
        let h = WeightFamily::harmonic();
        assert_eq!(h.prefix_sum(0).unwrap(), 0.0);
        assert!((h.prefix_sum(4).unwrap() - 25.0 / 12.0).abs() < 1e-15);
        let p = WeightFamily::power(0.5).unwrap();
        let expected = 1.0 + 2f64.powf(-0.5) + 3f64.powf(-0.5);
        assert!((p.prefix_sum(3).unwrap() - expected).abs() < 1e-15);
        assert!((p.prefix_sum(3).unwrap() - 2.284_457_05).abs() < 1e-8);
    }

    #[test]
    fn prefix_sum_across_blocks_matches_direct_sum() {
        let p = WeightFamily::power(0.7).unwrap();
        for n in [1023u64, 1024, 1025, 5000, 70_001] {
            let direct = crate::summation::sum((1..=n).map(|i| (i as f64).powf(-0.7)));
            let cached = p.prefix_sum(n).unwrap();
            assert!((cached - direct).abs() <= 1e-13 * direct, "n = {n}");
        }
    }

    #[test]
    fn prefix_sum_beyond_dense_range() {
        let p = WeightFamily::power(0.5).unwrap().with_dense_limit(4 * BLOCK);
        for n in [4 * BLOCK - 1, 4 * BLOCK, 4 * BLOCK + 1, 4 * BLOCK + COARSE_BLOCK + 17] {
            let direct = crate::summation::sum((1..=n).map(|i| 1.0 / (i as f64).sqrt()));
            let cached = p.prefix_sum(n).unwrap();
            assert!((cached - direct).abs() <= 1e-13 * direct, "n = {n}");
        }
        let c = WeightFamily::constant_tail(1.0).unwrap().with_dense_limit(BLOCK);
        assert_eq!(c.prefix_sum(3 * COARSE_BLOCK + 5).unwrap(), (3 * COARSE_BLOCK + 5) as f64);
    }

    #[test]
    fn cap_is_enforced() {
        let h = WeightFamily::harmonic().with_cap(100);
        assert!(h.prefix_sum(100).is_ok());
        assert!(matches!(h.prefix_sum(101), Err(Error::Resource(_))));
    }

    #[test]
    fn construction_rejects_invalid_parameters() {
        assert!(WeightFamily::power(0.0).is_err());
        assert!(WeightFamily::power(f64::NAN).is_err());
        assert!(WeightFamily::constant_tail(0.0).is_err());
        assert!(WeightFamily::constant_tail(1.5).is_err());
        assert!(WeightFamily::explicit(vec![q(1, 2)], TailRule::Constant, "x").is_err());
        assert!(WeightFamily::explicit(vec![q(1, 1), q(2, 1)], TailRule::Constant, "x").is_err());
        assert!(WeightFamily::explicit(vec![q(1, 1), q(0, 1)], TailRule::Constant, "x").is_err());
        assert!(WeightFamily::explicit(vec![], TailRule::Constant, "x").is_err());
    }

    #[test]
    fn classification_branches() {
        let c = WeightFamily::constant_tail(0.5).unwrap().classify();
        assert_eq!(c.branch, Branch::BoundedBelow);
        assert_eq!(c.constant, Some(2.0));

        assert_eq!(WeightFamily::harmonic().classify().branch, Branch::CZeroNotEllOne);
        assert_eq!(WeightFamily::power(0.5).unwrap().classify().branch, Branch::CZeroNotEllOne);
        assert_eq!(WeightFamily::power(1.0).unwrap().classify().branch, Branch::CZeroNotEllOne);

        let s = WeightFamily::power(2.0).unwrap().classify();
        assert_eq!(s.branch, Branch::Summable);
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        let bound = s.constant.unwrap();
        // Safe upper bound, and tight: the tail majorant overshoots by < 1/N^2.
        assert!(bound >= zeta2, "{bound}");
        assert!(bound - zeta2 < 1e-11, "{bound}");
    }

    #[test]
    fn explicit_families() {
        let vals = vec![q(1, 1), q(1, 2), q(1, 3)];
        let pat = WeightFamily::explicit(vals.clone(), TailRule::Pattern, "explicit:t").unwrap();
        assert_eq!(pat.weight_exact(6), Some(q(1, 6)));
        assert!((pat.weight_at(6) - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(pat.classify().branch, Branch::CZeroNotEllOne);

        let con = WeightFamily::explicit(vals, TailRule::Constant, "explicit:t").unwrap();
        assert_eq!(con.weight_exact(10), Some(q(1, 3)));
        let class = con.classify();
        assert_eq!(class.branch, Branch::BoundedBelow);
        assert_eq!(class.constant, Some(3.0));
    }

    #[test]
    fn exact_weights() {
        assert_eq!(WeightFamily::harmonic().weight_exact(7), Some(q(1, 7)));
        assert_eq!(WeightFamily::power(2.0).unwrap().weight_exact(3), Some(q(1, 9)));
        assert_eq!(WeightFamily::power(0.5).unwrap().weight_exact(3), None);
        assert_eq!(WeightFamily::constant_tail(0.25).unwrap().weight_exact(9), Some(q(1, 4)));
        assert!(!WeightFamily::power(0.5).unwrap().is_rational());
    }

    #[test]
    fn parse_specs() {
        assert_eq!(WeightFamily::parse("power:0.5").unwrap().kind(), &FamilyKind::Power { alpha: 0.5 });
        assert_eq!(WeightFamily::parse("power:1/2").unwrap().spec(), "power:0.5");
        assert_eq!(WeightFamily::parse("harmonic").unwrap().kind(), &FamilyKind::Harmonic);
        assert_eq!(
            WeightFamily::parse("ctail:0.25").unwrap().kind(),
            &FamilyKind::ConstantTail { floor: 0.25 }
        );
        for bad in ["", "power", "power:-1", "ctail:2", "harmonic:3", "gauss:1"] {
            assert!(WeightFamily::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn explicit_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("seqspace-w-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("w.json");
        std::fs::write(&path, r#"{"weights": ["1", "3/4", "0.5"], "tail": "pattern"}"#).unwrap();
        let spec = format!("explicit:{}", path.display());
        let fam = WeightFamily::parse(&spec).unwrap();
        assert_eq!(fam.spec(), spec);
        assert_eq!(fam.weight_exact(2), Some(q(3, 4)));
        assert_eq!(fam.weight_exact(4), Some(q(3, 8)));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn concurrent_readers_agree() {
        let fam = std::sync::Arc::new(WeightFamily::power(0.5).unwrap());
        let handles: Vec<_> = (0..4)
            .map(|t| {
                let fam = fam.clone();
                std::thread::spawn(move || {
                    (0..50u64)
                        .map(|k| fam.prefix_sum(1 + k * 3_001 + t).unwrap().to_bits())
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        let fresh = WeightFamily::power(0.5).unwrap();
        for (t, res) in results.iter().enumerate() {
            for (k, bits) in res.iter().enumerate() {
                let n = 1 + k as u64 * 3_001 + t as u64;
                assert_eq!(*bits, fresh.prefix_sum(n).unwrap().to_bits());
            }
        }
    }
}
