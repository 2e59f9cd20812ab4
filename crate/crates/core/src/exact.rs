//! Rational-mode evaluation of `W`, `A` and `B`.
//!
//! Only available when the weight family takes rational values and the
//! support stays below [`EXACT_SUPPORT_LIMIT`]; denominators of `W(n)` grow
//! like `lcm(1..n)` for harmonic-type weights.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::functionals::StepSequence;
use crate::weights::WeightFamily;

pub const EXACT_SUPPORT_LIMIT: u64 = 100_000;

/// `W(0), W(1), ..., W(len)` as exact rationals, extended on demand.
pub struct ExactPrefix<'a> {
    fam: &'a WeightFamily,
    sums: Vec<BigRational>,
}

impl<'a> ExactPrefix<'a> {
    pub fn new(fam: &'a WeightFamily) -> Result<Self> {
        if !fam.is_rational() {
            return Err(Error::InvalidInput(format!(
                "rational mode needs rational weights; {} is not",
                fam.spec()
            )));
        }
        Ok(ExactPrefix {
            fam,
            sums: vec![BigRational::zero()],
        })
    }

    pub fn get(&mut self, n: u64) -> Result<&BigRational> {
        if n > EXACT_SUPPORT_LIMIT {
            return Err(Error::Resource(format!(
                "rational mode supports indices up to {EXACT_SUPPORT_LIMIT}, requested {n}"
            )));
        }
        while (self.sums.len() as u64) <= n {
            let i = self.sums.len() as u64;
            let w = self.fam.weight_exact(i).expect("family checked rational");
            let next = self.sums.last().expect("non-empty") + w;
            self.sums.push(next);
        }
        Ok(&self.sums[n as usize])
    }

    pub fn window(&mut self, lo: u64, hi: u64) -> Result<BigRational> {
        let h = self.get(hi)?.clone();
        Ok(h - self.get(lo)?)
    }
}

fn check(f: &StepSequence<BigRational>) -> Result<u64> {
    let m = f.support_len();
    if m > EXACT_SUPPORT_LIMIT {
        return Err(Error::Resource(format!(
            "rational mode supports up to {EXACT_SUPPORT_LIMIT}, got {m}"
        )));
    }
    Ok(m)
}

pub fn functional_a_exact(f: &StepSequence<BigRational>, w: &mut ExactPrefix<'_>) -> Result<BigRational> {
    check(f)?;
    let mut total = BigRational::zero();
    let mut start = 0;
    for run in f.runs() {
        let end = start + run.len;
        total += &run.value * w.window(start, end)?;
        start = end;
    }
    Ok(total)
}

pub fn functional_b_at_exact(
    f: &StepSequence<BigRational>,
    w: &mut ExactPrefix<'_>,
    n: u64,
) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidInput("window length n must be at least 1".into()));
    }
    check(f)?;
    let mut total = BigRational::zero();
    let mut start = 0;
    for run in f.runs() {
        if start >= n {
            break;
        }
        let end = (start + run.len).min(n);
        total += &run.value * w.window(n - end, n - start)?;
        start += run.len;
    }
    Ok(total)
}

/// Exact `max_{n <= m} B(f, w, n)` and the smallest maximizer.
pub fn functional_b_exact(f: &StepSequence<BigRational>, w: &mut ExactPrefix<'_>) -> Result<(BigRational, u64)> {
    let m = check(f)?;
    let mut best = BigRational::zero();
    let mut best_n = 1;
    for n in 1..=m {
        let value = functional_b_at_exact(f, w, n)?;
        if value > best {
            best = value;
            best_n = n;
        }
    }
    Ok((best, best_n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::Run;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn harmonic_prefix_sums() {
        let h = WeightFamily::harmonic();
        let mut w = ExactPrefix::new(&h).unwrap();
        assert_eq!(w.get(0).unwrap(), &q(0, 1));
        assert_eq!(w.get(4).unwrap(), &q(25, 12));
        assert!(w.get(EXACT_SUPPORT_LIMIT + 1).is_err());
    }

    #[test]
    fn irrational_family_rejected() {
        assert!(ExactPrefix::new(&WeightFamily::power(0.5).unwrap()).is_err());
    }

    #[test]
    fn exact_functionals() {
        let h = WeightFamily::harmonic();
        let mut w = ExactPrefix::new(&h).unwrap();
        let f = StepSequence::new(vec![Run::new(2, q(1, 1))]).unwrap();
        assert_eq!(functional_a_exact(&f, &mut w).unwrap(), q(3, 2));
        assert_eq!(functional_b_at_exact(&f, &mut w, 3).unwrap(), q(5, 6));
        assert_eq!(functional_b_exact(&f, &mut w).unwrap(), (q(3, 2), 2));
    }
}
