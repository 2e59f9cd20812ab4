//! Compensated summation.
//!
//! [`Compensated`] keeps a running sum as an unevaluated pair `hi + lo`
//! (double-double). Adding positive terms this way keeps the relative error
//! of long prefix sums near one ulp regardless of length, and differences of
//! two accumulators can be taken without the cancellation a plain `f64`
//! subtraction would suffer.

use std::ops::{Add, AddAssign, Sub};

/// Error-free transformation: `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Compensated {
    hi: f64,
    lo: f64,
}

impl Compensated {
    pub const ZERO: Compensated = Compensated { hi: 0.0, lo: 0.0 };

    pub fn new(value: f64) -> Self {
        Compensated { hi: value, lo: 0.0 }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add_f64(&mut self, x: f64) {
        let (s, e) = two_sum(self.hi, x);
        let lo = self.lo + e;
        let (hi, lo) = two_sum(s, lo);
        self.hi = hi;
        self.lo = lo;
    }

    /// `self - other` rounded once to `f64`.
    #[inline]
    pub fn diff(&self, other: &Compensated) -> f64 {
        let (s, e) = two_sum(self.hi, -other.hi);
        (e + (self.lo - other.lo)) + s
    }
}

impl AddAssign<f64> for Compensated {
    fn add_assign(&mut self, rhs: f64) {
        self.add_f64(rhs);
    }
}

impl Add<f64> for Compensated {
    type Output = Compensated;

    fn add(mut self, rhs: f64) -> Compensated {
        self.add_f64(rhs);
        self
    }
}

impl Add for Compensated {
    type Output = Compensated;

    fn add(self, rhs: Compensated) -> Compensated {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (hi, lo) = two_sum(s, e + self.lo + rhs.lo);
        Compensated { hi, lo }
    }
}

impl Sub for Compensated {
    type Output = f64;

    fn sub(self, rhs: Compensated) -> f64 {
        self.diff(&rhs)
    }
}

impl std::iter::Sum<f64> for Compensated {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Compensated::ZERO;
        for x in iter {
            acc.add_f64(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of `f64`.
pub fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().sum::<Compensated>().value()
}
