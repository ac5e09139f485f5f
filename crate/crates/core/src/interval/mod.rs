//! Interval arithmetic with outward-rounded endpoints.
//!
//! Rounding policy: every endpoint is the exactly directed-rounded result of the
//! corresponding real operation (see [`round`]); the exponential is the one
//! exception and is widened by two ulps per side around the platform `exp`.

mod decimal;
pub mod hexfloat;
mod linalg;
pub mod round;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use linalg::{IntervalMatrix, IntervalVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("division by an interval containing zero: {0}")]
    DivisionByZero(Interval),
    #[error("result is unbounded")]
    Unbounded,
    #[error("invalid endpoints [{0}, {1}]")]
    InvalidEndpoints(f64, f64),
    #[error("square root of an interval with negative part: {0}")]
    NegativeSqrt(Interval),
    #[error("cannot parse `{0}` as a number")]
    Parse(String),
}

/// Closed interval `[lo, hi]` of binary64 numbers.
///
/// Arithmetic through the operator traits may produce infinite endpoints when
/// it overflows; such a value is still a valid enclosure but
/// [`Interval::is_bounded`] reports it and [`arith`] turns it into an error.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

/// The four basic arithmetic operations, for [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Rigorous `x op y`, failing on division by an interval containing zero or on
/// overflow.
pub fn arith(op: ArithOp, x: Interval, y: Interval) -> Result<Interval, IntervalError> {
    let out = match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        ArithOp::Mul => x * y,
        ArithOp::Div => x.div(y)?,
    };
    out.bounded()
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(IntervalError::InvalidEndpoints(lo, hi));
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        debug_assert!(x.is_finite());
        Self { lo: x, hi: x }
    }

    /// `[c - r, c + r]` rounded outward.
    pub fn ball(center: f64, radius: f64) -> Self {
        Self {
            lo: round::sub_down(center, radius),
            hi: round::add_up(center, radius),
        }
    }

    /// Tightest enclosure of a decimal literal such as `"3.2"` or `"-1e-3"`.
    pub fn from_decimal(text: &str) -> Result<Self, IntervalError> {
        decimal::enclose(text)
    }

    /// Enclosure of the rational `num / den`.
    pub fn from_ratio(num: i64, den: i64) -> Result<Self, IntervalError> {
        let n = Self::from_integer(num);
        let d = Self::from_integer(den);
        n.div(d)
    }

    fn from_integer(v: i64) -> Self {
        let x = v as f64;
        // i64 -> f64 rounds to nearest; bracket unless exact.
        if x as i128 == v as i128 {
            Self::point(x)
        } else {
            Self {
                lo: x.next_down(),
                hi: x.next_up(),
            }
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn bounded(self) -> Result<Self, IntervalError> {
        if self.is_bounded() {
            Ok(self)
        } else {
            Err(IntervalError::Unbounded)
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Midpoint, rounded to nearest.
    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Upper bound on the width.
    pub fn width(&self) -> f64 {
        round::sub_up(self.hi, self.lo)
    }

    /// Upper bound on `max |x|` over the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Lower bound on `min |x|` over the interval.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Strict upper bound check: every element is `< x`.
    pub fn certainly_lt(&self, x: f64) -> bool {
        self.hi < x
    }

    /// Every element is `<= x`.
    pub fn certainly_le(&self, x: f64) -> bool {
        self.hi <= x
    }

    /// Every element is `> x`.
    pub fn certainly_gt(&self, x: f64) -> bool {
        self.lo > x
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            -*self
        } else {
            Interval {
                lo: 0.0,
                hi: self.mag(),
            }
        }
    }

    /// `x²`, tighter than `x * x` when the interval straddles zero.
    pub fn sqr(&self) -> Interval {
        let a = self.abs();
        Interval {
            lo: round::mul_down(a.lo, a.lo),
            hi: round::mul_up(a.hi, a.hi),
        }
    }

    /// Integer power by repeated squaring on the absolute value.
    pub fn powi(&self, n: u32) -> Interval {
        if n == 0 {
            return Interval::ONE;
        }
        if n.is_multiple_of(2) {
            let a = self.abs();
            let mut lo = 1.0;
            let mut hi = 1.0;
            for _ in 0..n {
                lo = round::mul_down(lo, a.lo);
                hi = round::mul_up(hi, a.hi);
            }
            Interval { lo, hi }
        } else {
            // Odd powers are monotone.
            Interval {
                lo: pow_bounds(self.lo, n).0,
                hi: pow_bounds(self.hi, n).1,
            }
        }
    }

    pub fn div(self, rhs: Interval) -> Result<Interval, IntervalError> {
        if rhs.contains_zero() {
            return Err(IntervalError::DivisionByZero(rhs));
        }
        let (a, b) = (self, rhs);
        let lo = [
            round::div_down(a.lo, b.lo),
            round::div_down(a.lo, b.hi),
            round::div_down(a.hi, b.lo),
            round::div_down(a.hi, b.hi),
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
        let hi = [
            round::div_up(a.lo, b.lo),
            round::div_up(a.lo, b.hi),
            round::div_up(a.hi, b.lo),
            round::div_up(a.hi, b.hi),
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
        Ok(Interval { lo, hi })
    }

    pub fn recip(self) -> Result<Interval, IntervalError> {
        Interval::ONE.div(self)
    }

    pub fn sqrt(self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::NegativeSqrt(self));
        }
        Ok(Interval {
            lo: round::sqrt_down(self.lo),
            hi: round::sqrt_up(self.hi),
        })
    }

    /// Enclosure of `e^x`, by monotonicity. The platform `exp` is assumed
    /// faithful (error below one ulp); each endpoint is widened by two ulps.
    pub fn exp(self) -> Result<Interval, IntervalError> {
        if !self.is_bounded() {
            return Err(IntervalError::Unbounded);
        }
        let lo = if self.lo == 0.0 {
            1.0
        } else {
            round::ulps_down(self.lo.exp(), 2).max(0.0)
        };
        let hi = if self.hi == 0.0 {
            1.0
        } else {
            round::ulps_up(self.hi.exp(), 2)
        };
        if !hi.is_finite() {
            return Err(IntervalError::Unbounded);
        }
        Ok(Interval { lo, hi })
    }

    /// Enclosure of `ln x` for `x > 0`, with the same two-ulp widening as [`Interval::exp`].
    pub fn ln(self) -> Result<Interval, IntervalError> {
        if self.lo <= 0.0 {
            return Err(IntervalError::InvalidEndpoints(self.lo, self.hi));
        }
        if !self.is_bounded() {
            return Err(IntervalError::Unbounded);
        }
        let lo = if self.lo == 1.0 {
            0.0
        } else {
            round::ulps_down(self.lo.ln(), 2)
        };
        let hi = if self.hi == 1.0 {
            0.0
        } else {
            round::ulps_up(self.hi.ln(), 2)
        };
        Ok(Interval { lo, hi })
    }

    /// Multiplies by a float that is taken as exact.
    pub fn scale(self, s: f64) -> Interval {
        self * Interval::point(s)
    }

    /// Sound lower and upper bounds on `max(self, other)`.
    pub fn max(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn min(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.min(other.hi),
        }
    }
}

fn pow_bounds(x: f64, n: u32) -> (f64, f64) {
    let mut lo = x;
    let mut hi = x;
    for _ in 1..n {
        let a = Interval { lo, hi } * Interval::point(x);
        lo = a.lo;
        hi = a.hi;
    }
    (lo, hi)
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: round::add_down(self.lo, rhs.lo),
            hi: round::add_up(self.hi, rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: round::sub_down(self.lo, rhs.hi),
            hi: round::sub_up(self.hi, rhs.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let (a, b) = (self, rhs);
        if a.is_point() && a.lo == 0.0 || b.is_point() && b.lo == 0.0 {
            return Interval::ZERO;
        }
        if a.lo >= 0.0 && b.lo >= 0.0 {
            return Interval {
                lo: round::mul_down(a.lo, b.lo),
                hi: round::mul_up(a.hi, b.hi),
            };
        }
        let lo = [
            round::mul_down(a.lo, b.lo),
            round::mul_down(a.lo, b.hi),
            round::mul_down(a.hi, b.lo),
            round::mul_down(a.hi, b.hi),
        ]
        .into_iter()
        .fold(f64::INFINITY, nan_safe_min);
        let hi = [
            round::mul_up(a.lo, b.lo),
            round::mul_up(a.lo, b.hi),
            round::mul_up(a.hi, b.lo),
            round::mul_up(a.hi, b.hi),
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, nan_safe_max);
        Interval { lo, hi }
    }
}

// 0 * inf shows up only for already-unbounded operands; treat it as unbounded.
fn nan_safe_min(acc: f64, x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        acc.min(x)
    }
}

fn nan_safe_max(acc: f64, x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        acc.max(x)
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [hexfloat::format(self.lo), hexfloat::format(self.hi)].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [lo, hi] = <[String; 2]>::deserialize(deserializer)?;
        let lo = hexfloat::parse(&lo).map_err(serde::de::Error::custom)?;
        let hi = hexfloat::parse(&hi).map_err(serde::de::Error::custom)?;
        Interval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}

/// Upper bound that may be infinite, used for the a priori radius `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Unbounded,
}

impl Bound {
    pub fn admits(&self, r: f64) -> bool {
        match self {
            Bound::Finite(b) => r <= *b,
            Bound::Unbounded => true,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Bound::Finite(b) => *b,
            Bound::Unbounded => f64::INFINITY,
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(b) => serializer.serialize_str(&hexfloat::format(*b)),
            Bound::Unbounded => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s == "inf" {
            return Ok(Bound::Unbounded);
        }
        hexfloat::parse(&s)
            .map(Bound::Finite)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn basic_examples() {
        assert_eq!(
            arith(ArithOp::Add, iv(1.0, 2.0), iv(3.0, 4.0)).unwrap(),
            iv(4.0, 6.0)
        );
        assert_eq!(
            arith(ArithOp::Mul, iv(1.0, 2.0), iv(-1.0, 1.0)).unwrap(),
            iv(-2.0, 2.0)
        );
        let third = arith(ArithOp::Div, iv(1.0, 1.0), iv(3.0, 3.0)).unwrap();
        assert!(third.contains(0.333_333_333_333_333_314_829_616_256_247));
        assert!(third.hi() <= third.lo().next_up().next_up());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let err = arith(ArithOp::Div, iv(1.0, 1.0), iv(-1.0, 1.0)).unwrap_err();
        assert!(matches!(err, IntervalError::DivisionByZero(_)));
    }

    #[test]
    fn overflow_is_reported() {
        let big = iv(f64::MAX, f64::MAX);
        assert_eq!(arith(ArithOp::Add, big, big), Err(IntervalError::Unbounded));
        assert_eq!(iv(1000.0, 1000.0).exp(), Err(IntervalError::Unbounded));
    }

    #[test]
    fn exp_of_zero_is_tight() {
        let e = Interval::ZERO.exp().unwrap();
        assert_eq!(e, Interval::ONE);
        let e1 = iv(-1.0, 1.0).exp().unwrap();
        assert!(e1.lo() > 0.0 && e1.contains(std::f64::consts::E));
    }

    #[test]
    fn invalid_endpoints_rejected() {
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn powers() {
        let x = iv(-2.0, 1.0);
        assert_eq!(x.powi(2), iv(0.0, 4.0));
        assert_eq!(x.powi(3), iv(-8.0, 1.0));
        assert_eq!(x.sqr(), iv(0.0, 4.0));
        assert_eq!(x.powi(0), Interval::ONE);
    }

    #[test]
    fn ratio_enclosure() {
        let mu = Interval::from_ratio(32, 10).unwrap();
        assert!(mu.contains(3.2));
        assert_eq!(mu.hi(), mu.lo().next_up());
    }

    #[test]
    fn serde_round_trip() {
        let x = Interval::from_decimal("3.14").unwrap();
        let s = serde_json::to_string(&x).unwrap();
        let y: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
        assert_eq!(
            serde_json::to_string(&Interval::point(1.1)).unwrap(),
            r#"["0x1.199999999999ap+0","0x1.199999999999ap+0"]"#
        );
    }
}
