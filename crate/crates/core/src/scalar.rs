//! Scalar abstractions.
//!
//! Exact arithmetic in `Z[i]` is generic over an integer scalar
//! ([`GaussScalar`]): `i64`, `i128` for fast fixed-width work and
//! [`BigInt`] for arbitrary precision. Numerical evaluation (Gauss sums,
//! root numbers) is generic over a float scalar ([`RealScalar`]): `f64`
//! or the double-double [`TwoFloat`].

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Float, FloatConst, FromPrimitive, Signed, ToPrimitive};
use twofloat::TwoFloat;

/// Integer type usable as the coordinate ring of a Gaussian integer.
pub trait GaussScalar:
    Integer + Signed + Clone + Hash + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn to_bigint(&self) -> BigInt;

    /// `None` when the value does not fit.
    fn from_bigint(v: &BigInt) -> Option<Self>;
}

impl GaussScalar for i64 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }

    fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
}

impl GaussScalar for i128 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }

    fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
}

impl GaussScalar for BigInt {
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }

    fn from_bigint(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
}

/// Real type used for numeric root numbers and Gauss sums.
pub trait RealScalar: Float + FloatConst + Debug + Display + Send + Sync + 'static {
    /// Approximate number of significant decimal digits carried.
    const DIGITS: u32;

    fn from_f64(x: f64) -> Self;

    fn from_i64(x: i64) -> Self;

    fn to_f64(self) -> f64;

    /// `self / rhs` to full working precision.
    fn quot(self, rhs: Self) -> Self {
        self / rhs
    }

    /// Relative size below which series terms are dropped.
    fn series_cutoff() -> Self {
        Self::from_f64(10f64.powi(-(Self::DIGITS as i32 + 3)))
    }
}

impl RealScalar for f64 {
    const DIGITS: u32 = 15;

    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_i64(x: i64) -> Self {
        x as f64
    }

    fn to_f64(self) -> f64 {
        self
    }
}

impl RealScalar for TwoFloat {
    const DIGITS: u32 = 31;

    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }

    fn from_i64(x: i64) -> Self {
        // exact: split into two halves that are each representable
        let hi = (x >> 26) << 26;
        TwoFloat::from(hi as f64) + TwoFloat::from((x - hi) as f64)
    }

    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }

    fn quot(self, rhs: Self) -> Self {
        // the crate's double-double division drops the low word of the
        // residual; one correction step restores it
        let q = self / rhs;
        let r = self - q * rhs;
        q + r / rhs.hi()
    }
}
