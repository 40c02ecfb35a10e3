//! Exact arithmetic in the Gaussian integers `Z[i]`.

mod factor;
mod parse;

pub use factor::{
    classify_prime, expand_base_1pi, factor_primary, is_gaussian_prime, primary_primes_up_to_norm,
    PrimaryFactorization, PrimeClass, PrimeKind,
};

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{GaussScalar, RealScalar};

/// An element `re + im·i` of `Z[i]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Gaussian<T> {
    pub re: T,
    pub im: T,
}

impl<T: GaussScalar> Gaussian<T> {
    pub fn new(re: T, im: T) -> Self {
        Self { re, im }
    }

    pub fn from_i64(re: i64, im: i64) -> Self {
        Self::new(
            T::from_i64(re).expect("coordinate fits the scalar"),
            T::from_i64(im).expect("coordinate fits the scalar"),
        )
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::new(T::one(), T::zero())
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one())
    }

    /// The even prime `1 + i`.
    pub fn one_plus_i() -> Self {
        Self::new(T::one(), T::one())
    }

    /// `i^k` for any integer `k`.
    pub fn unit(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::from_i64(1, 0),
            1 => Self::from_i64(0, 1),
            2 => Self::from_i64(-1, 0),
            _ => Self::from_i64(0, -1),
        }
    }

    pub fn from_rational(n: T) -> Self {
        Self::new(n, T::zero())
    }

    pub fn norm(&self) -> T {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// `Some(k)` when `self = i^k`.
    pub fn unit_exponent(&self) -> Option<u8> {
        let (r, m) = (&self.re, &self.im);
        if m.is_zero() {
            if r.is_one() {
                return Some(0);
            }
            if (-r.clone()).is_one() {
                return Some(2);
            }
        } else if r.is_zero() {
            if m.is_one() {
                return Some(1);
            }
            if (-m.clone()).is_one() {
                return Some(3);
            }
        }
        None
    }

    pub fn is_unit(&self) -> bool {
        self.unit_exponent().is_some()
    }

    /// Not divisible by `1 + i`.
    pub fn is_odd(&self) -> bool {
        (self.re.clone() + self.im.clone()).is_odd()
    }

    /// `self · i^k`.
    pub fn mul_unit(&self, k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => self.clone(),
            1 => Self::new(-self.im.clone(), self.re.clone()),
            2 => Self::new(-self.re.clone(), -self.im.clone()),
            _ => Self::new(self.im.clone(), -self.re.clone()),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// The exact quotient, if `other` divides `self`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        let n = other.norm();
        let num = self * &other.conj();
        if num.re.is_multiple_of(&n) && num.im.is_multiple_of(&n) {
            Some(Self::new(num.re / n.clone(), num.im / n))
        } else {
            None
        }
    }

    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_exact(self).is_some()
    }

    /// Division with remainder: `self = q·m + r` with `N(r) < N(m)`. The
    /// quotient rounds each coordinate of the exact quotient to the nearest
    /// integer, ties toward −∞.
    pub fn div_rem(&self, m: &Self) -> (Self, Self) {
        assert!(!m.is_zero(), "division by zero");
        let n = m.norm();
        let num = self * &m.conj();
        let two = T::one() + T::one();
        let round = |a: T| -> T {
            // ceil((2a - n) / 2n) = -floor((n - 2a) / 2n)
            -((n.clone() - two.clone() * a).div_floor(&(two.clone() * n.clone())))
        };
        let q = Self::new(round(num.re), round(num.im));
        let r = self - &(&q * m);
        (q, r)
    }

    pub fn rem(&self, m: &Self) -> Self {
        self.div_rem(m).1
    }

    /// `self ≡ other (mod m)`.
    pub fn congruent(&self, other: &Self, m: &Self) -> bool {
        m.divides(&(self - other))
    }

    /// `self^e mod m` by square-and-multiply; `e >= 0`.
    pub fn pow_mod(&self, e: &T, m: &Self) -> Self {
        let two = T::one() + T::one();
        let mut e = e.clone();
        let mut base = self.rem(m);
        let mut acc = Self::one().rem(m);
        while !e.is_zero() {
            if e.is_odd() {
                acc = (&acc * &base).rem(m);
            }
            base = (&base * &base).rem(m);
            e = e / two.clone();
        }
        acc
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    /// `(g, s, t)` with `s·self + t·other = g = gcd(self, other)`.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        (r0, s0, t0)
    }

    pub fn is_coprime(&self, other: &Self) -> bool {
        self.gcd(other).is_unit()
    }

    /// Inverse of `self` modulo `m`, if they are coprime.
    pub fn inverse_mod(&self, m: &Self) -> Option<Self> {
        let (g, s, _) = self.ext_gcd(m);
        let k = g.unit_exponent()?;
        // s·self ≡ g = i^k, so self^{-1} ≡ s·i^{-k}
        Some(s.mul_unit(-(k as i64)).rem(m))
    }

    /// `(re mod 4, im mod 4)` with representatives in `0..4`.
    pub fn residue_mod4(&self) -> (u8, u8) {
        let four = T::from_u8(4).unwrap();
        let r = self.re.mod_floor(&four).to_u8().unwrap();
        let m = self.im.mod_floor(&four).to_u8().unwrap();
        (r, m)
    }

    /// Odd and `≡ 1 (mod 2(1+i))`, i.e. `(re, im) ≡ (1, 0)` or `(3, 2) (mod 4)`.
    pub fn is_primary(&self) -> bool {
        matches!(self.residue_mod4(), (1, 0) | (3, 2))
    }

    /// `≡ 3 + 2i (mod 4)`.
    pub fn is_three_plus_two_i_mod4(&self) -> bool {
        self.residue_mod4() == (3, 2)
    }

    /// The unique `k` such that `i^k · self` is primary, with that associate.
    pub fn primary_associate(&self) -> Result<(u8, Self)> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        if !self.is_odd() {
            return Err(Error::EvenInput(self.to_string()));
        }
        Ok((0u8..4)
            .map(|k| (k, self.mul_unit(k as i64)))
            .find(|(_, a)| a.is_primary())
            .expect("every odd element has a primary associate"))
    }

    /// The associate with `re > 0, im >= 0`.
    pub fn first_quadrant_associate(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        (0..4)
            .map(|k| self.mul_unit(k))
            .find(|a| a.re.is_positive() && !a.im.is_negative())
            .expect("a nonzero element has a first-quadrant associate")
    }

    /// Associates have the same first-quadrant representative.
    pub fn is_associate(&self, other: &Self) -> bool {
        self.first_quadrant_associate() == other.first_quadrant_associate()
    }

    pub fn to_big(&self) -> Gaussian<BigInt> {
        Gaussian::new(self.re.to_bigint(), self.im.to_bigint())
    }

    pub fn from_big(g: &Gaussian<BigInt>) -> Option<Self> {
        Some(Self::new(T::from_bigint(&g.re)?, T::from_bigint(&g.im)?))
    }

    pub fn to_complex<F: RealScalar>(&self) -> Complex<F> {
        let cv = |v: &T| -> F {
            match v.to_i64() {
                Some(x) => F::from_i64(x),
                None => F::from_f64(v.to_f64().expect("finite")),
            }
        };
        Complex::new(cv(&self.re), cv(&self.im))
    }

    /// Compares by argument in `[0, 2π)`, counterclockwise from the positive
    /// real axis. Zero sorts first.
    pub fn cmp_arg(&self, other: &Self) -> Ordering {
        fn half<T: GaussScalar>(g: &Gaussian<T>) -> u8 {
            if g.is_zero() {
                0
            } else if g.im.is_positive() || (g.im.is_zero() && g.re.is_positive()) {
                1
            } else {
                2
            }
        }
        let (ha, hb) = (half(self), half(other));
        if ha != hb || ha == 0 {
            return ha.cmp(&hb);
        }
        // same half plane: sign of the cross product decides
        let cross = self.re.clone() * other.im.clone() - self.im.clone() * other.re.clone();
        if cross.is_positive() {
            Ordering::Less
        } else if cross.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    }
}

impl<T: GaussScalar> Ord for Gaussian<T> {
    /// Canonical order: by norm, then real part, then imaginary part.
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm()
            .cmp(&other.norm())
            .then_with(|| self.re.cmp(&other.re))
            .then_with(|| self.im.cmp(&other.im))
    }
}

impl<T: GaussScalar> PartialOrd for Gaussian<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: GaussScalar> fmt::Display for Gaussian<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl<T: GaussScalar> Add for &Gaussian<T> {
    type Output = Gaussian<T>;

    fn add(self, rhs: Self) -> Gaussian<T> {
        Gaussian::new(self.re.clone() + rhs.re.clone(), self.im.clone() + rhs.im.clone())
    }
}

impl<T: GaussScalar> Sub for &Gaussian<T> {
    type Output = Gaussian<T>;

    fn sub(self, rhs: Self) -> Gaussian<T> {
        Gaussian::new(self.re.clone() - rhs.re.clone(), self.im.clone() - rhs.im.clone())
    }
}

impl<T: GaussScalar> Mul for &Gaussian<T> {
    type Output = Gaussian<T>;

    fn mul(self, rhs: Self) -> Gaussian<T> {
        Gaussian::new(
            self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone(),
            self.re.clone() * rhs.im.clone() + self.im.clone() * rhs.re.clone(),
        )
    }
}

impl<T: GaussScalar> Neg for &Gaussian<T> {
    type Output = Gaussian<T>;

    fn neg(self) -> Gaussian<T> {
        Gaussian::new(-self.re.clone(), -self.im.clone())
    }
}

impl<T: GaussScalar> Add for Gaussian<T> {
    type Output = Gaussian<T>;

    fn add(self, rhs: Self) -> Gaussian<T> {
        &self + &rhs
    }
}

impl<T: GaussScalar> Sub for Gaussian<T> {
    type Output = Gaussian<T>;

    fn sub(self, rhs: Self) -> Gaussian<T> {
        &self - &rhs
    }
}

impl<T: GaussScalar> Mul for Gaussian<T> {
    type Output = Gaussian<T>;

    fn mul(self, rhs: Self) -> Gaussian<T> {
        &self * &rhs
    }
}

impl<T: GaussScalar> Neg for Gaussian<T> {
    type Output = Gaussian<T>;

    fn neg(self) -> Gaussian<T> {
        -&self
    }
}

impl<T: GaussScalar> std::iter::Product for Gaussian<T> {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |a, b| &a * &b)
    }
}

impl<T: GaussScalar> serde::Serialize for Gaussian<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de, T: GaussScalar> serde::Deserialize<'de> for Gaussian<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde helper writing a scalar as a decimal string.
pub(crate) mod scalar_str {
    use num_bigint::BigInt;
    use serde::Deserialize;

    use crate::scalar::GaussScalar;

    pub fn serialize<T: GaussScalar, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T: GaussScalar, D: serde::Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        let s = String::deserialize(d)?;
        let big: BigInt = s.parse().map_err(serde::de::Error::custom)?;
        T::from_bigint(&big).ok_or_else(|| serde::de::Error::custom("value out of range"))
    }
}
