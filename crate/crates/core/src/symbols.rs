//! Quartic residue symbols over `Z[i]` and the rational Jacobi symbol.

use std::fmt;
use std::ops::{Mul, MulAssign};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::arith::FactorConfig;
use crate::error::{Error, Result};
use crate::gaussint::{factor_primary, Gaussian};
use crate::scalar::{GaussScalar, RealScalar};

/// The fourth root of unity `i^k`, stored as `k mod 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mu4(u8);

impl Mu4 {
    pub const ONE: Mu4 = Mu4(0);
    pub const I: Mu4 = Mu4(1);
    pub const MINUS_ONE: Mu4 = Mu4(2);
    pub const MINUS_I: Mu4 = Mu4(3);
    pub const ALL: [Mu4; 4] = [Mu4(0), Mu4(1), Mu4(2), Mu4(3)];

    pub fn new(k: i64) -> Self {
        Mu4(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Self {
        Mu4::new(-(self.0 as i64))
    }

    pub fn pow(self, n: i64) -> Self {
        Mu4::new(self.0 as i64 * n.rem_euclid(4))
    }

    /// Multiplicative order: 1, 2 or 4.
    pub fn order(self) -> u8 {
        match self.0 {
            0 => 1,
            2 => 2,
            _ => 4,
        }
    }

    /// `±1` for real values.
    pub fn as_sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn to_gaussian<T: GaussScalar>(self) -> Gaussian<T> {
        Gaussian::unit(self.0 as i64)
    }

    pub fn to_complex<F: RealScalar>(self) -> Complex<F> {
        let (o, z) = (F::one(), F::zero());
        match self.0 {
            0 => Complex::new(o, z),
            1 => Complex::new(z, o),
            2 => Complex::new(-o, z),
            _ => Complex::new(z, -o),
        }
    }
}

impl Mul for Mu4 {
    type Output = Mu4;

    fn mul(self, rhs: Mu4) -> Mu4 {
        Mu4((self.0 + rhs.0) % 4)
    }
}

impl MulAssign for Mu4 {
    fn mul_assign(&mut self, rhs: Mu4) {
        *self = *self * rhs;
    }
}

impl std::iter::Product for Mu4 {
    fn product<I: Iterator<Item = Mu4>>(iter: I) -> Mu4 {
        iter.fold(Mu4::ONE, |a, b| a * b)
    }
}

impl fmt::Display for Mu4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["1", "i", "-1", "-i"][self.0 as usize])
    }
}

fn check_modulus<T: GaussScalar>(m: &Gaussian<T>) -> Result<()> {
    if m.is_zero() {
        return Err(Error::ZeroInput);
    }
    if !m.is_odd() {
        return Err(Error::EvenModulus(m.to_string()));
    }
    Ok(())
}

fn not_coprime<T: GaussScalar>(alpha: &Gaussian<T>, m: &Gaussian<T>) -> Error {
    Error::NotCoprime { alpha: alpha.to_string(), modulus: m.to_string() }
}

/// `(α/π)₄`: the unit `i^k ≡ α^{(Nπ−1)/4} (mod π)`, by exponentiation.
pub fn quartic_symbol<T: GaussScalar>(alpha: &Gaussian<T>, pi: &Gaussian<T>) -> Result<Mu4> {
    check_modulus(pi)?;
    if pi.is_unit() {
        return Err(Error::NotPrime(pi.to_string()));
    }
    let a = alpha.rem(pi);
    if a.is_zero() {
        return Err(not_coprime(alpha, pi));
    }
    let four = T::from_u8(4).unwrap();
    let n1 = pi.norm() - T::one();
    if !(n1.clone() % four.clone()).is_zero() {
        return Err(Error::NotPrime(pi.to_string()));
    }
    let r = a.pow_mod(&(n1 / four), pi);
    Mu4::ALL
        .into_iter()
        .find(|k| r.congruent(&k.to_gaussian(), pi))
        .ok_or_else(|| Error::NotPrime(pi.to_string()))
}

/// Multiplicative extension in the denominator over the prime factors of `β`.
pub fn quartic_symbol_composite<T: GaussScalar>(alpha: &Gaussian<T>, beta: &Gaussian<T>) -> Result<Mu4> {
    check_modulus(beta)?;
    let f = factor_primary(beta, &FactorConfig::default())?;
    let mut acc = Mu4::ONE;
    for (pi, e) in &f.odd {
        acc *= quartic_symbol(alpha, pi).map_err(|e| match e {
            Error::NotCoprime { .. } => not_coprime(alpha, beta),
            other => other,
        })?
        .pow(*e as i64);
    }
    Ok(acc)
}

/// `(i/β)₄ = i^{(1−a)/2}` for primary `β = a + bi`.
pub fn supplement_i<T: GaussScalar>(beta: &Gaussian<T>) -> Mu4 {
    debug_assert!(beta.is_primary());
    let two = T::one() + T::one();
    let e = (T::one() - beta.re.clone()) / two;
    Mu4::new(mod4(&e))
}

/// `((1+i)/β)₄ = i^{(a−1−b−b²)/4}` for primary `β = a + bi`.
pub fn supplement_one_plus_i<T: GaussScalar>(beta: &Gaussian<T>) -> Mu4 {
    debug_assert!(beta.is_primary());
    let (a, b) = (&beta.re, &beta.im);
    let num = a.clone() - T::one() - b.clone() - b.clone() * b.clone();
    let e = num / T::from_u8(4).unwrap();
    Mu4::new(mod4(&e))
}

fn mod4<T: GaussScalar>(v: &T) -> i64 {
    let four = T::from_u8(4).unwrap();
    let r = v.clone() % four.clone();
    let r = if r.is_negative() { r + four } else { r };
    r.to_i64().unwrap()
}

/// `(α/β)₄` for odd `β` by a Euclidean chain: reduce, strip units and
/// powers of `1+i` with the supplementary laws, then swap with reciprocity.
/// Falls back to [`quartic_symbol_composite`] if a reciprocity step would be
/// applied outside its hypotheses.
pub fn quartic_symbol_fast<T: GaussScalar>(alpha: &Gaussian<T>, beta: &Gaussian<T>) -> Result<Mu4> {
    if alpha.is_zero() {
        return Err(Error::ZeroInput);
    }
    check_modulus(beta)?;
    match euclid_chain(alpha, beta) {
        Err(Error::ReciprocityPreconditionViolated(_)) => quartic_symbol_composite(alpha, beta),
        r => r,
    }
}

fn euclid_chain<T: GaussScalar>(alpha: &Gaussian<T>, beta: &Gaussian<T>) -> Result<Mu4> {
    let opi = Gaussian::<T>::one_plus_i();
    let (_, mut b) = beta.primary_associate()?;
    let mut a = alpha.clone();
    let mut acc = Mu4::ONE;
    loop {
        if b.is_one() {
            return Ok(acc);
        }
        a = a.rem(&b);
        if a.is_zero() {
            return Err(not_coprime(alpha, beta));
        }
        let mut t = 0i64;
        while !a.is_odd() {
            a = a.div_exact(&opi).expect("even element");
            t += 1;
        }
        // a = i^{-k}·a'
        let (k, ap) = a.primary_associate()?;
        acc *= supplement_i(&b).pow(-(k as i64)) * supplement_one_plus_i(&b).pow(t);
        if ap.is_one() {
            return Ok(acc);
        }
        if !b.is_primary() || !ap.is_primary() || ap.is_unit() {
            return Err(Error::ReciprocityPreconditionViolated(format!("({ap}/{b})")));
        }
        if ap.is_three_plus_two_i_mod4() && b.is_three_plus_two_i_mod4() {
            acc *= Mu4::MINUS_ONE;
        }
        a = std::mem::replace(&mut b, ap);
    }
}

/// Jacobi symbol `(a/n)` for odd `n >= 1`.
pub fn jacobi_symbol<T: GaussScalar>(a: &T, n: &T) -> Result<i8> {
    let two = T::one() + T::one();
    if !n.is_positive() {
        return Err(Error::InvalidArgument(format!("Jacobi modulus {n} must be positive")));
    }
    if n.is_even() {
        return Err(Error::EvenModulus(n.to_string()));
    }
    let eight = T::from_u8(8).unwrap();
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut s = 1i8;
    while !a.is_zero() {
        while a.is_even() {
            a = a / two.clone();
            let r = n.mod_floor(&eight).to_u8().unwrap();
            if r == 3 || r == 5 {
                s = -s;
            }
        }
        std::mem::swap(&mut a, &mut n);
        let four = T::from_u8(4).unwrap();
        if a.mod_floor(&four) == T::from_u8(3).unwrap() && n.mod_floor(&four) == T::from_u8(3).unwrap() {
            s = -s;
        }
        a = a.mod_floor(&n);
    }
    Ok(if n.is_one() { s } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::gaussint::primary_primes_up_to_norm;
    use crate::{GaussInt, GaussInt64};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn g(re: i64, im: i64) -> GaussInt {
        GaussInt::from_i64(re, im)
    }

    #[test]
    fn mu4_group() {
        assert_eq!(Mu4::I * Mu4::I, Mu4::MINUS_ONE);
        assert_eq!(Mu4::I.conj(), Mu4::MINUS_I);
        assert_eq!(Mu4::I.pow(-1), Mu4::MINUS_I);
        assert_eq!(Mu4::MINUS_ONE.as_sign(), Some(-1));
        assert_eq!([Mu4::ONE, Mu4::I, Mu4::MINUS_ONE].map(Mu4::order), [1, 4, 2]);
        assert_eq!(Mu4::MINUS_I.to_string(), "-i");
        for k in Mu4::ALL {
            assert_eq!(k.pow(4), Mu4::ONE);
        }
    }

    #[test]
    fn symbol_examples() {
        assert_eq!(quartic_symbol(&g(0, 1), &g(3, 2)).unwrap(), Mu4::MINUS_I);
        assert_eq!(quartic_symbol(&g(2, 0), &g(3, 0)).unwrap(), Mu4::ONE);
        assert_eq!(quartic_symbol(&g(1, 1), &g(3, 2)).unwrap(), Mu4::MINUS_I);
        assert_eq!(quartic_symbol(&g(-1, 2), &g(3, 2)).unwrap(), Mu4::ONE);
        assert_eq!(quartic_symbol(&g(3, 2), &g(-1, 2)).unwrap(), Mu4::MINUS_ONE);
        assert_eq!(quartic_symbol_fast(&g(-1, 2), &g(3, 2)).unwrap(), Mu4::ONE);
        assert_eq!(quartic_symbol_fast(&g(3, 2), &g(-1, 2)).unwrap(), Mu4::MINUS_ONE);
    }

    #[test]
    fn symbol_errors() {
        assert!(matches!(quartic_symbol(&g(6, 0), &g(-3, 0)), Err(Error::NotCoprime { .. })));
        assert!(matches!(quartic_symbol(&g(2, 0), &g(1, 1)), Err(Error::EvenModulus(_))));
        assert!(matches!(quartic_symbol_composite(&g(3, 0), &g(21, 0)), Err(Error::NotCoprime { .. })));
        assert!(matches!(quartic_symbol_fast(&g(7, 0), &g(-21, 0)), Err(Error::NotCoprime { .. })));
        assert!(matches!(quartic_symbol(&g(2, 0), &g(-21, 0)), Err(Error::NotPrime(_))));
    }

    #[test]
    fn composite_examples() {
        assert_eq!(quartic_symbol_composite(&g(5, 0), &g(21, 0)).unwrap(), Mu4::ONE);
        let (p1, p2) = (g(-1, 2), g(3, 2));
        let prod = &p1 * &p2;
        for a in [g(2, 0), g(0, 1), g(4, 9)] {
            let want = quartic_symbol(&a, &p1).unwrap() * quartic_symbol(&a, &p2).unwrap();
            assert_eq!(quartic_symbol_composite(&a, &prod).unwrap(), want);
            assert_eq!(quartic_symbol_composite(&a, &p1).unwrap(), quartic_symbol(&a, &p1).unwrap());
        }
    }

    #[test]
    fn jacobi_examples() {
        let j = |a: i64, n: i64| jacobi_symbol(&a, &n).unwrap();
        assert_eq!(j(2, 15), 1);
        assert_eq!(j(12345, 1), 1);
        assert_eq!(j(3, 9), 0);
        assert_eq!(j(-1, 7), -1);
        assert!(matches!(jacobi_symbol(&3i64, &10i64), Err(Error::EvenModulus(_))));
        let big = BigInt::from(1_000_000_007u64);
        assert_eq!(jacobi_symbol(&BigInt::from(5), &big).unwrap(), j(5, 1_000_000_007));
    }

    #[test]
    fn jacobi_matches_euler_criterion() {
        for p in crate::sieve::primes_up_to(300).unwrap().into_iter().skip(1) {
            for a in 0..p {
                let e = crate::arith::pow_mod(a, (p - 1) / 2, p);
                let want = if e == 0 { 0 } else if e == 1 { 1 } else { -1 };
                assert_eq!(jacobi_symbol(&(a as i64), &(p as i64)).unwrap(), want);
            }
        }
    }

    #[test]
    fn quadratic_reciprocity_small_primes() {
        let ps: Vec<i64> = crate::sieve::primes_up_to(1000).unwrap().into_iter().skip(1).map(|p| p as i64).collect();
        for (i, &p) in ps.iter().enumerate().step_by(7) {
            for &q in ps[i + 1..].iter().step_by(5) {
                let lhs = jacobi_symbol(&p, &q).unwrap() * jacobi_symbol(&q, &p).unwrap();
                let rhs = if (p - 1) * (q - 1) / 4 % 2 == 0 { 1 } else { -1 };
                assert_eq!(lhs, rhs, "p = {p}, q = {q}");
            }
        }
    }

    #[test]
    fn rational_numerator_is_trivial_mod_inert_primes() {
        for q in crate::sieve::primes_in_progression(200, 3, 4).unwrap() {
            let m = g(-(q as i64), 0);
            for a in 1..=200i64 {
                if a % q as i64 != 0 {
                    assert_eq!(quartic_symbol(&g(a, 0), &m).unwrap(), Mu4::ONE, "a = {a}, q = {q}");
                }
            }
        }
    }

    #[test]
    fn square_of_quartic_is_legendre() {
        let primes: Vec<GaussInt> = primary_primes_up_to_norm(2000).unwrap();
        for pi in primes.iter().filter(|p| !p.im.is_zero()) {
            let p = pi.norm();
            for a in [-3i64, -1, 2, 3, 5, 7, 10, 11] {
                let ab = BigInt::from(a);
                if (&ab % &p).is_zero() {
                    continue;
                }
                let s = quartic_symbol(&g(a, 0), pi).unwrap().pow(2).as_sign().unwrap();
                assert_eq!(s, jacobi_symbol(&ab, &p).unwrap());
            }
        }
    }

    #[test]
    fn fixed_width_agrees_with_bigint() {
        let a = GaussInt64::from_i64(17, -9);
        let p = GaussInt64::from_i64(-11, 14);
        assert_eq!(quartic_symbol(&a, &p).unwrap(), quartic_symbol(&a.to_big(), &p.to_big()).unwrap());
        assert_eq!(quartic_symbol_fast(&a, &p).unwrap(), quartic_symbol(&a, &p).unwrap());
    }

    fn small_primes() -> Vec<GaussInt> {
        primary_primes_up_to_norm(3000).unwrap()
    }

    fn any_gauss(r: i64) -> impl Strategy<Value = GaussInt> {
        (-r..=r, -r..=r).prop_map(|(a, b)| g(a, b))
    }

    fn odd_primary(r: i64) -> impl Strategy<Value = GaussInt> {
        (-r..=r, -r..=r)
            .prop_filter("odd, nonzero", |(a, b)| (a + b) % 2 != 0)
            .prop_map(|(a, b)| g(a, b).primary_associate().unwrap().1)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn numerator_multiplicative(a in any_gauss(500), b in any_gauss(500), idx in 0usize..400) {
            let ps = small_primes();
            let pi = &ps[idx % ps.len()];
            prop_assume!(!pi.divides(&a) && !pi.divides(&b));
            prop_assert_eq!(
                quartic_symbol(&(&a * &b), pi).unwrap(),
                quartic_symbol(&a, pi).unwrap() * quartic_symbol(&b, pi).unwrap()
            );
        }

        #[test]
        fn conjugation_and_associates(a in any_gauss(500), idx in 0usize..400, k in 0i64..4) {
            let ps = small_primes();
            let pi = &ps[idx % ps.len()];
            prop_assume!(!pi.divides(&a));
            let s = quartic_symbol(&a, pi).unwrap();
            prop_assert_eq!(quartic_symbol(&a.conj(), &pi.conj()).unwrap(), s.conj());
            prop_assert_eq!(quartic_symbol(&a, &pi.mul_unit(k)).unwrap(), s);
            let shifted = &a + &(pi * &g(k - 2, 3 - k));
            prop_assert_eq!(quartic_symbol(&shifted, pi).unwrap(), s);
        }

        #[test]
        fn fast_matches_composite(a in any_gauss(2000), b in odd_primary(300)) {
            prop_assume!(!a.is_zero() && a.is_coprime(&b));
            prop_assert_eq!(quartic_symbol_fast(&a, &b).unwrap(), quartic_symbol_composite(&a, &b).unwrap());
        }
    }
}
