//! The curves `E_d : y² = x³ − dx`: canonical twist parameter, reduction at
//! `1+i`, conductor exponents and the orders of the local characters.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{self, FactorConfig};
use crate::error::{Error, Result};
use crate::gaussint::{classify_prime, expand_base_1pi, factor_primary, PrimaryFactorization, PrimeClass, PrimeKind};
use crate::symbols::{quartic_symbol, Mu4};
use crate::GaussInt;

/// Kodaira symbol of the special fibre at `1+i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kodaira {
    #[serde(rename = "good")]
    Good,
    #[serde(rename = "II")]
    II,
    #[serde(rename = "III")]
    III,
    #[serde(rename = "I0*")]
    I0Star,
    #[serde(rename = "I2*")]
    I2Star,
    #[serde(rename = "I4*")]
    I4Star,
    #[serde(rename = "II*")]
    IIStar,
    #[serde(rename = "III*")]
    IIIStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kodaira::Good => "good",
            Kodaira::II => "II",
            Kodaira::III => "III",
            Kodaira::I0Star => "I0*",
            Kodaira::I2Star => "I2*",
            Kodaira::I4Star => "I4*",
            Kodaira::IIStar => "II*",
            Kodaira::IIIStar => "III*",
        })
    }
}

/// One row of the reduction table: a digit prefix `(d_0, d_1, ...)` of the
/// `(1+i)`-adic expansion of `d`, the fibre type and the conductor exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub prefix: &'static [u8],
    pub kodaira: Kodaira,
    pub f2: u8,
}

const fn row(prefix: &'static [u8], kodaira: Kodaira, f2: u8) -> TableRow {
    TableRow { prefix, kodaira, f2 }
}

/// Reduction types and conductor exponents at `1+i` for fourth-power-free `d`.
pub const REDUCTION_TABLE: [TableRow; 12] = [
    row(&[0, 0, 0, 1], Kodaira::IIIStar, 14),
    row(&[0, 0, 1, 0], Kodaira::I4Star, 10),
    row(&[0, 0, 1, 1], Kodaira::I2Star, 12),
    row(&[0, 1], Kodaira::III, 14),
    row(&[1, 0, 0, 0], Kodaira::I2Star, 6),
    row(&[1, 0, 0, 1], Kodaira::I0Star, 8),
    row(&[1, 0, 1, 0, 0, 0], Kodaira::Good, 0),
    row(&[1, 0, 1, 0, 0, 1], Kodaira::IIStar, 4),
    row(&[1, 0, 1, 0, 1, 0], Kodaira::IIStar, 4),
    row(&[1, 0, 1, 0, 1, 1], Kodaira::Good, 0),
    row(&[1, 0, 1, 1], Kodaira::I0Star, 8),
    row(&[1, 1], Kodaira::II, 12),
];

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvenReduction {
    pub kodaira: Kodaira,
    pub f2: u8,
    /// Index into [`REDUCTION_TABLE`].
    pub row: usize,
    pub digits: [u8; 6],
}

impl EvenReduction {
    pub fn is_good(&self) -> bool {
        self.kodaira == Kodaira::Good
    }
}

/// Looks up the reduction type at `1+i` from the first six digits of `d`.
pub fn reduction_at_two(d: &GaussInt) -> Result<EvenReduction> {
    let v = expand_base_1pi(d, 6)?;
    let digits: [u8; 6] = v.try_into().expect("six digits");
    decode_digits(&digits)
}

pub fn decode_digits(digits: &[u8; 6]) -> Result<EvenReduction> {
    REDUCTION_TABLE
        .iter()
        .position(|r| digits.starts_with(r.prefix))
        .map(|row| EvenReduction {
            kodaira: REDUCTION_TABLE[row].kodaira,
            f2: REDUCTION_TABLE[row].f2,
            row,
            digits: *digits,
        })
        .ok_or_else(|| Error::TableMiss(format!("{digits:?}")))
}

/// Writes `d = x⁴·d'` with `d'` fourth-power-free; `x` is taken in the first
/// quadrant (`re > 0, im >= 0`).
pub fn normalize_d(d: &GaussInt, cfg: &FactorConfig) -> Result<(GaussInt, GaussInt)> {
    let f = factor_primary(d, cfg)?;
    let mut x = GaussInt::one_plus_i().pow(f.n_2 / 4);
    for (p, e) in &f.odd {
        x = &x * &p.pow(e / 4);
    }
    let x4 = x.pow(4);
    let reduced = d.div_exact(&x4).expect("x^4 divides d");
    Ok((reduced, x.first_quadrant_associate()))
}

/// The `K`-isomorphism class of `E_d`, keyed by the fourth-power-free `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveClass {
    pub d: GaussInt,
    pub fact: PrimaryFactorization<BigInt>,
    pub even_reduction: EvenReduction,
    /// `v_π(d)` at every odd prime dividing `d`, keyed by primary generator.
    pub odd_bad: BTreeMap<GaussInt, u32>,
}

impl CurveClass {
    pub fn new(d: &GaussInt) -> Result<Self> {
        Self::with_config(d, &FactorConfig::default())
    }

    pub fn with_config(d: &GaussInt, cfg: &FactorConfig) -> Result<Self> {
        let (d, _) = normalize_d(d, cfg)?;
        let fact = factor_primary(&d, cfg)?;
        let even_reduction = reduction_at_two(&d)?;
        let odd_bad = fact.odd.iter().cloned().collect();
        Ok(CurveClass { d, fact, even_reduction, odd_bad })
    }

    /// The class of `E_{xd}`.
    pub fn twist(&self, x: &GaussInt) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::ZeroInput);
        }
        Self::new(&(x * &self.d))
    }

    /// `v_π(d)` for a primary odd prime `π`.
    pub fn valuation(&self, pi: &GaussInt) -> u32 {
        self.odd_bad.get(pi).copied().unwrap_or(0)
    }

    /// Odd places of bad reduction, in canonical order.
    pub fn bad_odd_places(&self) -> Vec<PrimeClass<BigInt>> {
        self.odd_bad.keys().map(|p| classify_prime(p).expect("factor is prime")).collect()
    }

    pub fn has_good_reduction_at_two(&self) -> bool {
        self.even_reduction.is_good()
    }

    /// Conductor exponent of `E_d` at every odd bad prime (always 2).
    pub fn odd_conductor(&self) -> BTreeMap<GaussInt, u32> {
        self.odd_bad.keys().map(|p| (p.clone(), 2)).collect()
    }

    /// Order of `ε_v : x ↦ conj((x/π)₄^{v(d)})` on `(O/π)^×`. At degree-one
    /// places this is read off `v(d)`; at degree-two places it is evaluated on
    /// a generator of `F_{q²}^×`.
    pub fn epsilon_order(&self, v: &PrimeClass<BigInt>) -> Result<u8> {
        let n = self.valuation(&v.generator);
        match v.kind {
            PrimeKind::Even => Err(Error::EvenPlace),
            PrimeKind::DegreeOne => Ok(epsilon_order_rule(n)),
            PrimeKind::DegreeTwo => epsilon_order_direct(&v.generator, n),
        }
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E_{{{}}}", self.d)
    }
}

/// Order 4 for `v(d)` odd, 2 for `v(d) = 2`, 1 when unramified.
pub fn epsilon_order_rule(n: u32) -> u8 {
    match n % 4 {
        0 => 1,
        2 => 2,
        _ => 4,
    }
}

/// A generator of `(O/π)^×` for an odd prime `π`.
pub fn residue_generator(pi: &GaussInt) -> Result<GaussInt> {
    let class = classify_prime(pi)?;
    if class.kind == PrimeKind::Even {
        return Err(Error::EvenPlace);
    }
    let order: BigInt = class.norm() - 1;
    let ordu: BigUint = order.magnitude().clone();
    let primes: Vec<BigUint> = arith::factor(&ordu, &FactorConfig::default())?.into_iter().map(|(p, _)| p).collect();
    let bound = class.residue_characteristic.to_i64().unwrap_or(i64::MAX);
    for s in 1i64.. {
        for (a, b) in (0..=s.min(bound)).map(|a| (a, s - a)) {
            let cand = GaussInt::from_i64(a, b);
            if !pi.is_coprime(&cand) {
                continue;
            }
            let generates = primes.iter().all(|p| {
                let e = BigInt::from(&ordu / p);
                !cand.pow_mod(&e, pi).congruent(&GaussInt::one(), pi)
            });
            if generates {
                return Ok(cand);
            }
        }
    }
    unreachable!("a finite field has a primitive element")
}

fn epsilon_order_direct(pi: &GaussInt, n: u32) -> Result<u8> {
    let g = residue_generator(pi)?;
    let value = quartic_symbol(&g, pi)?.pow(n as i64).conj();
    Ok(value.order())
}

/// `ε(i^k) = ∏ conj((i^k/π)₄^{v_π(d)})` over the odd bad primes.
pub fn epsilon_on_unit(c: &CurveClass, k: i64) -> Result<Mu4> {
    let mut acc = Mu4::ONE;
    for (p, n) in &c.odd_bad {
        acc *= quartic_symbol(&GaussInt::unit(k), p)?.pow(*n as i64).conj();
    }
    Ok(acc)
}

/// Builds `Σ d_j (1+i)^j` from digits.
pub fn from_digits(digits: &[u8]) -> GaussInt {
    let opi = GaussInt::one_plus_i();
    let mut acc = GaussInt::from_i64(0, 0);
    let mut pw = GaussInt::one();
    for &b in digits {
        if b == 1 {
            acc = &acc + &pw;
        }
        pw = &pw * &opi;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussint::primary_primes_up_to_norm;
    use proptest::prelude::*;

    fn g(re: i64, im: i64) -> GaussInt {
        GaussInt::from_i64(re, im)
    }

    fn cfg() -> FactorConfig {
        FactorConfig::default()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_d(&g(16, 0), &cfg()).unwrap(), (g(1, 0), g(2, 0)));
        assert_eq!(normalize_d(&g(-4, 0), &cfg()).unwrap(), (g(1, 0), g(1, 1)));
        assert_eq!(normalize_d(&g(-1, 2), &cfg()).unwrap(), (g(-1, 2), g(1, 0)));
        let (d, x) = normalize_d(&g(-3 * 81 * 2, 0), &cfg()).unwrap();
        assert_eq!(&x.pow(4) * &d, g(-486, 0));
        assert_eq!(x, g(3, 0));
    }

    #[test]
    fn reduction_examples() {
        let r = |a, b| reduction_at_two(&g(a, b)).unwrap();
        assert_eq!((r(-2, 2).kodaira, r(-2, 2).f2), (Kodaira::IIIStar, 14));
        assert_eq!((r(1, 0).kodaira, r(1, 0).f2), (Kodaira::I2Star, 6));
        assert_eq!((r(0, 1).kodaira, r(0, 1).f2), (Kodaira::II, 12));
        assert_eq!((r(1, 2).kodaira, r(1, 2).f2), (Kodaira::Good, 0));
    }

    #[test]
    fn table_is_exhaustive_for_admissible_digits() {
        let mut hit = [false; 12];
        for mask in 0u8..64 {
            let digits: [u8; 6] = std::array::from_fn(|j| (mask >> j) & 1);
            let res = decode_digits(&digits);
            if digits[..4] == [0, 0, 0, 0] {
                // (1+i)^4 | d: never fourth-power-free
                assert!(res.is_err());
                continue;
            }
            let e = res.unwrap();
            assert_eq!(e.f2 % 2, 0);
            hit[e.row] = true;
        }
        assert!(hit.iter().all(|&h| h));
    }

    #[test]
    fn odd_conductor_examples() {
        let c = CurveClass::new(&g(-1, 2)).unwrap();
        assert_eq!(c.odd_conductor().into_iter().collect::<Vec<_>>(), vec![(g(-1, 2), 2)]);
        assert!(CurveClass::new(&g(1, 0)).unwrap().odd_conductor().is_empty());
        let c = CurveClass::new(&(&g(21, 0) * &g(-1, 2))).unwrap();
        let keys: Vec<_> = c.odd_conductor().into_iter().collect();
        assert_eq!(keys, vec![(g(-1, 2), 2), (g(-3, 0), 2), (g(-7, 0), 2)]);
    }

    #[test]
    fn epsilon_orders_follow_valuation() {
        assert_eq!([0, 1, 2, 3].map(epsilon_order_rule), [1, 4, 2, 4]);
        for pi in primary_primes_up_to_norm::<BigInt>(400).unwrap() {
            let v = classify_prime(&pi).unwrap();
            for n in 1..=3u32 {
                let c = CurveClass::new(&pi.pow(n)).unwrap();
                let direct = epsilon_order_direct(&pi, n).unwrap();
                assert_eq!(c.epsilon_order(&v).unwrap(), direct);
                assert_eq!(direct, epsilon_order_rule(n), "pi = {pi}, n = {n}");
            }
        }
        let c = CurveClass::new(&g(5, 0)).unwrap();
        assert_eq!(c.epsilon_order(&classify_prime(&g(1, 1)).unwrap()), Err(Error::EvenPlace));
    }

    #[test]
    fn odd_conductor_forces_epsilon_on_units() {
        // with good reduction at 1+i the conductor is odd, so ε(u)·u = 1
        let mut seen = 0;
        for a in -40i64..40 {
            for b in -40i64..40 {
                if (a, b) == (0, 0) {
                    continue;
                }
                let c = CurveClass::new(&g(a, b)).unwrap();
                if c.has_good_reduction_at_two() {
                    assert_eq!(epsilon_on_unit(&c, 1).unwrap(), Mu4::MINUS_I, "d = {}", c.d);
                    seen += 1;
                }
            }
        }
        assert!(seen > 100);
    }

    #[test]
    fn digit_constructor() {
        for prefix in REDUCTION_TABLE.iter().map(|r| r.prefix) {
            let d = from_digits(prefix);
            assert!(expand_base_1pi(&d, prefix.len()).unwrap() == prefix);
        }
    }

    fn nonzero(r: i64) -> impl Strategy<Value = GaussInt> {
        (-r..=r, -r..=r).prop_filter("nonzero", |(a, b)| (*a, *b) != (0, 0)).prop_map(|(a, b)| g(a, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn twist_is_a_group_action(d in nonzero(60), x in nonzero(20), y in nonzero(20)) {
            let c = CurveClass::new(&d).unwrap();
            prop_assert_eq!(c.twist(&x).unwrap().twist(&y).unwrap(), c.twist(&(&x * &y)).unwrap());
            prop_assert_eq!(c.twist(&x.pow(4)).unwrap(), c.clone());
            let i = GaussInt::i();
            let t4 = c.twist(&i).unwrap().twist(&i).unwrap().twist(&i).unwrap().twist(&i).unwrap();
            prop_assert_eq!(t4, c);
        }

        #[test]
        fn normalization_is_idempotent(d in nonzero(3000)) {
            let (dp, x) = normalize_d(&d, &cfg()).unwrap();
            prop_assert_eq!(&x.pow(4) * &dp, d);
            prop_assert!(factor_primary(&dp, &cfg()).unwrap().is_fourth_power_free());
            prop_assert_eq!(normalize_d(&dp, &cfg()).unwrap(), (dp.clone(), GaussInt::one()));
            prop_assert!(reduction_at_two(&dp).is_ok());
        }
    }
}
