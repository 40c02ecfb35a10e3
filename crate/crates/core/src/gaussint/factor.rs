use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::Gaussian;
use crate::arith::{self, FactorConfig};
use crate::error::{Error, Result};
use crate::scalar::GaussScalar;
use crate::sieve;

/// `d = i^n_u · (1+i)^n_2 · ∏ π^e` over primary odd primes `π`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimaryFactorization<T> {
    pub n_u: u8,
    pub n_2: u32,
    /// Primary odd primes with positive exponents, in canonical order.
    pub odd: Vec<(Gaussian<T>, u32)>,
}

impl<T: GaussScalar> PrimaryFactorization<T> {
    pub fn reassemble(&self) -> Gaussian<T> {
        let mut acc = Gaussian::<T>::unit(self.n_u as i64);
        acc = &acc * &Gaussian::one_plus_i().pow(self.n_2);
        for (p, e) in &self.odd {
            acc = &acc * &p.pow(*e);
        }
        acc
    }

    /// Exponent of the primary prime `pi` (zero if absent).
    pub fn valuation(&self, pi: &Gaussian<T>) -> u32 {
        self.odd.iter().find(|(p, _)| p == pi).map_or(0, |(_, e)| *e)
    }

    /// The odd part `∏ π^e` (primary).
    pub fn odd_part(&self) -> Gaussian<T> {
        self.odd.iter().map(|(p, e)| p.pow(*e)).product()
    }

    /// All exponents `<= 3`.
    pub fn is_fourth_power_free(&self) -> bool {
        self.n_2 <= 3 && self.odd.iter().all(|(_, e)| *e <= 3)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: GaussScalar")]
struct OddEntry<T> {
    pi: Gaussian<T>,
    e: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: GaussScalar")]
struct FactorizationRepr<T> {
    n_u: u8,
    n_2: u32,
    odd: Vec<OddEntry<T>>,
}

impl<T: GaussScalar> Serialize for PrimaryFactorization<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FactorizationRepr {
            n_u: self.n_u,
            n_2: self.n_2,
            odd: self.odd.iter().map(|(pi, e)| OddEntry { pi: pi.clone(), e: *e }).collect(),
        }
        .serialize(s)
    }
}

impl<'de, T: GaussScalar> Deserialize<'de> for PrimaryFactorization<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FactorizationRepr::<T>::deserialize(d)?;
        Ok(Self { n_u: r.n_u, n_2: r.n_2, odd: r.odd.into_iter().map(|o| (o.pi, o.e)).collect() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeKind {
    Even,
    DegreeOne,
    DegreeTwo,
}

/// A prime of `Z[i]` with its primary generator (`1+i` for the even prime,
/// `-q` at degree two).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "T: GaussScalar")]
pub struct PrimeClass<T> {
    pub kind: PrimeKind,
    pub generator: Gaussian<T>,
    #[serde(with = "super::scalar_str")]
    pub residue_characteristic: T,
}

impl<T: GaussScalar> PrimeClass<T> {
    /// Size of the residue field.
    pub fn norm(&self) -> T {
        self.generator.norm()
    }

    pub fn is_odd(&self) -> bool {
        self.kind != PrimeKind::Even
    }
}

fn biguint_of<T: GaussScalar>(v: &T) -> BigUint {
    v.to_bigint().magnitude().clone()
}

fn scalar_of<T: GaussScalar>(v: &BigUint) -> T {
    T::from_bigint(&BigInt::from_biguint(Sign::Plus, v.clone())).expect("factor fits the scalar")
}

/// Primary prime above a rational prime `p ≡ 1 (mod 4)`; the other one is
/// its conjugate.
fn split_prime<T: GaussScalar>(p: &BigUint) -> Gaussian<T> {
    let u: BigUint = match p.to_u64() {
        Some(small) => BigUint::from(arith::sqrt_minus_one(small)),
        None => {
            let e = (p - 1u32) >> 2;
            let minus_one = p - 1u32;
            let mut c = BigUint::from(2u32);
            loop {
                let u = c.modpow(&e, p);
                if (&u * &u) % p == minus_one {
                    break u;
                }
                c += 1u32;
            }
        }
    };
    let pg = Gaussian::<T>::from_rational(scalar_of(p));
    let ug = Gaussian::new(scalar_of(&u), T::one());
    let g = pg.gcd(&ug);
    g.primary_associate().expect("split prime is odd").1
}

fn is_rational_prime<T: GaussScalar>(v: &T) -> bool {
    arith::is_prime(&biguint_of(v))
}

/// Exact unique factorization into a unit, a power of `1+i`, and primary odd
/// primes. Keys are ordered by (norm, re, im).
pub fn factor_primary<T: GaussScalar>(d: &Gaussian<T>, cfg: &FactorConfig) -> Result<PrimaryFactorization<T>> {
    if d.is_zero() {
        return Err(Error::ZeroInput);
    }
    let opi = Gaussian::<T>::one_plus_i();
    let mut rest = d.clone();
    let mut n_2 = 0;
    while !rest.is_odd() {
        rest = rest.div_exact(&opi).expect("even element is divisible by 1+i");
        n_2 += 1;
    }
    let rational = arith::factor(&biguint_of(&rest.norm()), cfg)
        .map_err(|e| if let Error::FactorizationLimit(_) = e { Error::FactorizationLimit(d.to_string()) } else { e })?;
    let mut odd: Vec<(Gaussian<T>, u32)> = Vec::new();
    for (p, e) in rational {
        if (&p % 4u32).is_one() {
            let pi: Gaussian<T> = split_prime(&p);
            for cand in [pi.clone(), pi.conj()] {
                let mut k = 0;
                while let Some(q) = rest.div_exact(&cand) {
                    rest = q;
                    k += 1;
                }
                if k > 0 {
                    odd.push((cand, k));
                }
            }
        } else {
            // inert prime: p^e exactly divides the norm, e even
            let q = Gaussian::<T>::from_rational(-scalar_of::<T>(&p));
            let mut k = 0;
            while let Some(r) = rest.div_exact(&q) {
                rest = r;
                k += 1;
            }
            debug_assert_eq!(2 * k, e);
            odd.push((q, k));
        }
    }
    let n_u = rest.unit_exponent().expect("all prime factors removed");
    odd.sort();
    Ok(PrimaryFactorization { n_u, n_2, odd })
}

/// Classifies a Gaussian prime.
pub fn classify_prime<T: GaussScalar>(pi: &Gaussian<T>) -> Result<PrimeClass<T>> {
    let not_prime = || Error::NotPrime(pi.to_string());
    if pi.is_zero() || pi.is_unit() {
        return Err(not_prime());
    }
    let n = pi.norm();
    let two = T::one() + T::one();
    if n == two {
        return Ok(PrimeClass { kind: PrimeKind::Even, generator: Gaussian::one_plus_i(), residue_characteristic: two });
    }
    if is_rational_prime(&n) {
        let four = T::from_u8(4).unwrap();
        debug_assert!(n.mod_floor(&four).is_one());
        let (_, g) = pi.primary_associate()?;
        return Ok(PrimeClass { kind: PrimeKind::DegreeOne, generator: g, residue_characteristic: n });
    }
    let q = if pi.im.is_zero() {
        pi.re.abs()
    } else if pi.re.is_zero() {
        pi.im.abs()
    } else {
        return Err(not_prime());
    };
    let four = T::from_u8(4).unwrap();
    if q.mod_floor(&four) == T::from_u8(3).unwrap() && is_rational_prime(&q) {
        return Ok(PrimeClass {
            kind: PrimeKind::DegreeTwo,
            generator: Gaussian::from_rational(-q.clone()),
            residue_characteristic: q,
        });
    }
    Err(not_prime())
}

pub fn is_gaussian_prime<T: GaussScalar>(x: &Gaussian<T>) -> bool {
    classify_prime(x).is_ok()
}

/// Digits `d_0..d_{k-1}` in `{0, 1}` with `d ≡ Σ d_j (1+i)^j (mod (1+i)^k)`.
pub fn expand_base_1pi<T: GaussScalar>(d: &Gaussian<T>, k: usize) -> Result<Vec<u8>> {
    if d.is_zero() {
        return Err(Error::ZeroInput);
    }
    if k == 0 {
        return Err(Error::InvalidArgument("digit count must be at least 1".into()));
    }
    let opi = Gaussian::<T>::one_plus_i();
    let mut cur = d.clone();
    let mut digits = Vec::with_capacity(k);
    for _ in 0..k {
        if cur.is_odd() {
            digits.push(1);
            cur = &cur - &Gaussian::one();
        } else {
            digits.push(0);
        }
        cur = cur.div_exact(&opi).expect("residue removed");
    }
    Ok(digits)
}

/// All primary odd primes of norm `<= bound`, in canonical order.
pub fn primary_primes_up_to_norm<T: GaussScalar>(bound: u64) -> Result<Vec<Gaussian<T>>> {
    let mut out = Vec::new();
    sieve::for_each_prime(3, bound, |p| {
        if p % 4 == 1 {
            let pi: Gaussian<T> = split_prime(&BigUint::from(p));
            out.push(pi.conj());
            out.push(pi);
        } else if p.checked_mul(p).is_some_and(|pp| pp <= bound) {
            out.push(Gaussian::from_i64(-(p as i64), 0));
        }
    })?;
    out.sort();
    Ok(out)
}
