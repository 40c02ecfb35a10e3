//! Prime elements in residue classes: CRT lifting and a norm-ordered scan of
//! the lifted progression.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussint::is_gaussian_prime;
use crate::GaussInt;

/// `x ≡ residue (mod modulus)` for every entry; moduli pairwise coprime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceSystem {
    pub conditions: Vec<(GaussInt, GaussInt)>,
    /// Only primary primes are accepted as solutions.
    pub primary: bool,
}

impl CongruenceSystem {
    pub fn new(primary: bool) -> Self {
        Self { conditions: Vec::new(), primary }
    }

    pub fn with(mut self, modulus: GaussInt, residue: GaussInt) -> Self {
        self.conditions.push((modulus, residue));
        self
    }

    /// Checks coprimality of the moduli and invertibility of the residues.
    pub fn validate(&self) -> Result<()> {
        for (i, (m, r)) in self.conditions.iter().enumerate() {
            if m.is_zero() {
                return Err(Error::InadmissibleSystem("zero modulus".into()));
            }
            if !r.is_coprime(m) {
                return Err(Error::InadmissibleSystem(format!("{r} is not invertible mod {m}")));
            }
            for (m2, _) in &self.conditions[..i] {
                if !m.is_coprime(m2) {
                    return Err(Error::InadmissibleSystem(format!("moduli {m2} and {m} are not coprime")));
                }
            }
        }
        Ok(())
    }

    /// `(M, r)` with `x ≡ r (mod M)` equivalent to the whole system.
    pub fn lift(&self) -> Result<(GaussInt, GaussInt)> {
        self.validate()?;
        let mut m = GaussInt::one();
        let mut r = GaussInt::zero();
        for (m2, r2) in &self.conditions {
            let (g, s, _) = m.ext_gcd(m2);
            // s·m ≡ g (mod m2) with g a unit, so s·conj(g)·m ≡ 1
            let e = &s * &g.conj();
            let delta = r2 - &r;
            r = &r + &(&(&m * &e) * &delta);
            m = &m * m2;
            r = r.rem(&m);
        }
        Ok((m, r))
    }

    pub fn is_satisfied_by(&self, x: &GaussInt) -> bool {
        self.conditions.iter().all(|(m, r)| x.congruent(r, m))
    }
}

fn cmp_norm_arg(a: &GaussInt, b: &GaussInt) -> Ordering {
    a.norm().cmp(&b.norm()).then_with(|| a.cmp_arg(b))
}

fn isqrt_ceil(n: &BigInt) -> BigInt {
    let s = n.sqrt();
    if &(&s * &s) < n {
        s + 1
    } else {
        s
    }
}

/// Points of `r + M·Z[i]` with `lo < N(x) <= hi`, sorted by norm then argument.
fn lattice_shell(m: &GaussInt, r: &GaussInt, lo: &BigInt, hi: &BigInt) -> Vec<GaussInt> {
    // x = r + M·y, so y lies in a disc about -r/M of radius sqrt(hi / N(M))
    let nm: BigInt = m.norm();
    let c = &(-r) * &m.conj();
    let rad: BigInt = isqrt_ceil(&(hi * &nm)) + 1;
    let span: BigInt = &rad / &nm + 1;
    let box_re: (BigInt, BigInt) = (c.re.div_floor(&nm) - &span, c.re.div_ceil(&nm) + &span);
    let box_im: (BigInt, BigInt) = (c.im.div_floor(&nm) - &span, c.im.div_ceil(&nm) + &span);
    let mut out = Vec::new();
    let mut a = box_re.0.clone();
    while a <= box_re.1 {
        let mut b = box_im.0.clone();
        while b <= box_im.1 {
            let x = r + &(m * &GaussInt::new(a.clone(), b.clone()));
            let n = x.norm();
            if &n > lo && &n <= hi {
                out.push(x);
            }
            b += 1;
        }
        a += 1;
    }
    out.sort_by(cmp_norm_arg);
    out
}

/// The first prime element (primary if requested) solving `sys`, scanning the
/// lifted progression by increasing norm with ties broken by argument in
/// `[0, 2π)`.
pub fn find_prime_congruent(sys: &CongruenceSystem, norm_bound: &BigInt) -> Result<GaussInt> {
    let (m, r) = sys.lift()?;
    let nm: BigInt = m.norm();
    let mut lo = BigInt::from(-1);
    let mut hi: BigInt = (&nm * 4u32).max(BigInt::from(64));
    loop {
        let top = (&hi).min(norm_bound).clone();
        for x in lattice_shell(&m, &r, &lo, &top) {
            if x.is_unit() || x.is_zero() || (sys.primary && !x.is_primary()) {
                continue;
            }
            if is_gaussian_prime(&x) {
                return Ok(x);
            }
        }
        if &top >= norm_bound {
            return Err(Error::SearchExhausted { largest_norm: norm_bound.to_string() });
        }
        lo = top;
        hi = &hi * 4;
    }
}

/// Rational primes `q ≡ a (mod m)` in increasing order, as a lazy iterator
/// bounded by `limit`.
pub fn rational_primes_congruent(a: u64, m: u64, limit: u64) -> impl Iterator<Item = u64> {
    (0..).map(move |k| a % m + k * m).take_while(move |&q| q <= limit).filter(|&q| crate::arith::is_prime_u64(q))
}
