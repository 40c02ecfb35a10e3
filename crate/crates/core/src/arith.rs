//! Rational integer helpers: modular powers, primality, factorization.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::sieve;

/// Bound of the trial-division stage.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// Effort settings for factoring rational integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorConfig {
    /// Total number of rho iterations allowed across all attempts.
    pub rho_iterations: u64,
    /// Seed for the rho polynomial constants and starting points.
    pub seed: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        Self { rho_iterations: 5_000_000, seed: 0x5eed }
    }
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve::primes_up_to(TRIAL_DIVISION_BOUND).expect("below sieve cap"))
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

fn miller_rabin_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37].iter().all(|&a| miller_rabin_u64(n, a))
}

fn miller_rabin_big(n: &BigUint, a: u64) -> bool {
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    let mut x = BigUint::from(a).modpow(&d, n);
    if x == one || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n1 {
            return true;
        }
    }
    false
}

/// Primality test. Exact below 3.3·10²⁴; above that, a strong probable-prime
/// test to the first twenty prime bases.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &small_primes()[..200] {
        if (n % p).is_zero() {
            return false;
        }
    }
    small_primes()[..20].iter().all(|&a| miller_rabin_big(n, a))
}

/// Finds `u` with `u² ≡ -1 (mod p)` for a prime `p ≡ 1 (mod 4)`; returns the
/// smaller of the two roots.
pub fn sqrt_minus_one(p: u64) -> u64 {
    debug_assert!(p % 4 == 1);
    for c in 2..p {
        let u = pow_mod(c, (p - 1) / 4, p);
        if mul_mod(u, u, p) == p - 1 {
            return u.min(p - u);
        }
    }
    unreachable!("p = {p} is not a prime congruent to 1 mod 4")
}

/// A generator of the multiplicative group `(Z/p)^×`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors: Vec<u64> = factor_u64_trial(p - 1).into_iter().map(|(q, _)| q).collect();
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("prime modulus has a primitive root")
}

fn factor_u64_trial(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

struct Rho {
    budget: u64,
    state: u64,
}

impl Rho {
    fn next_u64(&mut self) -> u64 {
        // splitmix64
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Brent's variant of Pollard's rho. Returns a nontrivial factor of the
    /// composite `n`, or `None` when the budget runs out.
    fn split(&mut self, n: &BigUint) -> Option<BigUint> {
        let one = BigUint::one();
        if n.is_even() {
            return Some(BigUint::from(2u32));
        }
        while self.budget > 0 {
            let c = BigUint::from(self.next_u64()) % n;
            let mut y = BigUint::from(self.next_u64()) % n;
            let step = |v: &BigUint| (v * v + &c) % n;
            let m = 128u64;
            let mut g = one.clone();
            let mut r = 1u64;
            let mut q = one.clone();
            let mut x = y.clone();
            let mut ys = y.clone();
            while g == one {
                x = y.clone();
                for _ in 0..r {
                    y = step(&y);
                }
                let mut k = 0;
                while k < r && g == one {
                    ys = y.clone();
                    let lim = m.min(r - k);
                    for _ in 0..lim {
                        y = step(&y);
                        let diff = if x > y { &x - &y } else { &y - &x };
                        q = (q * diff) % n;
                    }
                    self.budget = self.budget.saturating_sub(lim);
                    g = q.gcd(n);
                    k += m;
                }
                r *= 2;
                if self.budget == 0 && g == one {
                    return None;
                }
            }
            if &g == n {
                loop {
                    ys = step(&ys);
                    let diff = if x > ys { &x - &ys } else { &ys - &x };
                    g = diff.gcd(n);
                    if g != one {
                        break;
                    }
                }
            }
            if &g != n {
                return Some(g);
            }
        }
        None
    }
}

/// Factors `n >= 1` into `(prime, exponent)` pairs sorted by prime: trial
/// division to [`TRIAL_DIVISION_BOUND`], then Pollard–Brent rho.
pub fn factor(n: &BigUint, cfg: &FactorConfig) -> Result<Vec<(BigUint, u32)>> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut rest = n.clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for &p in small_primes() {
        if BigUint::from(p) * p > rest {
            break;
        }
        let mut e = 0;
        while (&rest % p).is_zero() {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            out.push((BigUint::from(p), e));
        }
    }
    if rest.is_one() {
        return Ok(out);
    }
    let mut rho = Rho { budget: cfg.rho_iterations, state: cfg.seed };
    let mut stack = vec![rest];
    let mut big: Vec<BigUint> = Vec::new();
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            big.push(m);
            continue;
        }
        match rho.split(&m) {
            Some(f) => {
                let g = &m / &f;
                stack.push(f);
                stack.push(g);
            }
            None => return Err(Error::FactorizationLimit(n.to_string())),
        }
    }
    big.sort();
    for p in big {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out.sort();
    Ok(out)
}
