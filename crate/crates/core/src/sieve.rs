//! Segmented sieve of Eratosthenes for rational primes.

use crate::error::{Error, Result};

/// Largest limit accepted by the sieve.
pub const SIEVE_CAP: u64 = 100_000_000;

const SEGMENT: u64 = 1 << 18;

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Calls `f` for every prime in `[lo, hi]` in increasing order.
pub fn for_each_prime(lo: u64, hi: u64, mut f: impl FnMut(u64)) -> Result<()> {
    if hi > SIEVE_CAP {
        return Err(Error::EffortBound {
            what: "sieve limit",
            value: hi.to_string(),
            cap: SIEVE_CAP.to_string(),
        });
    }
    let lo = lo.max(2);
    if hi < lo {
        return Ok(());
    }
    let base = simple_sieve((hi as f64).sqrt() as u64 + 1);
    let mut mark = vec![false; SEGMENT as usize];
    let mut start = lo;
    while start <= hi {
        let end = (start + SEGMENT - 1).min(hi);
        let len = (end - start + 1) as usize;
        mark[..len].iter_mut().for_each(|m| *m = false);
        for &p in &base {
            if p * p > end {
                break;
            }
            let mut j = (start.div_ceil(p) * p).max(p * p);
            while j <= end {
                mark[(j - start) as usize] = true;
                j += p;
            }
        }
        for (k, &m) in mark[..len].iter().enumerate() {
            if !m {
                f(start + k as u64);
            }
        }
        start = end + 1;
    }
    Ok(())
}

/// All primes `<= limit`.
pub fn primes_up_to(limit: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for_each_prime(2, limit, |p| out.push(p))?;
    Ok(out)
}

/// Primes `p <= limit` with `p ≡ a (mod m)`.
pub fn primes_in_progression(limit: u64, a: u64, m: u64) -> Result<Vec<u64>> {
    let a = a % m;
    let mut out = Vec::new();
    for_each_prime(2, limit, |p| {
        if p % m == a {
            out.push(p)
        }
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(limit: u64) -> Vec<u64> {
        (2..=limit)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect()
    }

    #[test]
    fn matches_trial_division() {
        assert_eq!(primes_up_to(5000).unwrap(), naive(5000));
        assert!(primes_up_to(1).unwrap().is_empty());
    }

    #[test]
    fn crosses_segment_boundaries() {
        let mut got = Vec::new();
        for_each_prime(SEGMENT - 50, SEGMENT + 50, |p| got.push(p)).unwrap();
        let want: Vec<u64> = naive(SEGMENT + 50).into_iter().filter(|&p| p >= SEGMENT - 50).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn prime_counts() {
        assert_eq!(primes_up_to(1_000_000).unwrap().len(), 78_498);
        let p3 = primes_in_progression(1000, 3, 4).unwrap();
        assert_eq!(p3.len(), 87);
        assert!(p3.iter().all(|p| p % 4 == 3));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(primes_up_to(SIEVE_CAP + 1), Err(Error::EffortBound { .. })));
    }
}
