//! The Hecke character of `E_d` at good odd primes: point counts over the
//! residue field and the closed form `χ(𝔭) = conj((d/π)₄)·π`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{self, mul_mod};
use crate::error::{Error, Result};
use crate::gaussint::{PrimeClass, PrimeKind};
use crate::symbols::quartic_symbol;
use crate::GaussInt;

/// Default bound on the residue field size for brute-force point counts.
pub const POINT_COUNT_CAP: u64 = 1_000_000;

/// `u ∈ [0, p)` with `i ≡ u (mod π)` for a degree-one prime `π` over `p`.
pub fn residue_of_i(pi: &GaussInt) -> u64 {
    let p = pi.norm().to_u64().expect("residue characteristic fits u64");
    let u = arith::sqrt_minus_one(p);
    let diff = &GaussInt::i() - &GaussInt::from_i64(u as i64, 0);
    if pi.divides(&diff) {
        u
    } else {
        p - u
    }
}

fn mod_u64(v: &BigInt, p: u64) -> u64 {
    let r = v % BigInt::from(p);
    let r = if r.sign() == num_bigint::Sign::Minus { r + BigInt::from(p) } else { r };
    r.to_u64().unwrap()
}

/// Image of `α` in `O/π ≅ F_p`.
pub fn reduce_degree_one(alpha: &GaussInt, p: u64, u: u64) -> u64 {
    (mod_u64(&alpha.re, p) + mul_mod(mod_u64(&alpha.im, p), u, p)) % p
}

/// `F_{q²} = F_q[t]/(t² + 1)`, elements `(a, b) = a + bt`.
#[derive(Clone, Copy, Debug)]
pub struct Fq2 {
    pub q: u64,
}

impl Fq2 {
    pub fn reduce(&self, alpha: &GaussInt) -> (u64, u64) {
        (mod_u64(&alpha.re, self.q), mod_u64(&alpha.im, self.q))
    }

    pub fn mul(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let q = self.q;
        let re = (mul_mod(x.0, y.0, q) + q - mul_mod(x.1, y.1, q)) % q;
        let im = (mul_mod(x.0, y.1, q) + mul_mod(x.1, y.0, q)) % q;
        (re, im)
    }

    pub fn sub(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let q = self.q;
        ((x.0 + q - y.0) % q, (x.1 + q - y.1) % q)
    }

    pub fn pow(&self, mut x: (u64, u64), mut e: u64) -> (u64, u64) {
        let mut r = (1 % self.q, 0);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        r
    }

    pub fn index(&self, x: (u64, u64)) -> usize {
        (x.0 + x.1 * self.q) as usize
    }
}

fn check_good(d: &GaussInt, place: &PrimeClass<BigInt>) -> Result<()> {
    if place.kind == PrimeKind::Even || place.generator.divides(d) {
        return Err(Error::BadReduction { d: d.to_string(), place: place.generator.to_string() });
    }
    Ok(())
}

fn field_size(place: &PrimeClass<BigInt>, cap: u64) -> Result<u64> {
    let n = place.norm();
    match n.to_u64() {
        Some(v) if v <= cap => Ok(v),
        _ => Err(Error::EffortBound { what: "residue field size", value: n.to_string(), cap: cap.to_string() }),
    }
}

/// `#Ẽ_d(k)` over the residue field of `place`, counted by enumeration of `x`
/// with a table of squares; includes the point at infinity.
pub fn count_points(d: &GaussInt, place: &PrimeClass<BigInt>, cap: u64) -> Result<u64> {
    check_good(d, place)?;
    let n = field_size(place, cap)?;
    let mut count = 1u64;
    match place.kind {
        PrimeKind::DegreeOne => {
            let p = n;
            let u = residue_of_i(&place.generator);
            let dm = reduce_degree_one(d, p, u);
            let mut chi = vec![-1i8; p as usize];
            chi[0] = 0;
            for y in 1..p {
                chi[mul_mod(y, y, p) as usize] = 1;
            }
            for x in 0..p {
                let x3 = mul_mod(mul_mod(x, x, p), x, p);
                let f = (x3 + p - mul_mod(dm, x, p)) % p;
                count += (1 + chi[f as usize] as i64) as u64;
            }
        }
        PrimeKind::DegreeTwo => {
            let field = Fq2 { q: place.residue_characteristic.to_u64().unwrap() };
            let q = field.q;
            let dm = field.reduce(d);
            let mut chi = vec![-1i8; n as usize];
            chi[0] = 0;
            for a in 0..q {
                for b in 0..q {
                    if (a, b) != (0, 0) {
                        chi[field.index(field.mul((a, b), (a, b)))] = 1;
                    }
                }
            }
            for a in 0..q {
                for b in 0..q {
                    let x = (a, b);
                    let x3 = field.mul(field.mul(x, x), x);
                    let f = field.sub(x3, field.mul(dm, x));
                    count += (1 + chi[field.index(f)] as i64) as u64;
                }
            }
        }
        PrimeKind::Even => unreachable!(),
    }
    Ok(count)
}

/// `χ(𝔭)` at a good odd place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeValue {
    pub place: PrimeClass<BigInt>,
    pub value: GaussInt,
}

impl HeckeValue {
    /// `χ(𝔭) + conj(χ(𝔭))`.
    pub fn trace(&self) -> BigInt {
        &self.value.re * 2
    }
}

/// `χ(𝔭) = conj((d/π)₄)·π` with `π` the primary generator (`−q` at degree two).
pub fn hecke_at_prime(d: &GaussInt, place: &PrimeClass<BigInt>) -> Result<HeckeValue> {
    check_good(d, place)?;
    let pi = &place.generator;
    let s = quartic_symbol(d, pi)?.conj();
    Ok(HeckeValue { place: place.clone(), value: &s.to_gaussian() * pi })
}

/// Compares the brute-force count with the trace formula. At degree-two places
/// the expected count is `q²+1+2q`, `q²+1−2q` or `q²+1` as `d` is a fourth
/// power, a square but not a fourth power, or a non-square in `F_{q²}`.
pub fn verify_trace(d: &GaussInt, place: &PrimeClass<BigInt>, cap: u64) -> Result<bool> {
    let count = BigInt::from(count_points(d, place, cap)?);
    let n = place.norm();
    let expected = match place.kind {
        PrimeKind::DegreeOne => &n + 1 - hecke_at_prime(d, place)?.trace(),
        PrimeKind::DegreeTwo => {
            let field = Fq2 { q: place.residue_characteristic.to_u64().unwrap() };
            let q = field.q;
            let r = field.pow(field.reduce(d), (q * q - 1) / 4);
            let qb = BigInt::from(q);
            if r == (1, 0) {
                &n + 1 + &qb * 2
            } else if r == (q - 1, 0) {
                &n + 1 - &qb * 2
            } else {
                &n + 1
            }
        }
        PrimeKind::Even => unreachable!(),
    };
    Ok(count == expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussint::{classify_prime, primary_primes_up_to_norm};
    use num_traits::Zero;

    fn g(re: i64, im: i64) -> GaussInt {
        GaussInt::from_i64(re, im)
    }

    fn place(re: i64, im: i64) -> PrimeClass<BigInt> {
        classify_prime(&g(re, im)).unwrap()
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_points(&g(1, 0), &place(-1, 2), POINT_COUNT_CAP).unwrap(), 8);
        assert_eq!(count_points(&g(1, 0), &place(-3, 0), POINT_COUNT_CAP).unwrap(), 16);
        let c = count_points(&g(1, 0), &place(3, 2), POINT_COUNT_CAP).unwrap() as f64;
        assert!((14.0 - c).abs() <= 2.0 * 13f64.sqrt());
    }

    #[test]
    fn count_errors() {
        assert!(matches!(count_points(&g(5, 0), &place(-1, 2), 100), Err(Error::BadReduction { .. })));
        assert!(matches!(count_points(&g(1, 0), &place(1, 1), 100), Err(Error::BadReduction { .. })));
        assert!(matches!(count_points(&g(1, 0), &place(-11, 0), 100), Err(Error::EffortBound { .. })));
    }

    #[test]
    fn hecke_examples() {
        assert_eq!(hecke_at_prime(&g(1, 0), &place(-1, 2)).unwrap().value, g(-1, 2));
        assert_eq!(hecke_at_prime(&g(1, 0), &place(-3, 0)).unwrap().value, g(-3, 0));
        for pi in primary_primes_up_to_norm::<BigInt>(500).unwrap().into_iter().filter(|p| !p.im.is_zero()) {
            let v = hecke_at_prime(&g(0, 1), &classify_prime(&pi).unwrap()).unwrap();
            let want = crate::symbols::supplement_i(&pi).conj();
            assert_eq!(v.value, &want.to_gaussian() * &pi);
        }
    }

    #[test]
    fn embedding_sends_i_to_a_root_of_minus_one() {
        for pi in primary_primes_up_to_norm::<BigInt>(2000).unwrap().into_iter().filter(|p| !p.im.is_zero()) {
            let p = pi.norm().to_u64().unwrap();
            let u = residue_of_i(&pi);
            assert_eq!(mul_mod(u, u, p), p - 1);
            assert_eq!(reduce_degree_one(&pi, p, u), 0);
        }
    }

    #[test]
    fn trace_formula_and_weil_bound() {
        for d in [g(1, 0), g(0, 1), g(-1, 2), g(-3, 0), g(2, 5)] {
            for pi in primary_primes_up_to_norm::<BigInt>(600).unwrap() {
                let v = classify_prime(&pi).unwrap();
                if pi.divides(&d) {
                    continue;
                }
                assert!(verify_trace(&d, &v, POINT_COUNT_CAP).unwrap(), "d = {d}, pi = {pi}");
                let n = v.norm().to_f64().unwrap();
                let c = count_points(&d, &v, POINT_COUNT_CAP).unwrap() as f64;
                assert!((n + 1.0 - c).abs() <= 2.0 * n.sqrt() + 1e-9);
                let chi = hecke_at_prime(&d, &v).unwrap().value;
                assert_eq!(chi.norm(), v.norm());
            }
        }
    }

    #[test]
    fn fourth_power_twists_leave_chi_unchanged() {
        let d = g(-1, 2);
        for x in [g(3, 0), g(2, 1), g(1, 4)] {
            let dx = &x.pow(4) * &d;
            for pi in primary_primes_up_to_norm::<BigInt>(300).unwrap() {
                if pi.divides(&dx) || !pi.is_coprime(&x) {
                    continue;
                }
                let v = classify_prime(&pi).unwrap();
                assert_eq!(hecke_at_prime(&dx, &v).unwrap(), hecke_at_prime(&d, &v).unwrap());
            }
        }
    }
}
