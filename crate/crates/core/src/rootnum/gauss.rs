//! Normalized Gauss sums `G(χ^v)` at odd places of bad reduction, where the
//! conductor exponent is 1 and the sum runs over the residue field.
//!
//! With `n = v(d)`, `(χ^v)^{-1}` restricted to units is
//! `ε_v(x) = conj((x/π)₄^n)`. At a degree-one place over `p` we take
//! `β = p` and `x ↦ e^{2πi·x/p}`, with `x` read in `F_p` through the embedding
//! `i ↦ u`, `π | i − u`. At a degree-two place we take `β = q` and
//! `x ↦ e^{2πi·tr(x)/q}`, `tr(a + bi) = 2a`.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::ToPrimitive;

use crate::arith::{self, mul_mod, pow_mod, FactorConfig};
use crate::error::{Error, Result};
use crate::gaussint::{PrimeClass, PrimeKind};
use crate::hecke::{residue_of_i, Fq2};
use crate::numeric::{ordered_sum, unit_root};
use crate::scalar::RealScalar;
use crate::symbols::Mu4;

/// Largest residue field for which a Gauss sum is evaluated.
pub const GAUSS_SUM_CAP: u64 = 20_000_000;

fn field_size(place: &PrimeClass<BigInt>, cap: u64) -> Result<u64> {
    let n = place.norm();
    match n.to_u64() {
        Some(v) if v <= cap => Ok(v),
        _ => Err(Error::EffortBound { what: "residue field size", value: n.to_string(), cap: cap.to_string() }),
    }
}

fn scale<F: RealScalar>(z: Complex<F>, field: u64) -> Complex<F> {
    // q^{-a/2} with a = 1 and q the residue field size
    let r = F::from_i64(field as i64).sqrt();
    Complex::new(z.re.quot(r), z.im.quot(r))
}

/// `k` with `(g/π)₄ = i^k`, read off `g^{(p−1)/4} ≡ u^k (mod p)`.
fn index_of_symbol(g: u64, p: u64, u: u64) -> u8 {
    let t = pow_mod(g, (p - 1) / 4, p);
    let mut w = 1u64;
    for k in 0..4u8 {
        if w == t {
            return k;
        }
        w = mul_mod(w, u, p);
    }
    unreachable!("g^((p-1)/4) is a fourth root of unity")
}

/// A generator of `F_{q²}^×` in the model `F_q[t]/(t² + 1)`.
pub fn fq2_generator(field: &Fq2) -> Result<(u64, u64)> {
    let q = field.q;
    let order = q * q - 1;
    let primes: Vec<u64> = arith::factor(&order.into(), &FactorConfig::default())?
        .into_iter()
        .map(|(p, _)| p.to_u64().unwrap())
        .collect();
    for a in 0..q {
        for b in 1..q {
            if primes.iter().all(|r| field.pow((a, b), order / r) != (1, 0)) {
                return Ok((a, b));
            }
        }
    }
    unreachable!("F_{{q²}}^× is cyclic")
}

/// `k` with `x^{(q²−1)/4} = t^k` in `F_{q²}`.
fn fq2_symbol(field: &Fq2, x: (u64, u64)) -> u8 {
    let q = field.q;
    match field.pow(x, (q * q - 1) / 4) {
        (1, 0) => 0,
        (0, 1) => 1,
        (a, 0) if a == q - 1 => 2,
        (0, b) if b == q - 1 => 3,
        other => unreachable!("{other:?} is not a fourth root of unity"),
    }
}

/// `G(χ^v)` for the bad odd place `place` with `n = v(d) ∈ {1, 2, 3}`,
/// summed along powers of a generator of the residue field.
pub fn gauss_sum<F: RealScalar>(place: &PrimeClass<BigInt>, n: u32, cap: u64) -> Result<Complex<F>> {
    check_exponent(place, n)?;
    let size = field_size(place, cap)?;
    match place.kind {
        PrimeKind::DegreeOne => {
            let p = size;
            let u = residue_of_i(&place.generator);
            let g = arith::primitive_root(p);
            let kg = index_of_symbol(g, p, u) as u64;
            let s = ordered_sum((p - 1) as usize, |j| {
                let t = pow_mod(g, j as u64, p);
                let eps = Mu4::new(-((kg * j as u64 * n as u64) as i64));
                eps.to_complex::<F>() * unit_root::<F>(t as i128, p)
            });
            Ok(scale(s, p))
        }
        PrimeKind::DegreeTwo => {
            let field = Fq2 { q: place.residue_characteristic.to_u64().unwrap() };
            let q = field.q;
            let g = fq2_generator(&field)?;
            let kg = fq2_symbol(&field, g) as u64;
            let roots: Vec<Complex<F>> = (0..q).map(|a| unit_root::<F>(2 * a as i128, q)).collect();
            let s = ordered_sum((size - 1) as usize, |j| {
                let x = field.pow(g, j as u64);
                let eps = Mu4::new(-((kg * j as u64 * n as u64) as i64));
                eps.to_complex::<F>() * roots[x.0 as usize]
            });
            Ok(scale(s, size))
        }
        PrimeKind::Even => Err(Error::EvenPlace),
    }
}

/// The same sum taken term by term over residues, each character value
/// computed by its own exponentiation. Used as an independent check.
pub fn gauss_sum_direct<F: RealScalar>(place: &PrimeClass<BigInt>, n: u32, cap: u64) -> Result<Complex<F>> {
    check_exponent(place, n)?;
    let size = field_size(place, cap)?;
    match place.kind {
        PrimeKind::DegreeOne => {
            let p = size;
            let u = residue_of_i(&place.generator);
            let s = ordered_sum((p - 1) as usize, |j| {
                let t = j as u64 + 1;
                let eps = Mu4::new(index_of_symbol(t, p, u) as i64).pow(n as i64).conj();
                eps.to_complex::<F>() * unit_root::<F>(t as i128, p)
            });
            Ok(scale(s, p))
        }
        PrimeKind::DegreeTwo => {
            let field = Fq2 { q: place.residue_characteristic.to_u64().unwrap() };
            let q = field.q;
            let s = ordered_sum((size - 1) as usize, |j| {
                let x = ((j as u64 + 1) % q, (j as u64 + 1) / q);
                let eps = Mu4::new(fq2_symbol(&field, x) as i64).pow(n as i64).conj();
                eps.to_complex::<F>() * unit_root::<F>(2 * x.0 as i128, q)
            });
            Ok(scale(s, size))
        }
        PrimeKind::Even => Err(Error::EvenPlace),
    }
}

fn check_exponent(place: &PrimeClass<BigInt>, n: u32) -> Result<()> {
    if place.kind == PrimeKind::Even {
        return Err(Error::EvenPlace);
    }
    if !(1..=3).contains(&n) {
        return Err(Error::GoodReduction { d: format!("d with v(d) = {n}"), place: place.generator.to_string() });
    }
    Ok(())
}

/// The exact value of `G(χ^v)` at a degree-two place over `q`:
/// `+1` for `n` even and `(−1)^{(q+1)/4}` for `n` odd.
pub fn degree_two_gauss_sign(q: u64, n: u32) -> i8 {
    if n.is_multiple_of(2) || ((q + 1) / 4).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussint::{classify_prime, primary_primes_up_to_norm};
    use crate::numeric::{abs, dist, normalize, snap_mu4, unit_sqrt, TOLERANCE};
    use crate::GaussInt;
    use num_traits::Zero;
    use twofloat::TwoFloat;

    fn degree_one_places(bound: u64) -> Vec<PrimeClass<BigInt>> {
        primary_primes_up_to_norm::<BigInt>(bound)
            .unwrap()
            .into_iter()
            .filter(|p| !p.im.is_zero())
            .map(|p| classify_prime(&p).unwrap())
            .collect()
    }

    #[test]
    fn unit_modulus_and_routes_agree() {
        for v in degree_one_places(400) {
            for n in 1..=3 {
                let a: Complex<f64> = gauss_sum(&v, n, GAUSS_SUM_CAP).unwrap();
                let b: Complex<f64> = gauss_sum_direct(&v, n, GAUSS_SUM_CAP).unwrap();
                assert!((abs(a) - 1.0).abs() < 1e-12);
                assert!(dist(a, b) < 1e-12, "{} n={n}", v.generator);
            }
        }
        for q in [3i64, 7, 11, 19, 23] {
            let v = classify_prime(&GaussInt::from_i64(-q, 0)).unwrap();
            for n in 1..=3 {
                let a: Complex<f64> = gauss_sum(&v, n, GAUSS_SUM_CAP).unwrap();
                let b: Complex<f64> = gauss_sum_direct(&v, n, GAUSS_SUM_CAP).unwrap();
                assert!(dist(a, b) < 1e-12);
            }
        }
    }

    #[test]
    fn degree_one_cosets() {
        // G lies in μ₄·s^{n−2} with s the principal root of π/|π|
        for v in degree_one_places(2000) {
            let s = unit_sqrt(normalize(v.generator.to_complex::<f64>()));
            for n in 1..=3u32 {
                let gsum: Complex<f64> = gauss_sum(&v, n, GAUSS_SUM_CAP).unwrap();
                let base = crate::numeric::unit_powi(s, n as i64 - 2);
                assert!(snap_mu4(gsum, base, TOLERANCE).is_some(), "{} n={n}", v.generator);
            }
            let quad: Complex<f64> = gauss_sum(&v, 2, GAUSS_SUM_CAP).unwrap();
            assert!(dist(quad, Complex::new(1.0, 0.0)) < 1e-12);
        }
    }

    #[test]
    fn degree_two_signs() {
        for q in [3u64, 7, 11, 19, 23, 31, 43, 47] {
            let v = classify_prime(&GaussInt::from_i64(-(q as i64), 0)).unwrap();
            for n in 1..=3 {
                let gsum: Complex<f64> = gauss_sum(&v, n, GAUSS_SUM_CAP).unwrap();
                let want = degree_two_gauss_sign(q, n) as f64;
                assert!(dist(gsum, Complex::new(want, 0.0)) < 1e-10, "q={q} n={n}: {gsum}");
            }
        }
    }

    #[test]
    fn swapping_the_embedding_conjugates() {
        // replacing π by conj(π) swaps u and −u, which conjugates G up to ε(−1)
        for v in degree_one_places(300) {
            let w = classify_prime(&v.generator.conj().primary_associate().unwrap().1).unwrap();
            for n in 1..=3u32 {
                let a: Complex<f64> = gauss_sum(&v, n, GAUSS_SUM_CAP).unwrap();
                let b: Complex<f64> = gauss_sum(&w, n, GAUSS_SUM_CAP).unwrap();
                let sign = if n % 2 == 1 && (v.norm() - 1u32) % 8u32 != BigInt::zero() { -1.0 } else { 1.0 };
                assert!(dist(a.conj() * sign, b) < 1e-12);
            }
        }
    }

    #[test]
    fn double_double_agrees() {
        for v in degree_one_places(200) {
            let a: Complex<TwoFloat> = gauss_sum(&v, 1, GAUSS_SUM_CAP).unwrap();
            let b: Complex<f64> = gauss_sum(&v, 1, GAUSS_SUM_CAP).unwrap();
            assert!(dist(crate::numeric::to_c64(a), b) < 1e-13);
            let m = abs(a) - TwoFloat::from(1.0);
            assert!(m.abs().to_f64() < 1e-28);
        }
    }

    #[test]
    fn errors() {
        let v = classify_prime(&GaussInt::from_i64(-1, 2)).unwrap();
        assert!(matches!(gauss_sum::<f64>(&v, 0, GAUSS_SUM_CAP), Err(Error::GoodReduction { .. })));
        assert!(matches!(gauss_sum::<f64>(&v, 1, 4), Err(Error::EffortBound { .. })));
        let e = classify_prime(&GaussInt::from_i64(1, 1)).unwrap();
        assert!(matches!(gauss_sum::<f64>(&e, 1, GAUSS_SUM_CAP), Err(Error::EvenPlace)));
    }
}
