//! Complex helpers generic over [`RealScalar`]: roots of unity with exact
//! argument reduction, compensated sums, principal square roots on the unit
//! circle and snapping to cosets of `μ₄`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::scalar::RealScalar;
use crate::symbols::Mu4;

/// Tolerance used for every unit-circle and agreement check.
pub const TOLERANCE: f64 = 1e-9;

/// `(cos x, sin x)` by Taylor series; intended for `|x| <= π/4`.
fn sin_cos_small<F: RealScalar>(x: F) -> (F, F) {
    let eps = F::series_cutoff();
    let x2 = x * x;
    let (mut s, mut c) = (x, F::one());
    let (mut ts, mut tc) = (x, F::one());
    let mut k = 1i64;
    loop {
        tc = (-tc * x2).quot(F::from_i64((2 * k - 1) * (2 * k)));
        ts = (-ts * x2).quot(F::from_i64((2 * k) * (2 * k + 1)));
        c = c + tc;
        s = s + ts;
        if tc.abs() < eps && ts.abs() < eps {
            break;
        }
        k += 1;
    }
    (c, s)
}

/// `e^{2πi·num/den}`. The quadrant is split off in exact integer arithmetic,
/// so the series only ever sees angles in `[−π/4, π/4]`.
pub fn unit_root<F: RealScalar>(num: i128, den: u64) -> Complex<F> {
    assert!(den > 0);
    let den_i = den as i128;
    let r = num.rem_euclid(den_i);
    let mut k = (4 * r) / den_i;
    let mut rem = 4 * r - k * den_i;
    if 2 * rem > den_i {
        k += 1;
        rem -= den_i;
    }
    if rem == 0 {
        return Mu4::new(k as i64).to_complex();
    }
    let alpha = (F::FRAC_PI_2() * F::from_i64(rem as i64)).quot(F::from_i64(den as i64));
    let (c, s) = sin_cos_small(alpha);
    Mu4::new(k as i64).to_complex::<F>() * Complex::new(c, s)
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug)]
pub struct CompensatedSum<F> {
    sum: Complex<F>,
    comp: Complex<F>,
}

fn two_sum<F: RealScalar>(s: F, c: F, x: F) -> (F, F) {
    let t = s + x;
    let c = if s.abs() >= x.abs() { c + ((s - t) + x) } else { c + ((x - t) + s) };
    (t, c)
}

impl<F: RealScalar> Default for CompensatedSum<F> {
    fn default() -> Self {
        let z = Complex::new(F::zero(), F::zero());
        Self { sum: z, comp: z }
    }
}

impl<F: RealScalar> CompensatedSum<F> {
    pub fn add(&mut self, x: Complex<F>) {
        let (re, cre) = two_sum(self.sum.re, self.comp.re, x.re);
        let (im, cim) = two_sum(self.sum.im, self.comp.im, x.im);
        self.sum = Complex::new(re, im);
        self.comp = Complex::new(cre, cim);
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> Complex<F> {
        self.sum + self.comp
    }
}

const CHUNK: usize = 4096;

/// `Σ_{j<n} term(j)`, summed in fixed-size chunks that are merged in index
/// order, so the result does not depend on the thread count.
pub fn ordered_sum<F, G>(n: usize, term: G) -> Complex<F>
where
    F: RealScalar,
    G: Fn(usize) -> Complex<F> + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<CompensatedSum<F>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = CompensatedSum::default();
            for j in c * CHUNK..((c + 1) * CHUNK).min(n) {
                acc.add(term(j));
            }
            acc
        })
        .collect();
    let mut total = CompensatedSum::default();
    for p in &partial {
        total.merge(p);
    }
    total.value()
}

pub fn abs<F: RealScalar>(z: Complex<F>) -> F {
    (z.re * z.re + z.im * z.im).sqrt()
}

pub fn normalize<F: RealScalar>(z: Complex<F>) -> Complex<F> {
    let r = abs(z);
    Complex::new(z.re.quot(r), z.im.quot(r))
}

/// Principal square root of a point on the unit circle, with argument taken
/// in `(−π, π]`; computed without trigonometric functions.
pub fn unit_sqrt<F: RealScalar>(z: Complex<F>) -> Complex<F> {
    let two = F::from_i64(2);
    let re = (F::one() + z.re).quot(two).max(F::zero()).sqrt();
    let im = (F::one() - z.re).quot(two).max(F::zero()).sqrt();
    if z.im < F::zero() {
        Complex::new(re, -im)
    } else {
        Complex::new(re, im)
    }
}

/// `z^k` for integer `k` (negative powers use the conjugate).
pub fn unit_powi<F: RealScalar>(z: Complex<F>, k: i64) -> Complex<F> {
    let base = if k < 0 { z.conj() } else { z };
    let mut acc = Complex::new(F::one(), F::zero());
    for _ in 0..k.unsigned_abs() {
        acc = acc * base;
    }
    acc
}

pub fn dist<F: RealScalar>(a: Complex<F>, b: Complex<F>) -> f64 {
    abs(a - b).to_f64()
}

/// The `ζ ∈ μ₄` with `|z − ζ·base| < tol`, if any.
pub fn snap_mu4<F: RealScalar>(z: Complex<F>, base: Complex<F>, tol: f64) -> Option<Mu4> {
    Mu4::ALL.into_iter().find(|k| dist(z, k.to_complex::<F>() * base) < tol)
}

pub fn to_c64<F: RealScalar>(z: Complex<F>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use twofloat::TwoFloat;

    #[test]
    fn roots_of_unity_f64() {
        for den in [1u64, 2, 3, 5, 7, 8, 12, 97, 1000] {
            for num in -3..(2 * den as i128) {
                let z: Complex<f64> = unit_root(num, den);
                let t = std::f64::consts::TAU * num as f64 / den as f64;
                assert!((z.re - t.cos()).abs() < 1e-14 && (z.im - t.sin()).abs() < 1e-14, "{num}/{den}");
            }
        }
        assert_eq!(unit_root::<f64>(1, 4), Complex::new(0.0, 1.0));
    }

    #[test]
    fn roots_of_unity_double_double() {
        // e^{2πi/12} = (√3/2, 1/2); e^{2πi/8} = (1/√2, 1/√2)
        let z: Complex<TwoFloat> = unit_root(1, 12);
        let half = TwoFloat::from(0.5);
        let s3 = TwoFloat::from(3.0).sqrt() * half;
        assert!((z.re - s3).abs().to_f64() < 1e-30, "{:?}", z.re - s3);
        assert!((z.im - half).abs().to_f64() < 1e-30);
        let w: Complex<TwoFloat> = unit_root(-7, 8);
        let r2 = TwoFloat::from(0.5).sqrt();
        assert!((w.re - r2).abs().to_f64() < 1e-30 && (w.im - r2).abs().to_f64() < 1e-30);
        // |z| = 1 to working precision for a large denominator
        let u: Complex<TwoFloat> = unit_root(123_456_789, 1_000_000_007);
        let n = u.re * u.re + u.im * u.im - TwoFloat::from(1.0);
        assert!(n.abs().to_f64() < 1e-30);
    }

    #[test]
    fn double_double_division_is_exact_to_working_precision() {
        let one = TwoFloat::from(1.0);
        let third = one.quot(TwoFloat::from(3.0));
        assert!((third * TwoFloat::from(3.0) - one).abs().to_f64() < 1e-31);
        let x = TwoFloat::from(1e8).quot(TwoFloat::from(7.0) + TwoFloat::from(1e-20));
        assert!((x * (TwoFloat::from(7.0) + TwoFloat::from(1e-20)) - TwoFloat::from(1e8)).abs().to_f64() < 1e-22);
    }

    #[test]
    fn compensated_sum_of_roots_vanishes() {
        let s: Complex<TwoFloat> = ordered_sum(10_007, |j| unit_root(j as i128, 10_007));
        assert!(abs(s).to_f64() < 1e-26);
        let s: Complex<f64> = ordered_sum(10_007, |j| unit_root(j as i128, 10_007));
        assert!(abs(s) < 1e-11);
    }

    #[test]
    fn principal_square_root() {
        for k in 0..64 {
            let z: Complex<f64> = unit_root(2 * k + 1, 128);
            let r = unit_sqrt(z);
            assert!(dist(r * r, z) < 1e-14);
            assert!(r.re >= 0.0);
        }
        let r = unit_sqrt(Complex::new(-1.0f64, 0.0));
        assert!(dist(r, Complex::new(0.0, 1.0)) < 1e-15);
    }

    #[test]
    fn snapping() {
        let base: Complex<f64> = unit_root(1, 7);
        let z = Mu4::MINUS_I.to_complex::<f64>() * base;
        assert_eq!(snap_mu4(z, base, TOLERANCE), Some(Mu4::MINUS_I));
        assert_eq!(snap_mu4(z, unit_root(1, 9), TOLERANCE), None);
        assert_eq!(unit_powi(base, -3), unit_powi(base.conj(), 3));
    }
}
