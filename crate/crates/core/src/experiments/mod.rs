//! Desk-scale enumerations: the family `𝒬(X)`, density of local root numbers
//! on the circle, unit-twist tables, many curves sharing a local root number,
//! the averaging sweep and the Mertens-product exponent fit.

pub mod average;
pub mod mertens;
pub mod report;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use average::{average_report, average_sweep, pattern_factor, reduced_ratio, SweepReport, SweepRow};
pub use mertens::{mertens_fit, mertens_report, MertensFit};
pub use report::Report;

use crate::curves::CurveClass;
use crate::error::{Error, Result};
use crate::gaussint::{classify_prime, primary_primes_up_to_norm, PrimeKind};
use crate::numeric::{dist, unit_root};
use crate::rootnum::{local_root_number, Certificate, Place, RootConfig};
use crate::scalar::RealScalar;
use crate::sieve;
use crate::symbols::{quartic_symbol, Mu4};
use crate::GaussInt;

/// `Q = ∏(−q_j)` over distinct primes `q_j ≡ 3 (mod 4)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QMember {
    pub value: i64,
    pub primes: Vec<u64>,
}

impl QMember {
    pub fn to_gaussian(&self) -> GaussInt {
        GaussInt::from_i64(self.value, 0)
    }
}

/// `𝒬(X)`, ordered by `|Q|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QFamily {
    pub x: u64,
    pub members: Vec<QMember>,
}

/// Depth-first enumeration of `𝒬(X)`. The empty product `Q = 1` is included
/// unless `exclude_unit` is set.
pub fn enumerate_q(x: u64, exclude_unit: bool) -> Result<QFamily> {
    if x < 1 {
        return Err(Error::InvalidArgument("X must be at least 1".into()));
    }
    let primes = sieve::primes_in_progression(x, 3, 4)?;
    let mut members = Vec::new();
    let mut stack = Vec::new();
    fn dfs(primes: &[u64], start: usize, x: u64, prod: u64, stack: &mut Vec<u64>, out: &mut Vec<QMember>) {
        for (i, &q) in primes.iter().enumerate().skip(start) {
            if prod * q > x {
                break;
            }
            stack.push(q);
            let sign = if stack.len() % 2 == 1 { -1 } else { 1 };
            out.push(QMember { value: sign * (prod * q) as i64, primes: stack.clone() });
            dfs(primes, i + 1, x, prod * q, stack, out);
            stack.pop();
        }
    }
    if !exclude_unit {
        members.push(QMember { value: 1, primes: Vec::new() });
    }
    dfs(&primes, 0, x, 1, &mut stack, &mut members);
    members.sort_by(|a, b| a.value.abs().cmp(&b.value.abs()).then(a.value.cmp(&b.value)));
    Ok(QFamily { x, members })
}

/// A curve and place whose local root number lies in the requested ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub d: GaussInt,
    pub place: GaussInt,
    pub m: u8,
    pub w_re: f64,
    pub w_im: f64,
    pub certificate: Certificate,
    pub distance: f64,
}

fn sort_norm_arg(v: &mut [GaussInt]) {
    v.sort_by(|a, b| a.norm().cmp(&b.norm()).then_with(|| a.cmp_arg(b)));
}

/// Primary degree-one primes `π ≡ 3 + 2i (mod 4)` with `N(π) <= bound`,
/// ordered by norm then argument.
pub fn three_plus_two_i_primes(bound: u64) -> Result<Vec<GaussInt>> {
    let mut v: Vec<GaussInt> = primary_primes_up_to_norm::<BigInt>(bound)?
        .into_iter()
        .filter(|p| !p.im.is_zero() && p.is_three_plus_two_i_mod4())
        .collect();
    sort_norm_arg(&mut v);
    Ok(v)
}

/// The first `w_π(χ_{i^m π})`, scanning `π` by norm and `m = 0..3`, with
/// `|w − e^{iθ}| < eps`.
pub fn density_scan<F: RealScalar>(theta: f64, eps: f64, bound: u64, cfg: &RootConfig) -> Result<Witness> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let target = Complex::from_polar(1.0, theta);
    for pi in three_plus_two_i_primes(bound)? {
        let place = Place::of_prime(&pi)?;
        for m in 0..4u8 {
            let d = pi.mul_unit(m as i64);
            let w = local_root_number::<F>(&CurveClass::new(&d)?, &place, cfg)?;
            let z = w.to_c64();
            let distance = (z - target).norm();
            if distance < eps {
                return Ok(Witness {
                    d,
                    place: pi,
                    m,
                    w_re: z.re,
                    w_im: z.im,
                    certificate: w.certificate.expect("degree-one places are certified"),
                    distance,
                });
            }
        }
    }
    Err(Error::SearchExhausted { largest_norm: bound.to_string() })
}

/// `w_π(χ_{i^m π}) / w_π(χ_π)` for `m = 0..3`, exact.
pub fn unit_twist_table(pi: &GaussInt, cfg: &RootConfig) -> Result<[Mu4; 4]> {
    let v = classify_prime(pi)?;
    if v.kind != PrimeKind::DegreeOne || v.generator != *pi || !pi.is_three_plus_two_i_mod4() {
        return Err(Error::InvalidArgument(format!("{pi} is not a primary degree-one prime ≡ 3+2i mod 4")));
    }
    let place = Place::Finite(v);
    let cert = |m: i64| -> Result<Certificate> {
        let w = local_root_number::<f64>(&CurveClass::new(&pi.mul_unit(m))?, &place, cfg)?;
        Ok(w.certificate.expect("degree-one places are certified"))
    };
    let base = cert(0)?;
    let mut out = [Mu4::ONE; 4];
    for m in 0..4 {
        out[m as usize] = cert(m)?.ratio(&base).ok_or_else(|| Error::Unsnapped(format!("bases differ at m = {m}")))?;
    }
    Ok(out)
}

/// A twist `E_{xd}` and its local root number at the fixed place.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistWitness {
    pub twist: GaussInt,
    pub class: GaussInt,
    pub certificate: Certificate,
    pub w_re: f64,
    pub w_im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManyTheta {
    pub base: TwistWitness,
    pub witnesses: Vec<TwistWitness>,
}

impl ManyTheta {
    /// Every witness has the base certificate and bit-identical numeric value.
    pub fn all_identical(&self) -> bool {
        let b = &self.base;
        self.witnesses.iter().all(|w| {
            w.certificate == b.certificate && w.w_re.to_bits() == b.w_re.to_bits() && w.w_im.to_bits() == b.w_im.to_bits()
        })
    }

    pub fn distinct_classes(&self) -> usize {
        let mut c: Vec<&GaussInt> = self.witnesses.iter().map(|w| &w.class).collect();
        c.sort();
        c.dedup();
        c.len()
    }
}

/// `count` pairwise distinct classes `E` meant to share `w_v(χ_E) = w_v(χ_d)`:
/// twists by `−q'` at a degree-two place, by `(−q)²` with `(−q/π)₄ = −1` at a
/// degree-one place, `q, q'` rational primes `≡ 3 (mod 4)` coprime to `d`.
pub fn many_theta_witnesses(d: &GaussInt, v: &GaussInt, count: usize, q_bound: u64, cfg: &RootConfig) -> Result<ManyTheta> {
    let base = CurveClass::new(d)?;
    let vc = classify_prime(v)?;
    let place = Place::Finite(vc.clone());
    let witness = |twist: GaussInt, class: &CurveClass| -> Result<TwistWitness> {
        let w = local_root_number::<f64>(class, &place, cfg)?;
        let z = w.to_c64();
        Ok(TwistWitness { twist, class: class.d.clone(), certificate: w.certificate.expect("closed forms are certified"), w_re: z.re, w_im: z.im })
    };
    let base_w = witness(GaussInt::one(), &base)?;
    let mut out: Vec<TwistWitness> = Vec::new();
    for q in sieve::primes_in_progression(q_bound, 3, 4)? {
        if out.len() == count {
            break;
        }
        let mq = GaussInt::from_i64(-(q as i64), 0);
        if !mq.is_coprime(&base.d) || mq.is_associate(&vc.generator) {
            continue;
        }
        let twist = match vc.kind {
            PrimeKind::DegreeTwo => mq,
            PrimeKind::DegreeOne if quartic_symbol(&mq, &vc.generator)? == Mu4::MINUS_ONE => mq.pow(2),
            PrimeKind::DegreeOne => continue,
            PrimeKind::Even => return Err(Error::EvenPlace),
        };
        let class = base.twist(&twist)?;
        if out.iter().any(|w| w.class == class.d) {
            continue;
        }
        out.push(witness(twist, &class)?);
    }
    if out.len() < count {
        return Err(Error::SearchExhausted { largest_norm: (q_bound as u128 * q_bound as u128).to_string() });
    }
    Ok(ManyTheta { base: base_w, witnesses: out })
}

fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Runs `density_scan` over the grid `θ = 2πk/points`.
pub fn density_report<F: RealScalar>(points: u32, eps: f64, bound: u64, cfg: &RootConfig) -> Result<Report> {
    let mut r = Report::new("density", F::DIGITS, &["k", "theta", "d", "place", "m", "w_re", "w_im", "distance", "certificate"]);
    r.param("points", points);
    r.param("eps", eps);
    r.param("norm_bound", bound);
    let mut found = 0;
    let mut worst = 0.0f64;
    for k in 0..points {
        let theta = std::f64::consts::TAU * k as f64 / points as f64;
        match density_scan::<F>(theta, eps, bound, cfg) {
            Ok(w) => {
                found += 1;
                let target: Complex<f64> = unit_root(k as i128, points as u64);
                worst = worst.max(dist(Complex::new(w.w_re, w.w_im), target));
                r.row(vec![
                    k.to_string(),
                    report::fmt_f64(theta),
                    w.d.to_string(),
                    w.place.to_string(),
                    w.m.to_string(),
                    report::fmt_f64(w.w_re),
                    report::fmt_f64(w.w_im),
                    report::fmt_f64(w.distance),
                    w.certificate.to_string(),
                ]);
            }
            Err(Error::SearchExhausted { .. }) => {
                r.row(vec![k.to_string(), report::fmt_f64(theta), "".into(), "".into(), "".into(), "".into(), "".into(), "".into(), "".into()]);
            }
            Err(e) => return Err(e),
        }
    }
    r.check("all grid points have a witness", found == points, format!("{found}/{points}"));
    r.check("witnesses lie in their balls", cmp_f64(worst, eps) == Ordering::Less, format!("max distance {worst:.3e}"));
    Ok(r)
}

/// Unit-twist ratios for every `π ≡ 3 + 2i (mod 4)` with `N(π) <= bound`.
pub fn nusym_report(bound: u64, cfg: &RootConfig) -> Result<Report> {
    let mut r = Report::new("nusym", 15, &["pi", "norm", "ratio_0", "ratio_1", "ratio_2", "ratio_3"]);
    r.param("norm_bound", bound);
    let mut bad = Vec::new();
    let primes = three_plus_two_i_primes(bound)?;
    for pi in &primes {
        let t = unit_twist_table(pi, cfg)?;
        let mut s = t.to_vec();
        s.sort();
        if s != Mu4::ALL.to_vec() {
            bad.push(pi.to_string());
        }
        let mut row = vec![pi.to_string(), pi.norm().to_string()];
        row.extend(t.iter().map(|z| z.to_string()));
        r.row(row);
    }
    r.check("each ratio set equals μ₄", bad.is_empty(), format!("{} primes, failures: {:?}", primes.len(), bad));
    Ok(r)
}

/// `many_theta_witnesses` for a list of base cases `(d, v)`.
pub fn manytheta_report(cases: &[(GaussInt, GaussInt)], count: usize, q_bound: u64, cfg: &RootConfig) -> Result<Report> {
    let mut r = Report::new("manytheta", 15, &["d", "place", "twist", "class", "w_re", "w_im", "certificate"]);
    r.param("count", count);
    r.param("q_bound", q_bound);
    for (d, v) in cases {
        let name = format!("{count} distinct classes with identical w_v for ({d}, {v})");
        match many_theta_witnesses(d, v, count, q_bound, cfg) {
            Ok(mt) => {
                r.check(&name, mt.distinct_classes() == count && mt.all_identical(), format!("w_v = {}", mt.base.certificate));
                for w in std::iter::once(&mt.base).chain(&mt.witnesses) {
                    r.row(vec![
                        d.to_string(),
                        v.to_string(),
                        w.twist.to_string(),
                        w.class.to_string(),
                        report::fmt_f64(w.w_re),
                        report::fmt_f64(w.w_im),
                        w.certificate.to_string(),
                    ]);
                }
            }
            Err(e) => r.check(&name, false, e),
        }
    }
    Ok(r)
}

/// Counts `𝒬(X)` by filtering squarefree integers, for cross-checks.
pub fn recount_q(x: u64, exclude_unit: bool) -> usize {
    fn admissible(mut k: u64) -> bool {
        let mut p = 2;
        while p * p <= k {
            if k.is_multiple_of(p) {
                k /= p;
                if k.is_multiple_of(p) || p % 4 != 3 {
                    return false;
                }
            }
            p += 1;
        }
        k % 4 == 3
    }
    usize::from(!exclude_unit) + (2..=x).filter(|&m| admissible(m)).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(x: u64) -> Vec<i64> {
        let mut v: Vec<i64> = enumerate_q(x, false).unwrap().members.iter().map(|m| m.value).collect();
        v.sort();
        v
    }

    #[test]
    fn q_family_examples() {
        assert_eq!(values(10), vec![-7, -3, 1]);
        assert_eq!(values(25), vec![-23, -19, -11, -7, -3, 1, 21]);
        assert_eq!(enumerate_q(25, true).unwrap().members.len(), 6);
        for m in enumerate_q(5000, false).unwrap().members {
            let sign = if m.primes.len() % 2 == 0 { 1 } else { -1 };
            assert_eq!(m.value.signum(), sign);
            assert_eq!(m.value.rem_euclid(4), 1);
        }
    }

    #[test]
    fn q_family_recount() {
        for x in [1u64, 10, 25, 100, 1000, 10_000] {
            assert_eq!(enumerate_q(x, false).unwrap().members.len(), recount_q(x, false), "X = {x}");
            assert_eq!(enumerate_q(x, true).unwrap().members.len(), recount_q(x, true));
        }
    }

    #[test]
    fn density_examples() {
        let cfg = RootConfig::default();
        let w = density_scan::<f64>(0.0, 2.0, 1000, &cfg).unwrap();
        assert_eq!(w.place, three_plus_two_i_primes(1000).unwrap()[0]);
        let w = density_scan::<f64>(-std::f64::consts::FRAC_PI_2, 1e-6, 1000, &cfg);
        if let Ok(w) = w {
            assert!(w.distance < 1e-6);
        }
        assert!(matches!(density_scan::<f64>(1.0, 1e-12, 50, &cfg), Err(Error::SearchExhausted { .. })));
    }

    #[test]
    fn twist_table() {
        let t = unit_twist_table(&GaussInt::from_i64(3, 2), &RootConfig::default()).unwrap();
        assert_eq!(t[0], Mu4::ONE);
        for m in 0..4 {
            assert_eq!(t[m], t[1].pow(m as i64));
        }
        assert!(unit_twist_table(&GaussInt::from_i64(5, 4), &RootConfig::default()).is_err());
    }

    #[test]
    fn many_theta_both_branches() {
        let cfg = RootConfig::default();
        let mt = many_theta_witnesses(&GaussInt::from_i64(-3, 0), &GaussInt::from_i64(-3, 0), 5, 1000, &cfg).unwrap();
        assert_eq!(mt.distinct_classes(), 5);
        assert!(mt.all_identical());
        let pi = GaussInt::from_i64(-1, 2);
        let mt = many_theta_witnesses(&pi, &pi, 5, 2000, &cfg).unwrap();
        assert!(mt.all_identical());
        for w in &mt.witnesses {
            let q = -w.twist.re.sqrt();
            let mq = GaussInt::new(q, BigInt::zero());
            assert_eq!(quartic_symbol(&mq, &pi).unwrap(), Mu4::MINUS_ONE);
        }
    }
}
