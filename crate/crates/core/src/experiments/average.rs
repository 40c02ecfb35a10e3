//! The mean of `w(χ_{dQ})/w₂(χ_{dQ})` over `Q ∈ 𝒬(X)`, with the reduced
//! product formula as an exact cross-check.

use num_complex::Complex;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{self, Report};
use super::{enumerate_q, QMember};
use crate::curves::CurveClass;
use crate::error::{Error, Result};
use crate::gaussint::PrimeKind;
use crate::numeric::{abs, to_c64, CompensatedSum, TOLERANCE};
use crate::rootnum::gauss::degree_two_gauss_sign;
use crate::rootnum::{global_root_ratio, local_root_number, Certificate, Place, RootConfig};
use crate::scalar::RealScalar;
use crate::symbols::{quartic_symbol, Mu4};
use crate::GaussInt;

/// Allowed growth of `|mean|` from one `X` to the next.
pub const TREND_SLACK: f64 = 1.2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: u64,
    pub size: usize,
    pub mean_re: f64,
    pub mean_im: f64,
    pub abs_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub d: GaussInt,
    pub exclude_unit: bool,
    pub rows: Vec<SweepRow>,
    /// Largest `| |term| − 1 |` seen.
    pub modulus_defect: f64,
    /// Members where the reduced formula disagrees with the direct product.
    pub reduced_mismatches: Vec<i64>,
}

impl SweepReport {
    pub fn weakly_decreasing(&self, slack: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].abs_mean <= slack * w[0].abs_mean)
    }
}

/// Rejects `d` unless it is `∏ π_i · ∏ (−q_j)^{n_j}` with distinct primary
/// degree-one `π_i`.
fn check_shape(class: &CurveClass) -> Result<()> {
    if class.fact.n_u != 0 || class.fact.n_2 != 0 {
        return Err(Error::ShapeViolation(format!(
            "{} has unit part i^{} and (1+i)-exponent {}",
            class.d, class.fact.n_u, class.fact.n_2
        )));
    }
    for v in class.bad_odd_places() {
        let n = class.valuation(&v.generator);
        if v.kind == PrimeKind::DegreeOne && n != 1 {
            return Err(Error::ShapeViolation(format!("{} divides {} to the power {n}", v.generator, class.d)));
        }
    }
    Ok(())
}

fn gauss_mu4(q: &GaussInt, n: u32) -> Mu4 {
    let q = (-q).re.to_u64().expect("q fits u64");
    if degree_two_gauss_sign(q, n) < 0 {
        Mu4::MINUS_ONE
    } else {
        Mu4::ONE
    }
}

/// `w(χ_{dQ})/w₂(χ_{dQ})` rebuilt from the local data of `d`:
/// `−i·∏_i w_{π_i}(χ_d)·conj((Q/π_i)₄)` times, at each degree-two place of
/// `dQ`, `−conj((d'/−q)₄)·G` with `d'` the part of `d` prime to `q`.
pub fn reduced_ratio(class: &CurveClass, q: &QMember, cfg: &RootConfig) -> Result<Certificate> {
    check_shape(class)?;
    let big_q = q.to_gaussian();
    let mut acc = Certificate::unit(Mu4::MINUS_I);
    for v in class.bad_odd_places() {
        let n = class.valuation(&v.generator);
        let mq = &v.generator;
        match v.kind {
            PrimeKind::DegreeOne => {
                let w = local_root_number::<f64>(class, &Place::Finite(v.clone()), cfg)?;
                let c = w.certificate.expect("degree-one places are certified");
                acc = acc.mul(&c).mul_unit(quartic_symbol(&big_q, mq)?.conj());
            }
            _ => {
                let q_val = (-mq).re.to_u64().expect("q fits u64");
                let n2 = n + u32::from(q.primes.contains(&q_val));
                if !n2.is_multiple_of(4) {
                    let d1 = class.d.div_exact(&mq.pow(n)).expect("(−q)^n divides d");
                    acc = acc.mul_unit(Mu4::MINUS_ONE * quartic_symbol(&d1, mq)?.conj() * gauss_mu4(mq, n2));
                }
            }
        }
    }
    for &p in &q.primes {
        let mq = GaussInt::from_i64(-(p as i64), 0);
        if class.valuation(&mq) == 0 {
            acc = acc.mul_unit(Mu4::MINUS_ONE * quartic_symbol(&class.d, &mq)?.conj() * gauss_mu4(&mq, 1));
        }
    }
    Ok(acc)
}

/// `∏_{i,t} conj((−q_t/π_i)₄)·∏_t w_{q_t}(χ_{dQ})/w_{q_t}(χ_d)` over the
/// primes `q_t` of `Q` that divide `d`. Depends only on which of them occur.
pub fn pattern_factor(class: &CurveClass, q: &QMember, cfg: &RootConfig) -> Result<Mu4> {
    check_shape(class)?;
    let twisted = class.twist(&q.to_gaussian())?;
    let places = class.bad_odd_places();
    let mut acc = Mu4::ONE;
    for &p in &q.primes {
        let mq = GaussInt::from_i64(-(p as i64), 0);
        if class.valuation(&mq) == 0 {
            continue;
        }
        for v in places.iter().filter(|v| v.kind == PrimeKind::DegreeOne) {
            acc *= quartic_symbol(&mq, &v.generator)?.conj();
        }
        let place = Place::of_prime(&mq)?;
        let a = local_root_number::<f64>(&twisted, &place, cfg)?.certificate.expect("certified");
        let b = local_root_number::<f64>(class, &place, cfg)?.certificate.expect("certified");
        acc *= a.ratio(&b).expect("degree-two certificates are units");
    }
    Ok(acc)
}

/// Means of `global_root_ratio(dQ)` over `𝒬(X)` for each `X` in `xs`
/// (ascending); the terms are computed once at the largest `X`.
pub fn average_sweep<F: RealScalar>(d: &GaussInt, xs: &[u64], exclude_unit: bool, cfg: &RootConfig) -> Result<SweepReport> {
    if xs.is_empty() || xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("X list must be nonempty and strictly ascending".into()));
    }
    let class = CurveClass::new(d)?;
    check_shape(&class)?;
    let family = enumerate_q(*xs.last().unwrap(), exclude_unit)?;
    let terms: Vec<(Complex<F>, bool, f64)> = family
        .members
        .par_iter()
        .map(|m| -> Result<_> {
            let w = global_root_ratio::<F>(&class.twist(&m.to_gaussian())?, cfg)?;
            let defect = (abs(w.value).to_f64() - 1.0).abs();
            let agree = w.is_consistent(TOLERANCE) && w.certificate == Some(reduced_ratio(&class, m, cfg)?);
            Ok((w.value, agree, defect))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut acc = CompensatedSum::<F>::default();
    let mut k = 0;
    for &x in xs {
        while k < terms.len() && family.members[k].value.unsigned_abs() <= x {
            acc.add(terms[k].0);
            k += 1;
        }
        let mean = if k == 0 {
            Complex::new(0.0, 0.0)
        } else {
            let s = acc.value();
            let n = F::from_i64(k as i64);
            to_c64(Complex::new(s.re.quot(n), s.im.quot(n)))
        };
        rows.push(SweepRow { x, size: k, mean_re: mean.re, mean_im: mean.im, abs_mean: mean.norm() });
    }
    let modulus_defect = terms.iter().map(|t| t.2).fold(0.0, f64::max);
    let reduced_mismatches = terms.iter().zip(&family.members).filter(|(t, _)| !t.1).map(|(_, m)| m.value).collect();
    Ok(SweepReport { d: class.d, exclude_unit, rows, modulus_defect, reduced_mismatches })
}

pub fn average_report<F: RealScalar>(d: &GaussInt, xs: &[u64], exclude_unit: bool, cfg: &RootConfig) -> Result<Report> {
    let s = average_sweep::<F>(d, xs, exclude_unit, cfg)?;
    let mut r = Report::new("average", F::DIGITS, &["X", "size", "mean_re", "mean_im", "abs_mean"]);
    r.param("d", &s.d);
    r.param("exclude_unit_q", exclude_unit);
    for row in &s.rows {
        r.row(vec![
            row.x.to_string(),
            row.size.to_string(),
            report::fmt_f64(row.mean_re),
            report::fmt_f64(row.mean_im),
            report::fmt_f64(row.abs_mean),
        ]);
    }
    r.check("terms have modulus 1", s.modulus_defect < TOLERANCE, format!("max defect {:.3e}", s.modulus_defect));
    r.check("|mean| <= 1", s.rows.iter().all(|row| row.abs_mean <= 1.0 + TOLERANCE), "");
    r.check(
        "reduced formula matches the direct product",
        s.reduced_mismatches.is_empty(),
        format!("mismatches at Q = {:?}", s.reduced_mismatches),
    );
    r.check(
        "|mean| weakly decreasing up to 20% slack",
        s.weakly_decreasing(TREND_SLACK),
        s.rows.iter().map(|row| format!("{:.4}", row.abs_mean)).collect::<Vec<_>>().join(", "),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GaussInt {
        GaussInt::from_i64(re, im)
    }

    fn prod(xs: &[GaussInt]) -> GaussInt {
        xs.iter().fold(GaussInt::one(), |a, b| &a * b)
    }

    #[test]
    fn shape_is_enforced() {
        let cfg = RootConfig::default();
        for d in [prod(&[g(0, 1), g(-1, 2)]), prod(&[g(1, 1), g(-1, 2)]), g(-1, 2).pow(2)] {
            assert!(matches!(average_sweep::<f64>(&d, &[10], false, &cfg), Err(Error::ShapeViolation(_))), "{d}");
        }
        assert!(average_sweep::<f64>(&g(-1, 2), &[100, 10], false, &cfg).is_err());
    }

    #[test]
    fn reduced_formula_agrees_exactly() {
        let cfg = RootConfig::default();
        let cases = [
            g(1, 0),
            g(-1, 2),
            prod(&[g(-1, 2), g(-3, 0)]),
            prod(&[g(3, 2), g(-7, 0).pow(3)]),
            prod(&[g(-1, 2), g(5, 4), g(-3, 0).pow(2), g(-7, 0)]),
        ];
        for d in cases {
            let s = average_sweep::<f64>(&d, &[30, 300], false, &cfg).unwrap();
            assert!(s.reduced_mismatches.is_empty(), "{d}: {:?}", s.reduced_mismatches);
            assert!(s.modulus_defect < 1e-12);
            assert!(s.rows.iter().all(|r| r.abs_mean <= 1.0));
        }
    }

    #[test]
    fn pattern_factor_is_constant_on_classes() {
        let cfg = RootConfig::default();
        let class = CurveClass::new(&prod(&[g(-1, 2), g(3, 2), g(-3, 0), g(-7, 0).pow(2)])).unwrap();
        let family = enumerate_q(20_000, false).unwrap();
        for t in [vec![], vec![3u64], vec![7], vec![3, 7]] {
            let members: Vec<&QMember> = family
                .members
                .iter()
                .filter(|m| [3u64, 7].iter().all(|p| m.primes.contains(p) == t.contains(p)))
                .take(50)
                .collect();
            assert_eq!(members.len(), 50);
            let first = pattern_factor(&class, members[0], &cfg).unwrap();
            for m in &members {
                assert_eq!(pattern_factor(&class, m, &cfg).unwrap(), first, "pattern {t:?}, Q = {}", m.value);
            }
        }
    }

    #[test]
    fn sweep_is_bit_reproducible_and_thread_independent() {
        let cfg = RootConfig::default();
        let d = prod(&[g(-1, 2), g(-3, 0)]);
        let a = average_sweep::<f64>(&d, &[100, 1000], false, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| average_sweep::<f64>(&d, &[100, 1000], false, &cfg).unwrap());
        assert_eq!(a, b);
        let c = average_sweep::<f64>(&d, &[100, 1000], true, &cfg).unwrap();
        assert_eq!(c.rows[0].size + 1, a.rows[0].size);
    }
}
