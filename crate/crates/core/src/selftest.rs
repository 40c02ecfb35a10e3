//! The invariant suite behind `cmroot selftest`. Each check is also exposed on
//! its own so the same code can be run at larger bounds.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::FactorConfig;
use crate::curves::{reduction_at_two, CurveClass, REDUCTION_TABLE};
use crate::error::{Error, Result};
use crate::experiments::{self, average_sweep, Report};
use crate::gaussint::{classify_prime, factor_primary, primary_primes_up_to_norm, PrimeClass, PrimeKind};
use crate::hecke::{verify_trace, POINT_COUNT_CAP};
use crate::numeric::{dist, normalize, snap_mu4, unit_powi, unit_sqrt, TOLERANCE};
use crate::rootnum::gauss::{degree_two_gauss_sign, gauss_sum};
use crate::rootnum::{local_root_number, local_root_oracle, Place, RootConfig};
use crate::sieve;
use crate::symbols::{quartic_symbol, quartic_symbol_composite, quartic_symbol_fast, supplement_i, supplement_one_plus_i, Mu4};
use crate::GaussInt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }

    /// Passes when `failures` is empty; the detail lists the first few.
    fn from_failures(checked: usize, what: &str, failures: &[String]) -> Self {
        let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
        let detail = if failures.is_empty() {
            format!("{checked} {what} checked")
        } else {
            format!("{} of {checked} {what} failed, e.g. {}", failures.len(), shown.join("; "))
        };
        Self::new(failures.is_empty(), detail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Quick,
    Full,
}

fn primes(bound: u64) -> Result<Vec<GaussInt>> {
    primary_primes_up_to_norm::<BigInt>(bound)
}

/// `(α/β)₄ = (β/α)₄·(−1)^{((Nα−1)/4)((Nβ−1)/4)}` over distinct primary
/// primes, both sides by exponentiation.
pub fn check_reciprocity(norm_bound: u64) -> Result<Outcome> {
    let ps = primes(norm_bound)?;
    let failures: Vec<String> = (0..ps.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let ps = &ps;
            (i + 1..ps.len()).filter_map(move |j| {
                let (a, b) = (&ps[i], &ps[j]);
                let e: BigInt = ((a.norm() - 1) / 4) * ((b.norm() - 1) / 4);
                let sign = if (e % 2u32).is_zero() { Mu4::ONE } else { Mu4::MINUS_ONE };
                let lhs = quartic_symbol(a, b).ok()?;
                let rhs = quartic_symbol(b, a).ok()? * sign;
                (lhs != rhs).then(|| format!("({a}, {b})"))
            })
        })
        .collect();
    let n = ps.len();
    Ok(Outcome::from_failures(n * (n - 1) / 2, "prime pairs", &failures))
}

/// The closed forms for `(i/π)₄` and `((1+i)/π)₄` against exponentiation.
pub fn check_supplements(norm_bound: u64) -> Result<Outcome> {
    let ps = primes(norm_bound)?;
    let mut failures = Vec::new();
    for p in &ps {
        if supplement_i(p) != quartic_symbol(&GaussInt::i(), p)? || supplement_one_plus_i(p) != quartic_symbol(&GaussInt::one_plus_i(), p)? {
            failures.push(p.to_string());
        }
    }
    Ok(Outcome::from_failures(ps.len(), "primes", &failures))
}

/// The Euclidean symbol against the factorization route on random coprime pairs.
pub fn check_fast_symbol(samples: usize, range: i64, seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut done = 0;
    while done < samples {
        let a = GaussInt::from_i64(rng.gen_range(-range..=range), rng.gen_range(-range..=range));
        let b = GaussInt::from_i64(rng.gen_range(-range..=range), rng.gen_range(-range..=range));
        if a.is_zero() || b.is_zero() || b.is_unit() || !b.is_odd() || !a.is_coprime(&b) {
            continue;
        }
        done += 1;
        if quartic_symbol_fast(&a, &b)? != quartic_symbol_composite(&a, &b)? {
            failures.push(format!("({a}, {b})"));
        }
    }
    Ok(Outcome::from_failures(samples, "pairs", &failures))
}

/// `verify_trace` at every good odd place of norm `<= norm_bound`.
pub fn check_traces(ds: &[GaussInt], norm_bound: u64) -> Result<Outcome> {
    let ps = primes(norm_bound)?;
    let cases: Vec<(&GaussInt, &GaussInt)> = ds.iter().flat_map(|d| ps.iter().filter(|p| !p.divides(d)).map(move |p| (d, p))).collect();
    let results: Vec<Option<String>> = cases
        .par_iter()
        .map(|(d, p)| -> Result<Option<String>> {
            let place = classify_prime(*p)?;
            Ok((!verify_trace(d, &place, POINT_COUNT_CAP)?).then(|| format!("d = {d} at {p}")))
        })
        .collect::<Result<_>>()?;
    let failures: Vec<String> = results.into_iter().flatten().collect();
    Ok(Outcome::from_failures(cases.len(), "places", &failures))
}

/// Every row of the table at `1+i` is reached and no fourth-power-free `d`
/// of norm `<= norm_bound` misses the table.
pub fn check_table(norm_bound: u64) -> Result<Outcome> {
    let r = (norm_bound as f64).sqrt() as i64;
    let cfg = FactorConfig::default();
    let mut hits = [0usize; REDUCTION_TABLE.len()];
    let mut misses = Vec::new();
    let mut checked = 0;
    for a in -r..=r {
        for b in -r..=r {
            let d = GaussInt::from_i64(a, b);
            if d.is_zero() || (a * a + b * b) as u64 > norm_bound || !factor_primary(&d, &cfg)?.is_fourth_power_free() {
                continue;
            }
            checked += 1;
            match reduction_at_two(&d) {
                Ok(e) => hits[e.row] += 1,
                Err(Error::TableMiss(_)) => misses.push(d.to_string()),
                Err(e) => return Err(e),
            }
        }
    }
    let unreached: Vec<String> = (0..hits.len()).filter(|&i| hits[i] == 0).map(|i| format!("row {i} unreached")).collect();
    let failures: Vec<String> = misses.into_iter().chain(unreached).collect();
    Ok(Outcome::from_failures(checked, "values of d", &failures))
}

/// A uniformly drawn fourth-power-free `d` with `2 <= N(d) <= norm_bound`
/// and at least one odd bad place.
pub fn sample_d(rng: &mut ChaCha8Rng, norm_bound: u64) -> Result<CurveClass> {
    let r = (norm_bound as f64).sqrt() as i64;
    loop {
        let d = GaussInt::from_i64(rng.gen_range(-r..=r), rng.gen_range(-r..=r));
        let n = d.norm().to_u64().unwrap_or(u64::MAX);
        if !(2..=norm_bound).contains(&n) {
            continue;
        }
        let class = CurveClass::new(&d)?;
        if class.d == d && !class.odd_bad.is_empty() {
            return Ok(class);
        }
    }
}

/// Closed form against the CRT-and-direct-sum route at every bad odd place.
pub fn check_routes(samples: usize, norm_bound: u64, seed: u64, cfg: &RootConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes: Vec<CurveClass> = (0..samples).map(|_| sample_d(&mut rng, norm_bound)).collect::<Result<_>>()?;
    let cases: Vec<(&CurveClass, PrimeClass<BigInt>)> =
        classes.iter().flat_map(|c| c.bad_odd_places().into_iter().map(move |v| (c, v))).collect();
    let results: Vec<(f64, String)> = cases
        .par_iter()
        .map(|(c, v)| -> Result<(f64, String)> {
            let a = local_root_number::<f64>(c, &Place::Finite(v.clone()), cfg)?.value;
            let b = local_root_oracle::<f64>(c, v, cfg)?;
            Ok((dist(a, b), format!("d = {} at {}", c.d, v.generator)))
        })
        .collect::<Result<_>>()?;
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let failures: Vec<String> = results.into_iter().filter(|r| !(r.0 < TOLERANCE)).map(|r| r.1).collect();
    let mut o = Outcome::from_failures(cases.len(), "places", &failures);
    o.detail += &format!(", max distance {worst:.2e}");
    Ok(o)
}

/// `G(χ^v) ∈ μ₄·s^{n−2}` at degree-one places over `p <= p_bound`, with `s` the
/// principal root of `π/|π|`, and `G = +1` or `(−1)^{(q+1)/4}` at degree-two
/// places over `q <= q_bound` as `v(d)` is even or odd.
pub fn check_gauss_sums(p_bound: u64, q_bound: u64, cfg: &RootConfig) -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for pi in primes(p_bound * p_bound)? {
        let v = classify_prime(&pi)?;
        let p = v.residue_characteristic.to_u64().unwrap();
        let bound = if v.kind == PrimeKind::DegreeOne { p_bound } else { q_bound };
        if p > bound {
            continue;
        }
        for n in 1..=3u32 {
            checked += 1;
            let g: Complex<f64> = gauss_sum(&v, n, cfg.gauss_cap)?;
            let ok = match v.kind {
                PrimeKind::DegreeOne => {
                    let s = unit_sqrt(normalize(pi.to_complex::<f64>()));
                    snap_mu4(g, unit_powi(s, n as i64 - 2), TOLERANCE).is_some()
                }
                _ => dist(g, Complex::new(degree_two_gauss_sign(p, n) as f64, 0.0)) < TOLERANCE,
            };
            if !ok {
                failures.push(format!("{pi}, n = {n}"));
            }
        }
    }
    Ok(Outcome::from_failures(checked, "(place, v(d)) pairs", &failures))
}

pub fn check_nusym(norm_bound: u64, cfg: &RootConfig) -> Result<Outcome> {
    let r = experiments::nusym_report(norm_bound, cfg)?;
    let c = &r.checks[0];
    Ok(Outcome::new(c.passed, c.detail.clone()))
}

/// `w_π(χ_{(−q')^k d}) = w_π(χ_d)·conj((−q'/π)₄^k)` at degree-one places and
/// `w_q(χ_{(−q')^k d}) = w_q(χ_d)` at degree-two places, on certificates.
pub fn check_expanding(samples: usize, norm_bound: u64, seed: u64, cfg: &RootConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qs = sieve::primes_in_progression(100, 3, 4)?;
    let mut failures = Vec::new();
    let mut places = 0;
    for _ in 0..samples {
        let class = sample_d(&mut rng, norm_bound)?;
        let mq = loop {
            let q = qs[rng.gen_range(0..qs.len())];
            let mq = GaussInt::from_i64(-(q as i64), 0);
            if mq.is_coprime(&class.d) {
                break mq;
            }
        };
        let k: u32 = rng.gen_range(1..=3);
        let twisted = class.twist(&mq.pow(k))?;
        for v in class.bad_odd_places() {
            places += 1;
            let place = Place::Finite(v.clone());
            let a = local_root_number::<f64>(&twisted, &place, cfg)?.certificate.expect("certified");
            let b = local_root_number::<f64>(&class, &place, cfg)?.certificate.expect("certified");
            let want = match v.kind {
                PrimeKind::DegreeOne => b.mul_unit(quartic_symbol(&mq, &v.generator)?.pow(k as i64).conj()),
                _ => b,
            };
            if a != want {
                failures.push(format!("d = {}, q' = {}, k = {k} at {}", class.d, -&mq, v.generator));
            }
        }
    }
    Ok(Outcome::from_failures(places, "places", &failures))
}

pub fn check_q_recount(x: u64) -> Result<Outcome> {
    let a = experiments::enumerate_q(x, false)?.members.len();
    let b = experiments::recount_q(x, false);
    Ok(Outcome::new(a == b, format!("|𝒬({x})| = {a}, recount {b}")))
}

/// The reduced product formula against the direct product for every member.
pub fn check_average_crosscheck(ds: &[GaussInt], x: u64, cfg: &RootConfig) -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for d in ds {
        let s = average_sweep::<f64>(d, &[x], false, cfg)?;
        checked += s.rows[0].size;
        failures.extend(s.reduced_mismatches.iter().map(|q| format!("d = {d}, Q = {q}")));
        if s.modulus_defect >= TOLERANCE {
            failures.push(format!("d = {d}: modulus defect {:.2e}", s.modulus_defect));
        }
    }
    Ok(Outcome::from_failures(checked, "members", &failures))
}

/// Runs every check and collects the outcomes in a report.
pub fn selftest(scale: Scale, seed: u64, cfg: &RootConfig) -> Result<Report> {
    let full = scale == Scale::Full;
    let pick = |quick: u64, full_v: u64| if full { full_v } else { quick };
    let g = GaussInt::from_i64;
    let trace_ds = [g(1, 0), g(0, 1), g(-1, 2), g(-3, 0), g(1, 2)];
    let avg_ds = [g(-1, 2), &g(-1, 2) * &g(-3, 0)];

    let mut r = Report::new("selftest", 15, &["check", "passed", "detail"]);
    r.param("scale", if full { "full" } else { "quick" });
    r.param("seed", seed);
    let checks: Vec<(&str, Result<Outcome>)> = vec![
        ("reciprocity", check_reciprocity(pick(100, 500))),
        ("supplements", check_supplements(pick(1000, 10_000))),
        ("fast symbol", check_fast_symbol(pick(300, 10_000) as usize, 1000, seed)),
        ("trace formula", check_traces(&trace_ds, pick(500, 10_000))),
        ("reduction table", check_table(pick(2000, 10_000))),
        ("gauss sums", check_gauss_sums(pick(50, 200), pick(23, 50), cfg)),
        ("closed form vs oracle", check_routes(pick(10, 50) as usize, 10_000, seed, cfg)),
        ("unit twists", check_nusym(pick(500, 2000), cfg)),
        ("expanding d", check_expanding(pick(20, 100) as usize, 10_000, seed, cfg)),
        ("Q(X) recount", check_q_recount(pick(1000, 10_000))),
        ("reduced average formula", check_average_crosscheck(&avg_ds, pick(300, 3000), cfg)),
    ];
    for (name, outcome) in checks {
        let o = outcome.unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        r.row(vec![name.to_string(), o.passed.to_string(), o.detail.clone()]);
        r.check(name, o.passed, o.detail);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_is_green_and_reproducible() {
        let cfg = RootConfig::default();
        let a = selftest(Scale::Quick, 7, &cfg).unwrap();
        for c in &a.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        let b = selftest(Scale::Quick, 7, &cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn sampled_d_are_canonical() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let c = sample_d(&mut rng, 10_000).unwrap();
            assert!(c.fact.is_fourth_power_free() && !c.odd_bad.is_empty());
        }
    }
}
