//! Local root numbers `w_v(χ_d)` of the Hecke character of `E_d`, by closed
//! forms and by an independent CRT/Gauss-sum route, and the global ratio
//! `w/w₂ = −i·∏_{v odd} w_v`.

pub mod congruence;
pub mod gauss;

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::ToPrimitive;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

pub use congruence::{find_prime_congruent, CongruenceSystem};
pub use gauss::{degree_two_gauss_sign, gauss_sum, gauss_sum_direct, GAUSS_SUM_CAP};

use crate::curves::CurveClass;
use crate::error::{Error, Result};
use crate::gaussint::{classify_prime, PrimeClass, PrimeKind};
use crate::numeric::{dist, normalize, snap_mu4, unit_powi, unit_sqrt, TOLERANCE};
use crate::scalar::RealScalar;
use crate::symbols::{quartic_symbol, quartic_symbol_composite, supplement_one_plus_i, Mu4};
use crate::GaussInt;

/// A place of `Q(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Place {
    Archimedean,
    Finite(PrimeClass<BigInt>),
}

impl Place {
    pub fn even() -> Self {
        Place::Finite(classify_prime(&GaussInt::one_plus_i()).expect("1+i is prime"))
    }

    /// The place of the prime `p` (any associate).
    pub fn of_prime(p: &GaussInt) -> Result<Self> {
        Ok(Place::Finite(classify_prime(p)?))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Place::Archimedean => "archimedean",
            Place::Finite(v) => match v.kind {
                PrimeKind::Even => "even",
                PrimeKind::DegreeOne => "degree_one",
                PrimeKind::DegreeTwo => "degree_two",
            },
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Archimedean => write!(f, "infinity"),
            Place::Finite(v) => write!(f, "{}", v.generator),
        }
    }
}

/// `ζ·∏ s(β)^k` with `ζ ∈ μ₄` and `s(β)` the principal square root of
/// `β/|β|` (argument in `(−π, π]`). Bases are kept sorted and `k ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Certificate {
    pub zeta: Mu4,
    pub bases: Vec<(GaussInt, i64)>,
}

impl Certificate {
    pub fn unit(zeta: Mu4) -> Self {
        Self { zeta, bases: Vec::new() }
    }

    pub fn new(zeta: Mu4, base: &GaussInt, k: i64) -> Self {
        Self::unit(zeta).times_base(base, k)
    }

    fn times_base(mut self, base: &GaussInt, k: i64) -> Self {
        match self.bases.binary_search_by(|(b, _)| b.cmp(base)) {
            Ok(pos) => {
                self.bases[pos].1 += k;
                if self.bases[pos].1 == 0 {
                    self.bases.remove(pos);
                }
            }
            Err(pos) if k != 0 => self.bases.insert(pos, (base.clone(), k)),
            Err(_) => {}
        }
        self
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::unit(self.zeta * other.zeta);
        out.bases = self.bases.clone();
        for (b, k) in &other.bases {
            out = out.times_base(b, *k);
        }
        out
    }

    pub fn mul_unit(&self, z: Mu4) -> Self {
        Self { zeta: self.zeta * z, bases: self.bases.clone() }
    }

    /// `self / other` when both carry the same bases.
    pub fn ratio(&self, other: &Self) -> Option<Mu4> {
        (self.bases == other.bases).then(|| self.zeta * other.zeta.conj())
    }

    pub fn value<F: RealScalar>(&self) -> Complex<F> {
        let mut acc = self.zeta.to_complex::<F>();
        for (b, k) in &self.bases {
            acc = acc * unit_powi(unit_sqrt(normalize(b.to_complex::<F>())), *k);
        }
        acc
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.zeta)?;
        for (b, k) in &self.bases {
            write!(f, "·s({b})^{k}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Archimedean,
    Unramified,
    GoodEven,
    ClosedForm,
    Oracle,
    Product,
}

/// A root number on the unit circle: the numeric value at the working
/// precision and, when known, its exact certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct RootNumber<F = f64> {
    pub value: Complex<F>,
    pub certificate: Option<Certificate>,
    pub method: Method,
}

impl<F: RealScalar> RootNumber<F> {
    fn certified(certificate: Certificate, method: Method) -> Self {
        Self { value: certificate.value(), certificate: Some(certificate), method }
    }

    pub fn to_c64(&self) -> Complex<f64> {
        crate::numeric::to_c64(self.value)
    }

    /// `| |w| − 1 | < tol` and agreement with the certificate.
    pub fn is_consistent(&self, tol: f64) -> bool {
        let m = (crate::numeric::abs(self.value).to_f64() - 1.0).abs();
        m < tol && self.certificate.as_ref().is_none_or(|c| dist(self.value, c.value::<F>()) < tol)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let certificate = match (&self.certificate, &other.certificate) {
            (Some(a), Some(b)) => Some(a.mul(b)),
            _ => None,
        };
        Self { value: self.value * other.value, certificate, method: Method::Product }
    }
}

impl<F: RealScalar> Serialize for RootNumber<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = self.to_c64();
        let mut st = s.serialize_struct("RootNumber", 6)?;
        st.serialize_field("w_re", &v.re)?;
        st.serialize_field("w_im", &v.im)?;
        st.serialize_field("zeta_exponent", &self.certificate.as_ref().map(|c| c.zeta.exponent()))?;
        st.serialize_field("certificate", &self.certificate.as_ref().map(|c| c.to_string()))?;
        st.serialize_field("method", &self.method)?;
        st.serialize_field("digits", &F::DIGITS)?;
        st.end()
    }
}

/// Effort bounds for root-number evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootConfig {
    /// Largest residue field for a Gauss sum.
    pub gauss_cap: u64,
    /// The oracle's prime search stops at `N(M)·search_factor`, `M` the CRT modulus.
    pub search_factor: u64,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self { gauss_cap: GAUSS_SUM_CAP, search_factor: 1 << 24 }
    }
}

fn bad_exponent(class: &CurveClass, v: &PrimeClass<BigInt>) -> u32 {
    class.valuation(&v.generator)
}

/// `w_v(χ_d)` by the closed forms at every supported place.
pub fn local_root_number<F: RealScalar>(class: &CurveClass, place: &Place, cfg: &RootConfig) -> Result<RootNumber<F>> {
    let v = match place {
        Place::Archimedean => return Ok(RootNumber::certified(Certificate::unit(Mu4::MINUS_I), Method::Archimedean)),
        Place::Finite(v) => v,
    };
    match v.kind {
        PrimeKind::Even => good_even(class),
        _ => match bad_exponent(class, v) {
            0 => Ok(RootNumber::certified(Certificate::unit(Mu4::ONE), Method::Unramified)),
            n if v.kind == PrimeKind::DegreeOne => degree_one(class, v, n, cfg),
            n => degree_two(class, v, n),
        },
    }
}

/// `(χ((1+i)O)/|χ((1+i)O)|)³` with `χ((1+i)O) = ε(1+i)·(1+i)`.
fn good_even<F: RealScalar>(class: &CurveClass) -> Result<RootNumber<F>> {
    if !class.has_good_reduction_at_two() {
        return Err(Error::UnsupportedEvenBadReduction { d: class.d.to_string() });
    }
    let eps: Mu4 = class.odd_bad.iter().map(|(p, n)| supplement_one_plus_i(p).pow(*n as i64).conj()).product();
    // ((1+i)/√2)³ = s(1+i)^6
    Ok(RootNumber::certified(Certificate::new(eps.pow(3), &GaussInt::one_plus_i(), 6), Method::GoodEven))
}

/// `η^n·(π/|π|)·conj((d/π^n / π)₄)·conj((conj(π)^{-1}/π)₄^n)·G(χ^v)`.
fn degree_one<F: RealScalar>(class: &CurveClass, v: &PrimeClass<BigInt>, n: u32, cfg: &RootConfig) -> Result<RootNumber<F>> {
    let pi = &v.generator;
    let pin = pi.pow(n);
    let eta = if pi.is_three_plus_two_i_mod4() { Mu4::MINUS_ONE.pow(n as i64) } else { Mu4::ONE };
    let rest = class.d.div_exact(&pin).expect("π^n divides d");
    let s1 = quartic_symbol(&rest, pi)?.conj();
    let inv = pi.conj().inverse_mod(&pin).expect("conj(π) is a unit mod π^n");
    let s2 = quartic_symbol(&inv, pi)?.pow(n as i64).conj();
    let unit = eta * s1 * s2;

    let gsum = gauss_sum::<F>(v, n, cfg.gauss_cap)?;
    let s = unit_sqrt(normalize(pi.to_complex::<F>()));
    let zg = snap_mu4(gsum, unit_powi(s, n as i64 - 2), TOLERANCE)
        .ok_or_else(|| Error::Unsnapped(format!("G = {} at {pi}, n = {n}", crate::numeric::to_c64(gsum))))?;
    let value = unit.to_complex::<F>() * normalize(pi.to_complex::<F>()) * gsum;
    Ok(RootNumber { value, certificate: Some(Certificate::new(unit * zg, pi, n as i64)), method: Method::ClosedForm })
}

/// `−conj((d/(−q)^n / −q)₄)·G(χ^v)` with `G` the exact sign.
fn degree_two<F: RealScalar>(class: &CurveClass, v: &PrimeClass<BigInt>, n: u32) -> Result<RootNumber<F>> {
    let mq = &v.generator;
    let q = v.residue_characteristic.to_u64().expect("q fits u64");
    let rest = class.d.div_exact(&mq.pow(n)).expect("(−q)^n divides d");
    let s1 = quartic_symbol(&rest, mq)?.conj();
    let g = if degree_two_gauss_sign(q, n) < 0 { Mu4::MINUS_ONE } else { Mu4::ONE };
    Ok(RootNumber::certified(Certificate::unit(Mu4::MINUS_ONE * s1 * g), Method::ClosedForm))
}

/// `w_v(χ_d)` at a bad odd place, computed as `χ^v_u(β)·G(χ^v)` with the
/// unit part realized as `ε(x)` for a prime `x` found by CRT, and `G` summed
/// term by term.
pub fn local_root_oracle<F: RealScalar>(class: &CurveClass, v: &PrimeClass<BigInt>, cfg: &RootConfig) -> Result<Complex<F>> {
    let n = bad_exponent(class, v);
    if v.kind == PrimeKind::Even {
        return Err(Error::EvenPlace);
    }
    if n == 0 {
        return Err(Error::GoodReduction { d: class.d.to_string(), place: v.generator.to_string() });
    }
    let pi = &v.generator;
    let pin = pi.pow(n);
    let sixteen = GaussInt::from_i64(16, 0);
    let others = class.odd_bad.keys().filter(|p| *p != pi);
    let (sys, sign) = match v.kind {
        PrimeKind::DegreeOne => {
            // x ≡ π at 2 and at the other bad primes, x ≡ conj(π)^{-1} mod π^n
            let mut sys = CongruenceSystem::new(true).with(sixteen, pi.clone());
            for p in others {
                sys = sys.with(p.clone(), pi.clone());
            }
            let inv = pi.conj().inverse_mod(&pin).expect("conj(π) is a unit mod π^n");
            (sys.with(pin.clone(), inv), normalize(pi.to_complex::<F>()))
        }
        _ => {
            // −x ≡ q at 2 and at the other bad primes, −x ≡ 1 mod q^n
            let mut sys = CongruenceSystem::new(true).with(sixteen, pi.clone());
            for p in others {
                sys = sys.with(p.clone(), pi.clone());
            }
            (sys.with(pin.clone(), -GaussInt::one()), Complex::new(-F::one(), F::zero()))
        }
    };
    let (m, _) = sys.lift()?;
    let bound = m.norm() * BigInt::from(cfg.search_factor);
    let x = find_prime_congruent(&sys, &bound)?;
    let eps = quartic_symbol_composite(&class.d, &x)?.conj();
    let gsum = gauss_sum_direct::<F>(v, n, cfg.gauss_cap)?;
    Ok(sign * eps.to_complex::<F>() * gsum)
}

/// `w(χ_d)/w₂(χ_d) = −i·∏_{v odd bad} w_v(χ_d)`.
pub fn global_root_ratio<F: RealScalar>(class: &CurveClass, cfg: &RootConfig) -> Result<RootNumber<F>> {
    let mut acc = local_root_number::<F>(class, &Place::Archimedean, cfg)?;
    for v in class.bad_odd_places() {
        acc = acc.mul(&local_root_number::<F>(class, &Place::Finite(v), cfg)?);
    }
    acc.method = Method::Product;
    Ok(acc)
}

/// The full `w(χ_d)`, available when `E_d` has good reduction at `1+i`.
pub fn global_root_number<F: RealScalar>(class: &CurveClass, cfg: &RootConfig) -> Result<RootNumber<F>> {
    let w2 = local_root_number::<F>(class, &Place::even(), cfg)?;
    Ok(global_root_ratio::<F>(class, cfg)?.mul(&w2))
}

/// `w_v` at every place where it is defined: the archimedean place, `1+i`
/// when `E_d` is good there, and every odd bad place.
pub fn all_local_root_numbers<F: RealScalar>(class: &CurveClass, cfg: &RootConfig) -> Result<Vec<(Place, RootNumber<F>)>> {
    let mut places = vec![Place::Archimedean];
    if class.has_good_reduction_at_two() {
        places.push(Place::even());
    }
    places.extend(class.bad_odd_places().into_iter().map(Place::Finite));
    places.into_iter().map(|p| local_root_number::<F>(class, &p, cfg).map(|w| (p, w))).collect()
}
