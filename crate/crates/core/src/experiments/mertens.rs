//! `P(Y) = ∏_{p ≤ Y, p ≡ a (m)} (1 − ξ/p)` and the exponent of its decay in
//! `log Y`, compared with `−cos(arg ξ)/φ(m)`.

use num_complex::Complex;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::report::{self, Report};
use crate::error::{Error, Result};
use crate::sieve;

/// Points of the ladder below this are left out of the fit.
pub const FIT_START: u64 = 1000;
/// Ladder points per decade.
pub const LADDER_STEPS: u32 = 8;
pub const EXPONENT_TOLERANCE: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MertensFit {
    pub xi: Complex<f64>,
    pub a: u64,
    pub m: u64,
    pub x: u64,
    pub product: Complex<f64>,
    pub slope: f64,
    pub predicted: f64,
    /// `(Y, log|P(Y)|)` at every ladder point used in the fit.
    pub ladder: Vec<(u64, f64)>,
}

impl MertensFit {
    pub fn within(&self, tol: f64) -> bool {
        (self.slope - self.predicted).abs() <= tol
    }
}

pub fn totient(m: u64) -> u64 {
    (1..=m).filter(|k| k.gcd(&m) == 1).count() as u64
}

fn ladder(x: u64) -> Vec<u64> {
    let start = FIT_START.min(x / 10).max(2);
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let y = (start as f64 * 10f64.powf(k as f64 / LADDER_STEPS as f64)).round() as u64;
        if y >= x {
            break;
        }
        if out.last() != Some(&y) {
            out.push(y);
        }
        k += 1;
    }
    out.push(x);
    out
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Evaluates `P` along a geometric ladder up to `x` by summing `log(1 − ξ/p)`
/// and fits `log|P(Y)|` against `log log Y` for `Y >= 10³`.
pub fn mertens_fit(xi: Complex<f64>, a: u64, m: u64, x: u64) -> Result<MertensFit> {
    if m == 0 || a.gcd(&m) != 1 {
        return Err(Error::InvalidArgument(format!("gcd({a}, {m}) must be 1")));
    }
    if x < 100 {
        return Err(Error::InvalidArgument("X must be at least 100".into()));
    }
    if ((xi.norm() - 1.0).abs()) > 1e-12 {
        return Err(Error::InvalidArgument(format!("ξ = {xi} is not on the unit circle")));
    }
    let stops = ladder(x);
    let mut ladder_out = Vec::with_capacity(stops.len());
    let mut log_p = Complex::new(0.0, 0.0);
    let mut comp = Complex::new(0.0, 0.0);
    let mut next = 0;
    sieve::for_each_prime(2, x, |p| {
        while next < stops.len() && stops[next] < p {
            ladder_out.push((stops[next], log_p.re - comp.re));
            next += 1;
        }
        if p % m == a % m {
            // Kahan summation of the complex logarithms
            let term = (Complex::new(1.0, 0.0) - xi / p as f64).ln() - comp;
            let t = log_p + term;
            comp = (t - log_p) - term;
            log_p = t;
        }
    })?;
    while next < stops.len() {
        ladder_out.push((stops[next], log_p.re - comp.re));
        next += 1;
    }
    let total = log_p - comp;
    let pts: Vec<(f64, f64)> = ladder_out.iter().map(|&(y, l)| ((y as f64).ln().ln(), l)).collect();
    Ok(MertensFit {
        xi,
        a,
        m,
        x,
        product: total.exp(),
        slope: least_squares_slope(&pts),
        predicted: -xi.arg().cos() / totient(m) as f64,
        ladder: ladder_out,
    })
}

pub fn mertens_report(cases: &[(Complex<f64>, u64, u64)], x: u64) -> Result<Report> {
    let cols = ["xi_re", "xi_im", "a", "m", "X", "product_re", "product_im", "abs_product", "slope", "predicted"];
    let mut r = Report::new("mertens", 15, &cols);
    r.param("X", x);
    r.param("fit_start", FIT_START);
    r.param("ladder_steps_per_decade", LADDER_STEPS);
    for &(xi, a, m) in cases {
        let f = mertens_fit(xi, a, m, x)?;
        r.row(vec![
            report::fmt_f64(xi.re),
            report::fmt_f64(xi.im),
            a.to_string(),
            m.to_string(),
            x.to_string(),
            report::fmt_f64(f.product.re),
            report::fmt_f64(f.product.im),
            report::fmt_f64(f.product.norm()),
            report::fmt_f64(f.slope),
            report::fmt_f64(f.predicted),
        ]);
        r.check(
            &format!("exponent for ξ = {xi}, p ≡ {a} mod {m} within {EXPONENT_TOLERANCE}"),
            f.within(EXPONENT_TOLERANCE),
            format!("slope {:.4}, predicted {:.4}", f.slope, f.predicted),
        );
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totients() {
        assert_eq!([1, 2, 4, 12, 30].map(totient), [1, 1, 2, 4, 8]);
    }

    #[test]
    fn small_product_matches_direct() {
        let xi = Complex::new(0.0, 1.0);
        let f = mertens_fit(xi, 1, 4, 200).unwrap();
        let mut direct = Complex::new(1.0, 0.0);
        for p in sieve::primes_in_progression(200, 1, 4).unwrap() {
            direct *= Complex::new(1.0, 0.0) - xi / p as f64;
        }
        assert!((f.product - direct).norm() < 1e-12);
        assert_eq!(f.ladder.last().unwrap().0, 200);
    }

    #[test]
    fn errors() {
        let one = Complex::new(1.0, 0.0);
        assert!(mertens_fit(one, 2, 4, 1000).is_err());
        assert!(mertens_fit(one, 3, 4, 99).is_err());
        assert!(mertens_fit(Complex::new(2.0, 0.0), 3, 4, 1000).is_err());
    }

    #[test]
    fn exponent_at_moderate_x() {
        let f = mertens_fit(Complex::new(1.0, 0.0), 3, 4, 1_000_000).unwrap();
        assert!(f.within(EXPONENT_TOLERANCE), "{} vs {}", f.slope, f.predicted);
        assert!(f.ladder.iter().all(|&(y, _)| y >= FIT_START));
    }
}
