//! Root numbers of Hecke characters attached to the CM elliptic curves
//! `E_d : y² = x³ − dx` over `Q(i)`.
//!
//! Exact arithmetic lives in [`gaussint`] and [`symbols`]; the curve model,
//! Hecke character and local root numbers in [`curves`], [`hecke`] and
//! [`rootnum`]; desk-scale reproductions of the symmetry, density and
//! averaging statements in [`experiments`].

pub mod arith;
pub mod curves;
pub mod error;
pub mod experiments;
pub mod gaussint;
pub mod hecke;
pub mod numeric;
pub mod rootnum;
pub mod scalar;
pub mod selftest;
pub mod sieve;
pub mod symbols;

pub use error::{Error, Result};
pub use gaussint::Gaussian;

use num_bigint::BigInt;

/// Arbitrary-precision Gaussian integer.
pub type GaussInt = Gaussian<BigInt>;
/// Fixed-width Gaussian integer.
pub type GaussInt64 = Gaussian<i64>;
