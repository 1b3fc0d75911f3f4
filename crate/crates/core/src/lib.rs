//! Colevel lower bounds for varieties over finite fields, with an
//! arithmetic verification pipeline: brute-force point counting over
//! extension towers, exact zeta-function reconstruction, and p-adic
//! divisibility certificates for reciprocal zeros and poles.
//!
//! The crate splits into:
//! - [`bounds`]: the exact integer bound formulas and per-degree tables;
//! - [`polynomials`](multipoly): sparse multivariate polynomials over Z;
//! - [`field`]: GF(p^s) with a deterministic modulus;
//! - [`counting`]: the parallel counting engine and its cache;
//! - [`zeta`]: series expansion, rational reconstruction, certificates;
//! - [`fixtures`]: built-in example varieties;
//! - [`selftest`]: exhaustive property grids.
//!
//! The whole pipeline on the quadric cone `x1*x2 = x3*x4` in affine
//! 4-space:
//!
//! ```
//! use colevel::bounds::{affine_bound_table, polar_requirement};
//! use colevel::counting::{count_tower, CountOptions};
//! use colevel::fixtures;
//! use colevel::zeta::{reconstruct, verify_polar};
//!
//! let cone = fixtures::quadric_cone();
//! let table = affine_bound_table(&cone.problem(), &cone.degrees())?;
//! assert_eq!(table.entry(4).unwrap().new_bound, 2);
//!
//! let record = count_tower(&cone.variety(), 2, 1, 6, &CountOptions::default())?;
//! let zeta = reconstruct(&record, 1, 2)?;
//! assert_eq!(zeta.denominator.to_string(), "1 - 12*t + 32*t^2");
//!
//! let polar = verify_polar(&zeta, &cone.problem(), &cone.degrees(), 2, 1)?;
//! assert!(polar.pass && polar.required == polar_requirement(&cone.problem(), &cone.degrees())?.exponent);
//! # Ok::<(), colevel::Error>(())
//! ```

pub mod bounds;
pub mod counting;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod multipoly;
pub mod scalar;
pub mod selftest;
pub mod unipoly;
pub mod zeta;

pub use error::{Error, Result};

/// Univariate polynomial over the integers (ascending coefficients).
pub type IntPoly = unipoly::UniPoly<num_bigint::BigInt>;
/// Univariate polynomial over the rationals.
pub type RatPoly = unipoly::UniPoly<num_rational::BigRational>;
