//! Quasi-shuffle word algebra, strong scheme generation and Monte Carlo
//! drivers for SDEs driven by Wiener and compensated Poisson processes.
//!
//! The crate is layered: [`word`] holds the exact combinatorics, [`endo`]
//! the endomorphism algebra and its inner product, [`scheme`] turns
//! endomorphisms into executable tables, [`drivers`] samples iterated
//! integrals, [`operators`] evaluates composed vector field operators and
//! [`harness`] runs experiments.

pub mod drivers;
pub mod endo;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod operators;
pub mod scheme;
pub mod word;

pub use error::{Error, Result};

/// Exact rational scalar used by the symbolic layers.
pub type Q = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Shorthand for `n / d`.
pub fn qf(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Lossy conversion to `f64` for the numeric layers.
pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}
