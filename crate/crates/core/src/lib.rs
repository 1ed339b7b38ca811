//! Reproducing-kernel numerics for composition operators.
//!
//! The crate evaluates kernels of Hardy, Bergman and weighted Hardy spaces on
//! the disk, polydisc and ball, builds truncated matrices of (weighted)
//! composition operators, evaluates the closed-form norms and kernel ratios
//! known for inner and affine symbols, certifies boundedness through
//! positive-semidefinite Gram matrices, classifies symbols whose adjoint is
//! again a composition operator, and computes lower bounds in several
//! variables. The [`oracle`] module provides quadrature and brute-force
//! routines that check every computed quantity by an independent route.

pub mod adjointclassify;
pub mod certify;
pub mod closedforms;
mod error;
pub mod linalg;
pub mod multivar;
pub mod operators;
pub mod oracle;
pub mod parse;
pub mod report;
pub mod series;
pub mod spaces;
pub mod symbols;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use series::PowerSeries;
pub use spaces::{Point, SpaceDescriptor, WeightSequence};
pub use symbols::{PolySymbol, SymbolMap};

/// Imaginary unit, used all over the tests and the parsers.
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Shorthand for a real number promoted to a complex one.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
