//! Complex polynomials, rational functions, Blaschke products and Möbius
//! maps, with root finding and boundary analysis tuned for the unit circle.

mod blaschke;
mod mobius;
mod poly;
mod rfn;
mod roots;

pub use blaschke::BlaschkeProduct;
pub use mobius::{mobius_from_cross_ratio, MobiusFn};
pub use poly::ComplexPoly;
pub use rfn::{is_unimodular_on_circle, phasar_derivative, RationalFn};
pub use roots::poly_roots;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum RationalError {
    #[error("roots undefined for the zero polynomial")]
    ZeroPolyRoots,
    #[error("root finding did not converge (worst residual {0:.3e})")]
    RootsNotConverged(f64),
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("degenerate cross-ratio data: {0}")]
    DegenerateCrossRatio(&'static str),
    #[error("phasar derivative undefined: {0}")]
    PhasarUndefined(&'static str),
    #[error("phasar derivative is not real (imaginary part {0:.3e})")]
    PhasarNotReal(f64),
    #[error("pole on the unit circle")]
    PoleOnCircle,
    #[error("unimodular constant has modulus {0}")]
    NotUnimodular(f64),
    #[error("zero with modulus {0} is not strictly inside the disc")]
    ZeroNotInterior(f64),
    #[error("not a Blaschke product: {0}")]
    NotBlaschke(&'static str),
}

pub(crate) fn chordal_eq(a: Complex64, b: Complex64, tol: f64) -> bool {
    match (a.is_infinite(), b.is_infinite()) {
        (true, true) => true,
        (true, false) | (false, true) => false,
        (false, false) => (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm())),
    }
}
