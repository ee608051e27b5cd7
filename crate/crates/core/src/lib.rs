//! Numerical machinery for cusp-form-twisted zeta functions of binary cubic forms.
//!
//! The crate provides exact arithmetic and orbit enumeration for integral binary
//! cubic forms, Iwasawa coordinates on positive-determinant 2x2 matrices,
//! K-Bessel/Gamma/hypergeometric special functions, evaluation of a Hecke-Maass
//! cusp form from ingested spectral data, the stationary-phase apparatus for the
//! oscillatory integrals that arise in the approximate functional equation, the
//! singular-term reduction chain, and the smoothed main-term weights.  Every
//! closed-form identity used along the way is cross-checked against an
//! independent quadrature or brute-force oracle in the test and verify suites.

pub mod cubic;
pub mod gl2;
pub mod jet;
pub mod maass;
pub mod osc;
pub mod quad;
pub mod rng;
pub mod singular;
pub mod special;
pub mod testfn;
pub mod verify;
pub mod zeta;

pub use num_complex::Complex64;

/// Shorthand for the complex unit.
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
