//! Numerics for Schrödinger operators `L = -∂² + u` whose eigenfunctions are
//! meromorphic at every pole of the potential.
//!
//! The crate is `no_std` (it needs `alloc`). Modules, bottom-up:
//!
//! * [`laurent`]: truncated Laurent series around a pole, residues and
//!   closed-form semicircle detour integrals.
//! * [`local`]: Frobenius analysis at a pole and the decision procedure for
//!   trivial monodromy.
//! * [`potential`]: rational, soliton (tau function) and elliptic potentials,
//!   pole tracking under KdV flow.
//! * [`space`]: singular function spaces with the indefinite inner product,
//!   negative-square counting and the symmetry test for `L`.
//! * [`weierstrass`] and [`genus1`]: Weierstrass functions, the Lamé Bloch
//!   function, quasimomentum, the canonical contour and Bloch-norm signs.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dd;
pub mod error;
pub mod genus1;
pub mod laurent;
pub mod linalg;
pub mod local;
pub mod potential;
pub mod quad;
pub mod space;
pub mod weierstrass;

pub use error::Error;
pub use laurent::{Orientation, TruncatedLaurentSeries};
pub use num_complex::Complex64;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

#[cfg(test)]
pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
