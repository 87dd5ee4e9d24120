//! Numerical machinery for contractions with rank-one defects on the unit
//! circle: monic orthogonal polynomials and Szegő recursions, Schur functions
//! and the Schur algorithm, CMV and truncated CMV matrices, characteristic
//! functions through the colligation resolvent, and inverse spectral solvers
//! (full spectrum, spectrum + first parameters, spectrum + last parameters).
//!
//! Everything is plain dense complex linear algebra over `f64`; all solvers
//! are deterministic and re-verify their outputs against the stated spectral
//! or parameter data before returning.

pub mod cmv;
pub mod error;
pub mod inverse;
pub mod numkernel;
pub mod opuc;
pub mod schurfun;
pub mod spectra;

pub use error::{Error, Result};
pub use numkernel::{ComplexMatrix, Poly, Tolerances};
pub use schurfun::{BlaschkeProduct, RationalSchur, SchurParams, WallPair};

