//! Exact linear algebra for filtered (φ,N)-modules, spectral sequences of
//! filtered complexes, and Bruhat–Tits building combinatorics.
//!
//! Everything is computed over ℚ with arbitrary-precision rationals; there is
//! no floating point anywhere in the crate.

pub mod drinfeld;
pub mod error;
pub mod filtration;
pub mod gamma_quotient;
pub mod matrix;
pub mod monodromy;
pub mod phin;
pub mod poly;
pub mod rational;
pub mod schema;
pub mod spectral;
pub mod subspace;

pub use error::{Error, ErrorKind, InvariantViolation, Result};
pub use matrix::QMatrix;
pub use poly::{char_poly, newton_polygon, NewtonPolygon, Polynomial};
pub use rational::Rational;
pub use subspace::{image, kernel, Subspace};
pub use filtration::{GradedDims, IndexedFiltration, Orientation};
pub use phin::{check_opposite, AdmissibilityOptions, AdmissibilityReport, PhiNModule, Verdict};
