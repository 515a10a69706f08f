//! Exact computations with B-field twisted Mukai lattices of K3 surfaces.
//!
//! Everything here runs over arbitrary-precision rationals; there is no
//! floating point anywhere. The crate is organized around the extended
//! cohomology lattice H⁰ ⊕ H² ⊕ H⁴ of a K3 surface ("the Mukai lattice"),
//! with the degree-two intersection form supplied as a parameter so that
//! small hyperbolic desk models and the full rank-22 K3 form coexist.
//!
//! * [`lattice`] — quadratic forms, the truncated cohomology ring, the
//!   Mukai pairing, Smith-form lattice membership, isometry checks.
//! * [`surface`] — synthetic twisted-period data: validation, the twisted
//!   Picard lattice, Hodge/orientation predicates, Brauer equivalence and
//!   spherical-class search.
//! * [`chern`] — the twisted Chern character dictionary: B-field shifts,
//!   Mukai vectors, Euler pairing, Azumaya-side characters.
//! * [`transform`] — the catalogue of cohomological Fourier–Mukai generator
//!   actions and root-reflection chamber descent.
//! * [`factor`] — factorization of orientation-preserving twisted Hodge
//!   isometries into generator words with certified terminal residuals.

pub mod chern;
pub mod error;
pub mod factor;
pub mod lattice;
pub mod matrix;
pub mod rational;
pub mod sampling;
pub mod surface;
pub mod transform;

pub use chern::{LocallyFreeDatum, MukaiVector, TwistedChernClass};
pub use error::Error;
pub use factor::{Certificate, FactorizeOptions, ImageCase, TerminalKind, TerminalToken};
pub use lattice::{CohClass, GramForm, Isometry};
pub use matrix::{QMat, ZMat};
pub use rational::Rational;
pub use surface::{PicardLattice, SphericalOutcome, TwistedSurface, Violation};
pub use transform::{Generator, GeneratorKind};
