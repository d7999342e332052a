// SPDX-License-Identifier: MIT OR Apache-2.0
//! Exact computations with meromorphic connections that have generic ramified
//! irregular singularities on a formal disk.
//!
//! All arithmetic is exact over cyclotomic fields `Q(ζ_R)`. The crate is
//! organised bottom-up:
//!
//! * [`algebra`]: cyclotomic numbers, truncated series, matrices and forms.
//! * [`exponent`]: formal types of ramified exponents and their normal matrices.
//! * [`connection`]: connections, gauge transformations and curvature.
//! * [`normalform`]: reduction of a connection to the normal form of an exponent.
//! * [`ramstruct`]: factorized structures and the generic bijection.
//! * [`shearing`]: pullback to the ramified cover and diagonalization.
//! * [`isomonodromy`]: horizontal lifts of deformations and their descent.
//! * [`pairing`]: deformation complexes, the residue pairing and moduli dimensions.
//! * [`sample`]: seeded random instances for tests and tooling.

#![forbid(unsafe_code)]
#![warn(missing_docs)]

pub mod algebra;
pub mod error;
pub mod connection;
pub mod exponent;
pub mod isomonodromy;
pub mod normalform;
pub mod pairing;
pub mod ramstruct;
pub mod sample;
pub mod shearing;

pub use error::{Error, ErrorClass, Result};
