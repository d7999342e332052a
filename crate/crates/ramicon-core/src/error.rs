// SPDX-License-Identifier: MIT OR Apache-2.0
//! The crate-wide error type.

use thiserror::Error;

use crate::algebra::{AlgebraError, CycNum};

/// Broad class of an error, used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or inadmissible input data.
    Validation,
    /// Not enough known coefficients for the requested computation.
    Precision,
    /// The input does not have the structure the operation requires.
    Structure,
}

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Failure in the algebraic substrate.
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    /// The leading coefficient `a_{1,0}` of the exponent vanishes.
    #[error("DegenerateLeading: the leading coefficient a[1][0] vanishes")]
    DegenerateLeading,
    /// A residue-level coefficient `a_{k,m-1}` with `k ≥ 1` is nonzero.
    #[error("IllegalResidueTerm: a[{k}][{l}] must vanish")]
    IllegalResidueTerm {
        /// Power of `w`.
        k: usize,
        /// Power of `z`.
        l: usize,
    },
    /// Unramified leading coefficients are not pairwise distinct.
    #[error("RepeatedLeading: leading coefficients of entries {0} and {1} coincide")]
    RepeatedLeading(usize, usize),
    /// The unfolding roots are not pairwise distinct.
    #[error("RepeatedRoots: the unfolding points are not pairwise distinct")]
    RepeatedRoots,
    /// Generic shape or range violation in the input.
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
    /// The coefficient field lacks the required root of unity.
    #[error("FieldLacksRoot: Q(ζ_{order}) does not contain ζ_{r}")]
    FieldLacksRoot {
        /// Field order.
        order: u32,
        /// Required root of unity order.
        r: usize,
    },
    /// The gauge matrix is not invertible at the origin.
    #[error("SingularGauge")]
    SingularGauge,
    /// A normalization step found a residual outside the admissible submodule.
    #[error("ResidualMismatch at step (q'={qprime}, s={s}), column {k}: residual {residual}")]
    ResidualMismatch {
        /// Level of the step.
        qprime: i64,
        /// Sub-step index.
        s: usize,
        /// Column where the residual was found.
        k: usize,
        /// Offending coefficient.
        residual: CycNum,
    },
    /// The reduction step's linear system is singular.
    #[error("SingularSystem")]
    SingularSystem,
    /// No invertible frame matches the normal form modulo `z^{m-1}`.
    #[error("FrameNotFound: no invertible frame matches the leading normal form")]
    FrameNotFound,
    /// The connection is not in the required adapted gauge.
    #[error("NotAdaptedGauge: {0}")]
    NotAdaptedGauge(String),
    /// A structure violates one of its axioms.
    #[error("AxiomViolation: {0}")]
    AxiomViolation(String),
    /// Two structures are not equivalent.
    #[error("NotEquivalent: {0}")]
    NotEquivalent(String),
    /// The connection is not generic ramified for the given exponent.
    #[error("NotRamified: {0}")]
    NotRamified(String),
    /// A cover-side object does not descend to the base.
    #[error("NotDescendable: {0}")]
    NotDescendable(String),
    /// An unramified deformation carries a residue term.
    #[error("ResidueDeformation: entry {0} has a dz/z term")]
    ResidueDeformation(usize),
    /// A logarithmic lift was requested for non-logarithmic data.
    #[error("NotLogarithmic: {0}")]
    NotLogarithmic(String),
}

impl Error {
    /// Broad class of the error.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Algebra(AlgebraError::PrecisionExhausted { .. }) => ErrorClass::Precision,
            Error::Algebra(_)
            | Error::DegenerateLeading
            | Error::IllegalResidueTerm { .. }
            | Error::RepeatedLeading(..)
            | Error::RepeatedRoots
            | Error::InvalidInput(_)
            | Error::FieldLacksRoot { .. } => ErrorClass::Validation,
            _ => ErrorClass::Structure,
        }
    }
}

/// Result alias for the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;
