// SPDX-License-Identifier: MIT OR Apache-2.0
//! Exact coefficient arithmetic and the series, matrix and differential-form
//! algebra that the rest of the crate is built on.
//!
//! * [`cyclotomic`]: rationals and the field `Q(ζ_R)`.
//! * [`series`]: truncated Laurent series with explicit order and precision.
//! * [`linalg`]: dense constant matrices over `Q(ζ_R)`.
//! * [`matrix`]: matrices of truncated series stored as series of matrices.
//! * [`forms`]: matrix-valued one-forms over nilpotent parameter rings, the
//!   wedge product and curvature.

pub mod cyclotomic;
pub mod cycpoly;
pub mod forms;
pub mod linalg;
pub mod matrix;
pub(crate) mod poly;
pub mod series;

pub use cyclotomic::{
    cyc_arith, parse_rational, rat, rat_int, render_rational, CycField, CycNum, CycOp, Field,
    FieldExt, Rational,
};
pub use forms::{curvature, d_form, wedge, EpsMatrix, EpsRing, FormMatrix, TwoForm};
pub use linalg::Mat;
pub use matrix::SeriesMatrix;
pub use series::{series_d_dz, series_inv, series_mul, TruncSeries, Var};

use thiserror::Error;

/// Errors raised by the algebraic substrate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    /// Division by an exact zero.
    #[error("DivisionByZero")]
    DivisionByZero,
    /// Operands live in cyclotomic fields of different orders.
    #[error("OrderMismatch: Q(ζ_{0}) vs Q(ζ_{1})")]
    OrderMismatch(u32, u32),
    /// Operands are series in different variables.
    #[error("VariableMismatch")]
    VariableMismatch,
    /// The coefficient at the declared order is zero, so the series is not a unit.
    #[error("NonUnitLeading")]
    NonUnitLeading,
    /// `from_w` met an exponent not divisible by the ramification index.
    #[error("NotPullbackable: exponent {exponent} is not divisible by {index}")]
    NotPullbackable {
        /// Offending exponent.
        exponent: i64,
        /// Ramification index.
        index: usize,
    },
    /// The result would carry no known coefficients.
    #[error("PrecisionExhausted: window [{ord}, {prec}) is empty")]
    PrecisionExhausted {
        /// Lowest exponent of the would-be result.
        ord: i64,
        /// Precision of the would-be result.
        prec: i64,
    },
    /// Forms over different nilpotent parameter rings were combined.
    #[error("EpsOrderMismatch")]
    EpsOrderMismatch,
    /// Matrix shapes do not fit the operation.
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
    /// A constant matrix that must be invertible is singular.
    #[error("SingularMatrix")]
    SingularMatrix,
    /// Malformed textual input.
    #[error("ParseError: {0}")]
    Parse(String),
}

/// Checks that a window `[ord, prec)` is nonempty.
pub(crate) fn check_window(ord: i64, prec: i64) -> Result<(), AlgebraError> {
    if prec <= ord {
        Err(AlgebraError::PrecisionExhausted { ord, prec })
    } else {
        Ok(())
    }
}
