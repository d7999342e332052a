// SPDX-License-Identifier: MIT OR Apache-2.0
//! Command failures and their process exit codes.

use std::fmt;

use ramicon_core::algebra::AlgebraError;
use ramicon_core::{Error, ErrorClass};

/// Exit code for success.
pub const EXIT_OK: u8 = 0;
/// Exit code for invalid or unparsable input.
pub const EXIT_VALIDATION: u8 = 1;
/// Exit code for insufficient precision.
pub const EXIT_PRECISION: u8 = 2;
/// Exit code for structural failures and failed checks.
pub const EXIT_STRUCTURE: u8 = 3;
/// Exit code for command-line usage errors.
pub const EXIT_USAGE: u8 = 64;

/// Everything a command can fail with.
#[derive(Debug)]
pub enum CliError {
    /// Bad command-line usage.
    Usage(String),
    /// A document could not be read or decoded.
    Parse(String),
    /// A file could not be read or written.
    Io(String),
    /// The requested precision exceeds the configured cap.
    PrecisionCap {
        /// Requested number of orders.
        requested: i64,
        /// The cap.
        cap: i64,
    },
    /// A library error.
    Core(Error),
    /// A verification ran and did not pass.
    CheckFailed(String),
}

impl CliError {
    /// The process exit code for this failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse(_) | CliError::Io(_) => EXIT_VALIDATION,
            CliError::PrecisionCap { .. } => EXIT_PRECISION,
            CliError::Core(e) => match e.class() {
                ErrorClass::Validation => EXIT_VALIDATION,
                ErrorClass::Precision => EXIT_PRECISION,
                ErrorClass::Structure => EXIT_STRUCTURE,
            },
            CliError::CheckFailed(_) => EXIT_STRUCTURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Parse(s) => write!(f, "parse error: {s}"),
            CliError::Io(s) => write!(f, "io error: {s}"),
            CliError::PrecisionCap { requested, cap } => {
                write!(f, "PrecisionCap: {requested} orders requested but RAMICON_MAX_PREC is {cap}")
            }
            CliError::Core(e) => write!(f, "{e}"),
            CliError::CheckFailed(s) => write!(f, "{s}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Core(Error::from(e))
    }
}
