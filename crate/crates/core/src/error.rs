//! Error type shared by every module of the library.

use thiserror::Error;

/// Errors raised by root-system construction, group arithmetic and the
/// various oracles.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported root system {0}")]
    UnsupportedType(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("element is not a minimal coset representative")]
    NotMinimal,

    #[error("element {0} is not in the subregular left cell")]
    NotInCell(String),

    #[error("query outside the table (length bound {bound}, needed {needed})")]
    OutOfTable { bound: usize, needed: usize },

    #[error("non-integral value {value} for label {label} at gamma {gamma}")]
    NonIntegral {
        label: String,
        gamma: String,
        value: String,
    },

    #[error("inexact division while expanding {0}")]
    InexactDivision(String),

    #[error("unknown label {0}")]
    UnknownLabel(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error("budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
