//! Error type shared by all pipeline stages.

use thiserror::Error;

/// Errors produced by the scoring, depth and localization operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Structurally unusable input: dimension mismatch, too few frames, missing data.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A tunable was given a value outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input is well-formed but carries no usable signal (zero-mass plane,
    /// constant prediction, all-constant score series).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A file could not be parsed as the expected format.
    #[error("format error: {0}")]
    FormatError(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
