use core::fmt;

use alloc::string::String;

/// Errors raised by the numerical kernels.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(String),
    /// Evaluation at a pole of a meromorphic function.
    Pole(String),
    /// Not enough input data to reach the requested accuracy.
    Truncation { needed: usize, available: usize },
    /// Unknown form identifier or malformed form parameters.
    UnknownForm(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Pole(msg) => write!(f, "pole: {msg}"),
            Error::Truncation { needed, available } => write!(
                f,
                "insufficient coefficients: tail bound needs {needed}, only {available} available"
            ),
            Error::UnknownForm(msg) => write!(f, "unknown form: {msg}"),
        }
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

impl core::error::Error for Error {}
