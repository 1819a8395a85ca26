//! Shared error type.

use std::fmt;

/// Errors surfaced by the numerical routines.
#[derive(Debug)]
pub enum Error {
    /// Input outside a function's domain (nonpositive beta argument,
    /// point outside the ball, invalid parameter combination, ...).
    Domain(String),
    /// A series or iteration hit its term cap before meeting tolerance.
    Convergence(String),
    /// Numeric overflow of an otherwise well-defined quantity.
    Range(String),
    /// Adaptive quadrature could not meet the requested tolerance.
    Quadrature(String),
    /// An integral that diverges for the requested parameters.
    Divergent(String),
    /// Invalid test-field construction (negative power, nonpositive
    /// combination weight, planar node outside n = 2, ...).
    Field(String),
    /// A level profile violated monotonicity beyond its error bars, or a
    /// suite precondition on the profile failed.
    Profile(String),
    /// Malformed field description or coefficient file.
    Parse(String),
    /// I/O failure while reading or writing reports.
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Convergence(m) => write!(f, "convergence failure: {m}"),
            Error::Range(m) => write!(f, "range overflow: {m}"),
            Error::Quadrature(m) => write!(f, "quadrature failure: {m}"),
            Error::Divergent(m) => write!(f, "divergent integral: {m}"),
            Error::Field(m) => write!(f, "invalid field: {m}"),
            Error::Profile(m) => write!(f, "invalid level profile: {m}"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
            Error::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
