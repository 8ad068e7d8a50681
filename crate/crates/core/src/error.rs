use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    /// Matrix that should be positive definite is not; carries the offending eigenvalue.
    Spectral { eigenvalue: f64 },
    OutOfWindow { character: Vec<i64> },
    SpaceMismatch,
    Parity(&'static str),
    /// Nonpositive orbit-length profile value at a grid index.
    Metric { index: usize, value: f64 },
    MissingMetric,
    Config(String),
    Input(String),
    Precondition(String),
    Usage(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension {
                context,
                expected,
                found,
            } => write!(f, "dimension error in {context}: expected {expected}, found {found}"),
            Error::Spectral { eigenvalue } => {
                write!(f, "matrix not positive definite (eigenvalue {eigenvalue:e})")
            }
            Error::OutOfWindow { character } => {
                write!(f, "character {character:?} lies outside the truncation window")
            }
            Error::SpaceMismatch => f.write_str("operators act on different sector spaces"),
            Error::Parity(msg) => write!(f, "parity error: {msg}"),
            Error::Metric { index, value } => {
                write!(f, "metric error: profile value {value} at grid index {index} is not positive")
            }
            Error::MissingMetric => f.write_str("model provides no metric data"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Input(msg) => write!(f, "input error: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition error: {msg}"),
            Error::Usage(msg) => write!(f, "usage error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
