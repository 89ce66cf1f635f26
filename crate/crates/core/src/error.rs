use thiserror::Error;

/// Errors raised by the time-frequency and operator-ideal routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("window must be nonzero")]
    ZeroWindow,

    #[error("quantization matrix not well-defined mod {modulus}: {reason}")]
    InvalidQuantization { modulus: usize, reason: String },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("not a Gabor frame; increase redundancy (ab <= N required, oversample)")]
    NotAFrame { lower_bound: f64 },

    #[error("window pair is not dual on this lattice (residual {residual:e})")]
    NotDual { residual: f64 },

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("exponent condition violated (slack {slack})")]
    ExponentCondition { slack: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Whether the error stems from a numerical condition (as opposed to bad input or configuration).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotAFrame { .. } | Error::NotDual { .. } | Error::ZeroWindow
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
