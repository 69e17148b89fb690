use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]: need finite bounds with hi > lo")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("threshold {t} outside interval [{lo}, {hi}]")]
    ThresholdOutsideInterval { t: f64, lo: f64, hi: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point {x} outside domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("query budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("insufficient points for a rate fit: {usable} usable, {excluded} excluded")]
    InsufficientPoints { usable: usize, excluded: usize },

    #[error("budget {budget} is smaller than the {epochs} epochs of the schedule; raise the budget or set an explicit epoch count")]
    BudgetBelowEpochs { budget: u64, epochs: u64 },

    #[error("problem/estimate mismatch: {0}")]
    Mismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
