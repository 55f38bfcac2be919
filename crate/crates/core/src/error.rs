use thiserror::Error;

use crate::gridfield::Domain;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-finite value {value} at grid index {index} (x = {point:?})")]
    NonFinite {
        index: usize,
        point: Vec<f64>,
        value: String,
    },

    #[error("expected a {expected} field, got {found}")]
    DomainMismatch { expected: Domain, found: Domain },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("malformed field dump: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
