use thiserror::Error;

/// Error type shared by all modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: &'static str, reason: String },
    #[error("size limit exceeded: {0}")]
    Size(String),
    #[error("numerical failure in {op}: {reason}")]
    Numerical { op: &'static str, reason: String },
    #[error("{op} did not converge: {reason}")]
    NotConverged { op: &'static str, reason: String },
    #[error("data file {file}: {reason}")]
    Data { file: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        field,
        reason: reason.into(),
    }
}

pub(crate) fn numerical(op: &'static str, reason: impl Into<String>) -> Error {
    Error::Numerical {
        op,
        reason: reason.into(),
    }
}

pub(crate) fn require_finite(field: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(field, format!("must be finite, got {x}")))
    }
}

pub(crate) fn require_positive(field: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(invalid(
            field,
            format!("must be positive and finite, got {x}"),
        ))
    }
}

pub(crate) fn require_non_negative(field: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(invalid(
            field,
            format!("must be non-negative and finite, got {x}"),
        ))
    }
}
