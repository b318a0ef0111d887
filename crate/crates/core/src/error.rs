use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("contract violation: {0}")]
    Contract(String),

    /// The activation does not satisfy the hypothesis a construction needs.
    /// `condition` names the violated requirement, e.g. `(iv)(a)/(iv)(b)` or `C1`.
    #[error("unsupported activation {activation}: requires {condition}")]
    UnsupportedActivation {
        activation: String,
        condition: String,
    },

    #[error("construction failed: {message} (best sup-error {best_error:e})")]
    ConstructionFailure { message: String, best_error: f64 },

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("invalid network document: {0}")]
    Validation(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
