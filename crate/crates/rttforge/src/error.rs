use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("scalar mode mismatch: exact and approx values mixed")]
    ModeMismatch,
    #[error("variable lists differ: {0:?} vs {1:?}")]
    VarMismatch(Vec<String>, Vec<String>),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("window: {0}")]
    Window(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error("cancellation failed: {0}")]
    Cancellation(String),
    #[error("rewrite did not terminate: {0}")]
    Confluence(String),
    #[error("tolerance exceeded: {0}")]
    Tolerance(String),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
