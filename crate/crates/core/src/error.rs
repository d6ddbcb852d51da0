use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A claimed property could not be certified.
    #[error("certificate failure: {0}")]
    Certificate(String),
    #[error("not induced: {0}")]
    NotInduced(String),
}

pub type Result<T> = core::result::Result<T, Error>;
