use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("polynomial is not irreducible over Q")]
    Reducible,
    #[error("not a primitive quartic CM field: {0}")]
    NotCm(String),
    #[error("resource ceiling reached: {0}")]
    Resource(String),
    #[error("numerical precision insufficient: {0}")]
    Precision(String),
    #[error("inconsistent group data: {0}")]
    Inconsistent(String),
}

pub type Result<T> = core::result::Result<T, Error>;
