use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("singular input: Y = {0} lies in the singular set")]
    Singular(String),
    #[error("candidate family too small: {0}")]
    FamilyTooSmall(String),
    #[error("side length below floor: {0}")]
    BelowFloor(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
