use thiserror::Error;

/// Failures surfaced by the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A content product hit a pole. Cells are 1-based (row, column).
    #[error("pole at cell ({row},{col}), content argument {arg}")]
    Pole { row: usize, col: usize, arg: i64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid model: {0}")]
    Validation(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("scale guard: {0}")]
    ScaleGuard(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
