use thiserror::Error;

/// Errors raised by the numerical engines.
///
/// The variants follow the error classes of the public contracts: bad
/// caller input, violated type invariants at construction, inconsistent
/// solver configuration, non-finite arithmetic, cases that are recognized
/// but deliberately rejected, violated operation preconditions, and
/// requests over a hard resource cap.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical fault: {0}")]
    Numerical(String),
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("refused: {0}")]
    Refusal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
