use thiserror::Error;

/// Errors raised anywhere in the analysis pipeline.
///
/// `Unsupported` marks a configuration where the theory gives no answer
/// (λ ≤ 1, a non-simple λ, the three-orbit Y-model). `Contradiction` means
/// two independent exact computations disagreed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("internal contradiction: {0}")]
    Contradiction(String),

    #[error("interval refinement limit reached: {0}")]
    RefinementLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) => 1,
            Error::Unsupported(_) => 2,
            _ => 3,
        }
    }
}
