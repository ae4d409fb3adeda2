use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by exact computations.
///
/// `Precision` is special: it means the requested answer is not determined at
/// the working truncation length, never that the input was malformed. The CLI
/// maps it to its own exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("element outside the divided-power ideal: {0}")]
    NotInIdeal(String),
    #[error("inconsistent truncation tower: {0}")]
    InconsistentTower(String),
    #[error("rank instability at working precision: {0}")]
    RankInstability(String),
    #[error("iteration did not converge: {0}")]
    NonConvergent(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn precision<T>(msg: impl Into<String>) -> Result<T> {
        Err(Error::Precision(msg.into()))
    }

    pub fn invalid<T>(msg: impl Into<String>) -> Result<T> {
        Err(Error::Invalid(msg.into()))
    }
}
