use thiserror::Error;

/// Errors surfaced by the simulator and rate calculators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Requested a computation the rate machinery does not define,
    /// e.g. worst-case rates for a non-square antenna layout.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// The worst-case direction is undefined (zero coupling vector with a
    /// non-degenerate constraint set). Reported rather than guessed.
    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
