use thiserror::Error;

/// Errors raised while building spaces or running checks.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid shape, scenario or lemma input. The message names the offending field.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("configuration error: interior of {0} is empty at this resolution")]
    EmptyInterior(String),

    #[error("configuration error: interior of {0} is disconnected ({1} components)")]
    Disconnected(String, usize),

    /// No admissible sample could be formed (e.g. a ball too small for the grid).
    #[error("no valid sample: {0}")]
    NoValidSample(String),

    #[error("unbounded space: {0}")]
    Unbounded(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Whether the error stems from configuration rather than a failed check.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::EmptyInterior(_) | Error::Disconnected(..) | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
