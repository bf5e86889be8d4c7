use thiserror::Error;

/// Failures mapped onto the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or invalid configuration: exit 2.
    #[error("{0}")]
    Usage(String),
    /// A checked invariant failed: exit 1.
    #[error("{0}")]
    Invariant(String),
    #[error(transparent)]
    Core(#[from] nlslab::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn usage(e: nlslab::Error) -> Self {
        CliError::Usage(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        use nlslab::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Invariant(_) => 1,
            CliError::Core(e) => match e {
                E::NotConverged { .. } | E::NoBracket { .. } | E::WrongBranch(_) | E::Collapsed | E::PairFailed { .. } => 3,
                E::InvalidParams(_) | E::InvalidGrid(_) | E::Config(_) | E::Parse { .. } | E::Geometry(_) => 2,
                _ => 1,
            },
            CliError::Io(_) | CliError::Json(_) => 1,
        }
    }
}
