use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Core(#[from] annealdp::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for usage errors, 3 for failed verification, 4 when a capacity
    /// guard trips, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        use annealdp::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Core(e) => match e {
                E::Capacity { .. } => 4,
                E::InvalidArgument(_) | E::Parse { .. } | E::Dimension { .. } => 2,
                E::NoConvergence { .. } => 3,
                _ => 1,
            },
            CliError::Io { .. } | CliError::Csv(_) => 1,
        }
    }
}
