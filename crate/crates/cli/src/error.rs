use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("{failed} of {total} checks failed")]
    Validation { failed: usize, total: usize },

    #[error("enumeration budget refused: {}", .0.join("; "))]
    Budget(Vec<String>),

    #[error(transparent)]
    Core(#[from] abstain_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(vec![msg.into()])
    }

    /// Process exit status: 2 for configuration errors, 3 for failed
    /// validation, 4 for budget refusals, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Validation { .. } => 3,
            Self::Budget(_) | Self::Core(abstain_core::Error::BudgetExceeded { .. }) => 4,
            Self::Core(_) => 2,
            Self::Io { .. } | Self::Csv(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
