use std::path::PathBuf;

use eulerchi_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION: i32 = 1;
    pub const UNSUPPORTED: i32 = 2;
    pub const DISAGREEMENT: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: field `{field}`: {source}", path.display())]
    Json { path: PathBuf, field: String, source: serde_json::Error },
    #[error("{context}: {source}")]
    Invalid { context: String, source: CoreError },
    #[error("{0}")]
    Compute(#[from] CoreError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn invalid(context: impl Into<String>, source: CoreError) -> Self {
        CliError::Invalid { context: context.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(e) => match e {
                e if e.is_unsupported() => exit::UNSUPPORTED,
                CoreError::RecursionCap { .. } => exit::UNSUPPORTED,
                CoreError::Disagreement { .. } => exit::DISAGREEMENT,
                _ => exit::VALIDATION,
            },
            _ => exit::VALIDATION,
        }
    }

    /// Short machine-readable kind for JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "schema",
            CliError::Invalid { .. } | CliError::Usage(_) => "validation",
            CliError::Compute(e) if e.is_unsupported() => "unsupported_combination",
            CliError::Compute(CoreError::RecursionCap { .. }) => "recursion_cap",
            CliError::Compute(CoreError::Disagreement { .. }) => "disagreement",
            CliError::Compute(_) => "validation",
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
