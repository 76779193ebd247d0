use thiserror::Error;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// One or more verification checks failed (exit 1).
    #[error("{failed} check(s) failed: {}", names.join(", "))]
    ChecksFailed { failed: usize, names: Vec<String> },

    /// The configuration or a command-line value is invalid (exit 2).
    #[error("configuration error: {0}")]
    Config(String),

    /// A valid run failed while executing (exit 3).
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ChecksFailed { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
