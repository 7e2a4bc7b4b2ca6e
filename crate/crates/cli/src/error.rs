use thiserror::Error;

/// Top-level failure categories, each mapped to a fixed exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or missing input files. Exit code 2.
    #[error("{0}")]
    Input(String),
    /// Structurally valid inputs with nothing to analyze. Exit code 3.
    #[error("{0}")]
    EmptyData(String),
    /// Bad invocation or configuration values. Exit code 64.
    #[error("{0}")]
    Usage(String),
    /// A stage was invoked before the stage that produces its input. Exit code 2.
    #[error("missing upstream artifact: {0}")]
    MissingUpstream(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::MissingUpstream(_) => 2,
            CliError::EmptyData(_) => 3,
            CliError::Usage(_) => 64,
        }
    }
}
