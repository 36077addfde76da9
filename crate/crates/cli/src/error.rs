use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] rdb_core::Error),

    #[error("config: {0}")]
    Config(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical or output failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_parameter_error() => 2,
            CliError::Config(_) | CliError::Parameter(_) => 2,
            CliError::Core(_) | CliError::Io(_) => 3,
        }
    }
}
