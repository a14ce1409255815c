use thiserror::Error;

/// Failure of a command, partitioned by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config file or command-line arguments.
    #[error("{0}")]
    Config(String),

    /// The numerics failed at run time, e.g. a positivity violation.
    #[error("{0}")]
    Numerical(String),

    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<bmnet_core::Error> for CliError {
    fn from(e: bmnet_core::Error) -> Self {
        use bmnet_core::Error as E;
        match e {
            E::InvalidArgument(_) | E::InvalidConfig(_) | E::Parse(_) => CliError::Config(e.to_string()),
            E::Domain(_) | E::DegenerateSample(_) | E::Positivity { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
