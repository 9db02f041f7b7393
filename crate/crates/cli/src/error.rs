use chiral_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Pass = 0,
    Failed = 1,
    Config = 2,
    Degenerate = 3,
    SingularWindow = 4,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown component '{0}' (expected g11, g12, g22, lambda or phi)")]
    UnknownComponent(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed field file {path}: {reason}")]
    FieldFile { path: String, reason: String },

    #[error("malformed manifest: {0}")]
    Manifest(String),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Core(CoreError::DegenerateField(_)) => ExitCode::Degenerate,
            CliError::Core(CoreError::SingularLambda { .. }) => ExitCode::SingularWindow,
            CliError::Core(CoreError::NonRealOutput { .. })
            | CliError::Core(CoreError::SingularSystem(_)) => ExitCode::Failed,
            CliError::Core(_)
            | CliError::Config(_)
            | CliError::UnknownComponent(_)
            | CliError::FieldFile { .. }
            | CliError::Manifest(_)
            | CliError::Io { .. } => ExitCode::Config,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
