use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown key `{key}`{}", line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    UnknownKey { key: String, line: Option<usize> },

    #[error("invalid override `{0}`, expected key=value")]
    BadOverride(String),

    #[error("{key}: {msg}")]
    BadValue { key: String, msg: String },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Solver(#[from] fractb::Error),

    /// Outputs were written, but some solve hit its iteration cap.
    #[error("{0}")]
    NotConverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. }
            | CliError::UnknownKey { .. }
            | CliError::BadOverride(_)
            | CliError::BadValue { .. }
            | CliError::InvariantViolation(_) => 2,
            CliError::Io { .. } => 1,
            CliError::NotConverged(_) | CliError::Solver(fractb::Error::NotConverged(_)) => 3,
            CliError::Solver(_) => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
