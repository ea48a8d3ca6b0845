use thiserror::Error;

/// Failures surfaced by the commands, split by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, configuration, or I/O; exit status 1.
    #[error("{0}")]
    Validation(String),
    /// The numerics did not converge or a run leaked; exit status 2.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    /// Wraps a library error, prefixing the offending config field.
    pub fn from_core(field: &str, err: toa_core::Error) -> Self {
        let msg = if field.is_empty() { err.to_string() } else { format!("{field}: {err}") };
        if err.is_numerical() {
            CliError::Numerical(msg)
        } else {
            CliError::Validation(msg)
        }
    }

    pub fn field(field: &str, msg: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("{field}: {msg}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
