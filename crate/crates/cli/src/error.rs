use std::fmt::Display;

/// Exit code 2: the invocation or its configuration is wrong.
pub const EXIT_USAGE: i32 = 2;
/// Exit code 1: a valid run failed.
pub const EXIT_RUNTIME: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(#[from] dqa_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Display) -> CliError {
    CliError::Usage(msg.to_string())
}

/// Reclassify a failure while resolving inputs as a usage error.
pub trait OrUsage<T> {
    fn or_usage(self, what: &str) -> CliResult<T>;
}

impl<T, E: Display> OrUsage<T> for Result<T, E> {
    fn or_usage(self, what: &str) -> CliResult<T> {
        self.map_err(|e| CliError::Usage(format!("{what}: {e}")))
    }
}
