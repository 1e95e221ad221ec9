//! Exit-code classification of command failures.

use std::fmt;
use std::process::ExitCode;

/// A failed command: bad input (exit 2) or a verification-domain error (exit 3).
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Domain(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Usage(_) => ExitCode::from(2),
            Failure::Domain(_) => ExitCode::from(3),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(e) | Failure::Domain(e) => write!(f, "{e:#}"),
        }
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub trait Classify<T> {
    fn usage(self, context: impl fmt::Display) -> CmdResult<T>;
    fn domain(self, context: impl fmt::Display) -> CmdResult<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self, context: impl fmt::Display) -> CmdResult<T> {
        self.map_err(|e| Failure::Usage(e.into().context(context.to_string())))
    }

    fn domain(self, context: impl fmt::Display) -> CmdResult<T> {
        self.map_err(|e| Failure::Domain(e.into().context(context.to_string())))
    }
}

pub fn usage_error(message: impl fmt::Display) -> Failure {
    Failure::Usage(anyhow::anyhow!("{message}"))
}
