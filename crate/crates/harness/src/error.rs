use thiserror::Error;

/// Exit codes of the `inh` binary.
pub mod exit {
    pub const CONVERGED: u8 = 0;
    pub const RUNTIME: u8 = 1;
    pub const NOT_CONVERGED: u8 = 2;
    pub const CONFIG: u8 = 3;
    pub const VERIFICATION: u8 = 4;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Solver(inexact_newton::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// The requested check needs dense matrices that are too large.
    #[error("refused: {0}")]
    Refused(String),
}

impl From<inexact_newton::Error> for HarnessError {
    fn from(err: inexact_newton::Error) -> Self {
        match err {
            inexact_newton::Error::Config(m) => Self::Config(m),
            other => Self::Solver(other),
        }
    }
}

impl HarnessError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Refused(_) => exit::CONFIG,
            Self::Solver(_) | Self::Io(_) => exit::RUNTIME,
        }
    }
}
