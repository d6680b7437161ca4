//! File formats, reports, parallel drivers and the command-line front end
//! for [`polymaj_core`].

pub mod cli;
pub mod io;
pub mod par;
pub mod report;

use std::path::PathBuf;

pub use polymaj_core as core;

/// Errors of the std layer. Each maps to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] polymaj_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Exit codes: 0 success, 1 failed verification, 2 usage or parse error,
/// 3 resource cap.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const RESOURCE: i32 = 3;
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(polymaj_core::Error::ResourceCap { .. }) => exit::RESOURCE,
            Error::Core(polymaj_core::Error::Exhausted { .. }) => exit::FAIL,
            _ => exit::USAGE,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(source: std::io::Error) -> Self {
        Error::Io { path: PathBuf::new(), source }
    }
}
