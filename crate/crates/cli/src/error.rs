use std::path::PathBuf;

use thiserror::Error;

/// Problems with the input. All of them exit with status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", .path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", .path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{}: expected a .fu, .hg or .slp file", .0.display())]
    UnknownExtension(PathBuf),
    #[error("{}: {what} is not accepted by `{command}`", .path.display())]
    WrongKind { path: PathBuf, what: &'static str, command: &'static str },
    #[error("{0}")]
    Invalid(String),
}
