//! Command implementations behind the `cvclone` binary.

pub mod commands;
pub mod config;

use std::path::PathBuf;

pub use commands::{cmd_clone, cmd_povm, cmd_sweep, cmd_verify, CheckStatus, VerifyReport, SWEEP_COLUMNS};
pub use config::{BackendChoice, Command, Fault, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{} check(s) failed: {}", .0.len(), .0.join(", "))]
    ChecksFailed(Vec<String>),
    #[error(transparent)]
    Core(#[from] cvclone::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Core(e) => match e {
                cvclone::Error::InvalidArgument(_) | cvclone::Error::Domain(_) | cvclone::Error::Unsupported(_) => 2,
                _ => 1,
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

/// Twelve significant digits in scientific notation.
pub fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(sci(0.25), "2.50000000000e-1");
        assert_eq!(sci(-14.154262241479262), "-1.41542622415e1");
        assert_eq!(sci(0.0), "0.00000000000e0");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::ChecksFailed(vec!["a".into()]).exit_code(), 1);
        assert_eq!(CliError::io("p", std::io::Error::other("x")).exit_code(), 3);
        assert_eq!(CliError::Core(cvclone::Error::Domain("d".into())).exit_code(), 2);
    }
}
