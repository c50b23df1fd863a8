//! The `qep` command line: indexing, ranking, expansion, prediction, full
//! experiments and exposure combinatorics.

pub mod args;
pub mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

pub use args::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] qep_core::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

/// How a command finished when it did not fail outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Some queries failed and were skipped.
    Partial,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Partial => 2,
        }
    }
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s.code())
    }
}

/// Exit code for a command that failed outright.
pub const VALIDATION_EXIT_CODE: u8 = 1;

pub fn run(cli: Cli) -> Result<Status, CliError> {
    match cli.command {
        Command::Index(a) => commands::index(&a),
        Command::Rank(a) => commands::rank(&a),
        Command::Expand(a) => commands::expand(&a),
        Command::Predict(a) => commands::predict(&a),
        Command::Run(a) => commands::run(&a),
        Command::AnalyzeExposure(a) => commands::analyze_exposure(&a),
        Command::Synth(a) => commands::synth(&a),
    }
}
