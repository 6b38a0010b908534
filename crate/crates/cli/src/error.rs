use thiserror::Error;

use involute_core::analysis::AnalysisError;
use involute_core::config::ConfigError;
use involute_core::{BuilderError, SetError};

/// Exit status for checks that ran and failed.
pub const VERIFICATION_FAILED: u8 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Builder(#[from] BuilderError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// 2 parse or usage, 3 input validation, 4 construction, 5 I/O.
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(ConfigError::Parse { .. } | ConfigError::Float { .. }) => 2,
            CliError::Config(ConfigError::Set(SetError::External { .. })) => 5,
            CliError::Config(_) => 3,
            CliError::Builder(e) | CliError::Analysis(AnalysisError::Builder(e)) => builder_code(e),
            CliError::Analysis(_) => 4,
            CliError::Io { .. } => 5,
        }
    }
}

fn builder_code(e: &BuilderError) -> u8 {
    match e {
        BuilderError::Validation(_) | BuilderError::SeparatorUnverifiable(_) => 3,
        _ => 4,
    }
}
