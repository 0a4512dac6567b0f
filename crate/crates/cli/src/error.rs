use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Compute(#[from] loewner_range::Error),
    #[error("audit failed: {0}")]
    Audit(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for rejected input, 1 for failed audits and runtime failures.
    pub fn exit_code(&self) -> u8 {
        use loewner_range::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(
                E::InvalidHorizon { .. }
                | E::InvalidParameter { .. }
                | E::HypothesisViolated { .. },
            ) => 2,
            _ => 1,
        }
    }
}
