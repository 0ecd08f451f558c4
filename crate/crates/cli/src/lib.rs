//! Batch driver over the workspace crates: a flat-key run configuration,
//! one command per dataset, artifacts stamped with their provenance, and
//! the verification suite.

pub mod app;
pub mod artifact;
pub mod commands;
pub mod config;
pub mod verify;

pub use artifact::{config_hash, read_csv, ArtifactWriter, Meta};
pub use config::{parse_assignment, RunConfig};

/// Environment variable fixing the worker thread count.
pub const THREADS_VAR: &str = "HARPER_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 3,
        }
    }
}
