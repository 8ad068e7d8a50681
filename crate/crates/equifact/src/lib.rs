//! Scenario files, canonical reports and the `equifact check` command.

use std::path::PathBuf;

pub mod canonical;
pub mod run;
pub mod scenario;
pub mod table;

pub use canonical::{to_canonical_json, SCHEMA_VERSION};
pub use run::{execute, run, Document, RunOutcome, ScanRow};
pub use scenario::{parse_scenario, ModelKind, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] equifact_core::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
