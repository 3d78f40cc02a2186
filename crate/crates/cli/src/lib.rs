//! Front end for `cmi`: CSV ingestion, flag handling and the key-value
//! report format.

pub mod args;
pub mod ingest;
pub mod report;

use thiserror::Error;

pub use ingest::{ingest_csv, ingest_csv_reader};
pub use report::{Document, Value};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed CSV at line {line}: {message}")]
    MalformedCsv { line: u64, message: String },

    #[error("I/O failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] cmi_core::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
