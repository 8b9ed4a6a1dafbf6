use std::path::PathBuf;

use ocrkit_core::metrics::MetricsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest line {line}: {reason}")]
    MalformedManifestLine { line: usize, reason: String },
    #[error("manifest line {line}: duplicate id `{id}`")]
    DuplicateId { id: String, line: usize },
    #[error("sample `{id}` has no anchor text, required by the with_metadata condition")]
    MissingAnchor { id: String },
    #[error("endpoint {url} unreachable after {attempts} attempts: {reason}")]
    EndpointUnreachable { url: String, attempts: u32, reason: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl EvalError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        EvalError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, EvalError>;
