use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("ragged table: no value for model `{model}`, metric `{metric}`, sample `{sample}`")]
    RaggedTable {
        model: String,
        metric: String,
        sample: String,
    },
    #[error("duplicate cell: model `{model}`, metric `{metric}`, sample `{sample}`")]
    DuplicateCell {
        model: String,
        metric: String,
        sample: String,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] stodom_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
