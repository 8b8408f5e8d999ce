use std::path::PathBuf;

use crate::indicator::IndicatorKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("row {row}: {message}")]
    Conflict { row: usize, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no company survived: {0}")]
    EmptyDataset(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("indicator {0} is constant across companies; min-max normalization is undefined")]
    DegenerateColumn(IndicatorKind),

    #[error("insufficient data: need at least {needed} usable pairs, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("insufficient points: need at least {needed}, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("seeds {first} and {second} share the same coordinates")]
    DuplicateSeed { first: u32, second: u32 },

    #[error("clustering still collapsed after {iterations} removal passes")]
    CollapseUnresolved { iterations: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Stable machine-readable tag, used in error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Conflict { .. } => "conflict",
            Error::Schema(_) => "schema",
            Error::Config(_) => "config",
            Error::EmptyDataset(_) => "empty_dataset",
            Error::Domain(_) => "domain",
            Error::DegenerateColumn(_) => "degenerate_column",
            Error::InsufficientData { .. } => "insufficient_data",
            Error::InsufficientPoints { .. } => "insufficient_points",
            Error::DuplicateSeed { .. } => "duplicate_seed",
            Error::CollapseUnresolved { .. } => "collapse_unresolved",
            Error::Io { .. } => "io",
            Error::Json { .. } => "json",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}
