use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no foreground found in image")]
    NoForeground,

    #[error("unsupported complex filter order {0} (only +1 and -1 are supported)")]
    UnsupportedOrder(i32),

    #[error("degenerate core: all axis counts are zero")]
    DegenerateCore,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("failed to decode image {path}: {reason}")]
    Decode { path: PathBuf, reason: String },

    #[error("ingestion failed:\n{}", .0.join("\n"))]
    Ingestion(Vec<String>),

    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
