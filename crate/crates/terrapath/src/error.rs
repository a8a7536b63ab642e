//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by grid construction, raster ingestion, file I/O and the
/// benchmark harness. Planner failures are not errors; they are reported
/// through [`crate::planners::PlanStatus`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("empty path has no length")]
    EmptyPath,

    #[error("no free space in grid")]
    NoFreeSpace,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("{0}")]
    Format(String),

    #[error("manifest error: {0}")]
    Manifest(String),
}

impl Error {
    /// Attach a file path to a raw I/O error.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
