use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed raster or config text.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Structurally valid input violating a semantic constraint.
    #[error("validation error: {0}")]
    Validation(String),

    /// Caller misuse: bad argument ranges, stepping a stopped run, etc.
    #[error("usage error: {0}")]
    Usage(String),

    /// Requested population does not fit the map.
    #[error("capacity error: region {region} has {free} free cells but needs {needed}")]
    Capacity {
        region: usize,
        free: usize,
        needed: usize,
    },

    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
