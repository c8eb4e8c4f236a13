//! Error type shared by every module of the crate.

use std::path::PathBuf;

/// Failures raised by the flow library.
#[derive(Debug, thiserror::Error)]
pub enum FlowError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The anisotropy parameter does not give a uniformly convex Wulff shape.
    #[error("invalid anisotropy: epsilon = {epsilon} is outside the convex range (-1/2, 1)")]
    InvalidModel { epsilon: f64 },

    /// A profile with non-positive radius was passed to a pointwise geometric formula.
    #[error("degenerate profile: r = {r} at z = {z}")]
    DegenerateProfile { z: f64, r: f64 },

    /// The evolving profile touched (or crossed) the rotation axis.
    #[error("pinch-off: r = {r} at z = {z}")]
    Pinch { z: f64, r: f64 },

    /// The linear system could not be factored.
    #[error("singular system: pivot {pivot:e} in column {column} (scale {scale:e})")]
    Singular {
        column: usize,
        pivot: f64,
        scale: f64,
    },

    /// Configuration rejected before a run starts.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = FlowError> = std::result::Result<T, E>;

impl FlowError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FlowError::Io {
            path: path.into(),
            source,
        }
    }
}
