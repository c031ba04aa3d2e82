use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the numerical kernels, estimators and experiment runners.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid network spec: {0}")]
    InvalidSpec(String),

    #[error("svd did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    SvdNoConvergence { sweeps: usize, residual: f64 },

    #[error("power iteration did not converge after {iterations} iterations (last Rayleigh quotient {rayleigh:e})")]
    PowerIterationNoConvergence { iterations: usize, rayleigh: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("all {restarts} restarts diverged for draw {draw}")]
    AllRestartsDiverged { draw: usize, restarts: usize },

    #[error("training diverged at epoch {epoch}")]
    TrainingDiverged { epoch: usize, trace: Vec<f64> },

    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerical machinery itself (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SvdNoConvergence { .. }
                | Error::PowerIterationNoConvergence { .. }
                | Error::NonFinite(_)
                | Error::AllRestartsDiverged { .. }
                | Error::TrainingDiverged { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
