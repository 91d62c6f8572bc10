//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input stream contained no parseable event records.
    #[error("event stream is empty (no parseable records)")]
    EmptyEventStream,

    /// No session held two or more events, so no duration can be formed.
    #[error("no session contains at least two events; duration series is empty")]
    EmptyDurations,

    /// All values identical (zero dispersion) where spread is required.
    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    /// An iterative estimator failed to converge.
    #[error("{what} did not converge after {iterations} iterations (gradient norm {grad_norm:.3e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        grad_norm: f64,
    },

    /// A model density vanished on a non-empty bin, so the log residual is infinite.
    #[error("model density is zero at non-empty bin {bin} (center {center:.6e}); residual is infinite")]
    InfiniteResidual { bin: usize, center: f64 },

    /// Densities to be compared share no non-empty bins.
    #[error("densities have no overlapping support on the shared grid")]
    NoOverlappingSupport,

    /// An octile group has no successor observations.
    #[error("octile group {group} has no successor observations")]
    EmptyCondition { group: usize },

    /// A duration fell in a minute for which the intraday profile is undefined.
    #[error("intraday profile is undefined at minute {minute}")]
    MissingProfileMinute { minute: u16 },

    /// A detrending window had zero residual while a non-positive moment order was requested.
    #[error("window {index} has zero detrended residual; F_q is singular for q <= 0")]
    SingularWindow { index: usize },

    /// Distribution parameters outside the normalizable regime.
    #[error("non-normalizable distribution: {0}")]
    NonNormalizable(String),

    /// Guard against absurd allocation sizes.
    #[error("size guard: {0}")]
    SizeGuard(String),

    /// A numeric routine hit a singular or ill-conditioned system.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A configured input path does not exist.
    #[error("missing input: {}", .0.display())]
    MissingInput(PathBuf),

    /// A multi-class operation was handed an incomplete set of inputs.
    #[error("incomplete input: {0}")]
    IncompleteInput(String),

    /// Malformed file contents (events, durations, series, config).
    #[error("format error in {path}: {msg}")]
    Format { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
