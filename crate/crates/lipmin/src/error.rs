//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument was outside its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A Laplace-transform radicand or density argument left its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quantity is not covered by the closed forms implemented here.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The requested time lies outside the path's window.
    #[error("time {t} outside path window [{tmin}, {tmax}]")]
    OutsideWindow { t: f64, tmin: f64, tmax: f64 },

    /// The simulation window is too small for the requested extraction.
    #[error("window too small: {0}")]
    WindowTooSmall(String),

    /// An infimum or argmin was attained at (or too close to) the window
    /// edge, so the truncated computation cannot stand in for the
    /// whole-line one.
    #[error("truncation unsafe: {0}")]
    TruncationUnsafe(String),

    /// Mean of the jump law does not exist, so the minorant existence
    /// criterion cannot be evaluated.
    #[error("existence undecidable: {0}")]
    ExistenceUndecidable(String),

    /// An excursion failed its internal consistency checks.
    #[error("corrupt excursion: {0}")]
    CorruptExcursion(String),

    /// A sampler exhausted its retry budget.
    #[error("sampler failed: {0}")]
    SamplerFailed(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
