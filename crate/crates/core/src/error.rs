use thiserror::Error;

/// Errors raised by model construction, sampling, calibration and estimation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter or argument lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quantile was requested at probability one for an unbounded distribution.
    #[error("quantile at p = 1 is unbounded")]
    UnboundedQuantile,

    /// A numeric inversion stopped before reaching its tolerance.
    #[error("numeric inversion failed after {iterations} iterations (residual {residual:e})")]
    InversionFailed { iterations: usize, residual: f64 },

    /// The operation is not available for this copula family.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Discrete calibration produced a negative probability because the
    /// diagonal objective decreases between two grid points.
    #[error("negative calibration weight at atom k = {k}: objective decreases from {previous} to {current}")]
    NegativeWeight { k: usize, previous: f64, current: f64 },

    /// The rejection sampler exceeded its attempt cap.
    #[error("rejection sampler gave up after {attempts} draws at threshold {lambda}")]
    RunawayRejection { attempts: u64, lambda: f64 },

    /// Conditioning on an event of probability zero.
    #[error("degenerate conditioning: {0}")]
    DegenerateConditioning(String),

    /// No sample lies strictly beyond the value-at-risk.
    #[error("empty tail beyond VaR at level {alpha}")]
    DegenerateTail { alpha: f64 },

    /// Estimator called on too few samples.
    #[error("need at least {needed} samples, got {got}")]
    EmptySample { needed: usize, got: usize },

    /// Importance-sampling estimates have zero variance across repetitions.
    #[error("degenerate reduction factor: {0}")]
    DegenerateVariance(String),

    /// Configuration could not be parsed or is inconsistent.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
