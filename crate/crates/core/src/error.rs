use thiserror::Error;

/// Errors produced by the estimation routines.
///
/// Configuration problems (bad bandwidths, empty windows) are distinguished
/// from data problems (sampling-condition violations, degenerate inputs) and
/// from points where an estimator is simply undefined (zero kernel mass).
#[derive(Debug, Error)]
pub enum Error {
    #[error("bandwidth must be positive, got {0}")]
    NonpositiveBandwidth(f64),

    #[error("bandwidth exponent {0} outside the open interval (1/5, 1/3)")]
    BandwidthExponent(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("empty dataset")]
    EmptyData,

    #[error("empty grid")]
    EmptyGrid,

    #[error("evaluation window is empty: max(x) - min(x) = {span} does not exceed 2h = {twice_h}")]
    EmptyWindow { span: f64, twice_h: f64 },

    #[error("x = {x} lies outside the evaluation window [{lo}, {hi}]")]
    OutsideWindow { x: f64, lo: f64, hi: f64 },

    #[error("not estimable at x = {x}: zero kernel mass")]
    NotEstimable { x: f64 },

    #[error("record {index} violates the sampling condition {condition}")]
    SamplingCondition { index: usize, condition: &'static str },

    #[error("no sampled rows")]
    NoSampledRows,

    #[error(
        "fitted curve leaves {mass:.6} probability mass outside the observed range \
         (threshold {threshold})"
    )]
    PartialSupport { mass: f64, threshold: f64 },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
