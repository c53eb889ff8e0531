//! Nonparametric estimation of regression functions, conditional
//! distributions and conditional quantiles when the response is only
//! partially observed: case-control (response-biased) sampling, left/right/
//! double truncation, right censoring, and current-status observation.
//!
//! The estimators are kernel-weighted product-limit constructions sharing a
//! common step-distribution representation; quantiles come from generalized
//! inversion of the fitted conditional CDFs, in y at fixed x or across x at
//! fixed y.

pub mod bernoulli;
pub mod censored;
pub mod conditional;
pub mod current_status;
pub mod error;
pub mod exec;
pub mod isotonic;
pub mod kernel;
mod product_limit;
pub mod quantile;
pub mod step;
pub mod truncated;

pub use bernoulli::{BernoulliFit, BiasDesign, BinaryRecord};
pub use conditional::ConditionalCdf;
pub use censored::{
    DtConditionalEstimate, DtRecord, DtSample, DtTruncationNumerator, LtrcRecord, LtrcSample,
    RtRecord, RtSample,
};
pub use current_status::{CsConditionalCdf, CsRecord, CsSample, MonotoneFit};
pub use error::{Error, Result};
pub use isotonic::Direction;
pub use kernel::{Bandwidth, Interval, Kernel, KernelKind};
pub use quantile::XInversion;
pub use step::{QuantileValue, StepDistribution};
pub use truncated::{LtRecord, LtSample};
