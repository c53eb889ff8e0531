//! Common surface of the conditional-distribution estimators: a valid
//! evaluation window, an x-slice that is a step distribution in y, and
//! pointwise CDF evaluation.

use crate::error::Result;
use crate::kernel::Interval;
use crate::step::StepDistribution;

pub trait ConditionalCdf {
    /// The covariate window on which slices are defined.
    fn window(&self) -> Interval;

    /// The estimated conditional distribution of the response at `x`.
    fn slice(&self, x: f64) -> Result<StepDistribution>;

    fn evaluate(&self, y: f64, x: f64) -> Result<f64> {
        Ok(self.slice(x)?.cdf(y))
    }
}
