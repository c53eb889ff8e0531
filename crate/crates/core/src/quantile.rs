//! Conditional quantiles by inversion of an estimated conditional CDF:
//! in y at fixed x (the usual generalized inverse of a slice) and in x at
//! fixed y (level-set inversion across the covariate, for monotone
//! regression functions).

use crate::conditional::ConditionalCdf;
use crate::error::{Error, Result};
use crate::isotonic::{isotonic_fit, Direction};
use crate::step::QuantileValue;

/// How the x-profile y ↦ F̂(y; ·) is inverted at level u.
///
/// `SupAtLeast` returns the largest grid x with F̂(y;x) ≥ u — the inverse for
/// surfaces decreasing in x (increasing regression function). `InfAtLeast`
/// is the mirror for surfaces increasing in x.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XInversion {
    SupAtLeast,
    InfAtLeast,
}

/// q̂₂(u; x): the generalized inverse of the x-slice at level u. Levels above
/// the attainable mass of a defective slice return the right endpoint,
/// flagged.
pub fn quantile_in_y(cdf: &impl ConditionalCdf, u: f64, x: f64) -> Result<QuantileValue> {
    if !(0.0 < u && u < 1.0) {
        return Err(Error::InvalidArgument(format!("u = {u} must lie in (0, 1)")));
    }
    Ok(cdf.slice(x)?.quantile(u))
}

/// q̂₁(u; y): level-set inversion of x ↦ F̂(y; x) over a caller-supplied grid
/// inside the window. The result is flagged when the level set touches the
/// grid edge or is empty (the true crossing may lie beyond the grid).
///
/// With `pre_monotonize`, the x-profile is first projected onto monotone
/// profiles (the estimator is only monotone in x up to small random sets).
pub fn quantile_in_x(
    cdf: &impl ConditionalCdf,
    u: f64,
    y: f64,
    grid: &[f64],
    direction: XInversion,
    pre_monotonize: bool,
) -> Result<QuantileValue> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if !(0.0 < u && u < 1.0) {
        return Err(Error::InvalidArgument(format!("u = {u} must lie in (0, 1)")));
    }
    let window = cdf.window();
    let mut xs: Vec<f64> = grid.to_vec();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut profile = Vec::with_capacity(xs.len());
    for &x in &xs {
        if !window.contains(x) {
            return Err(Error::OutsideWindow { x, lo: window.lo, hi: window.hi });
        }
        profile.push(cdf.evaluate(y, x)?);
    }
    if pre_monotonize {
        let dir = match direction {
            XInversion::SupAtLeast => Direction::Decreasing,
            XInversion::InfAtLeast => Direction::Increasing,
        };
        let weights = vec![1.0; profile.len()];
        profile = isotonic_fit(&profile, &weights, dir);
    }
    let n = xs.len();
    match direction {
        XInversion::SupAtLeast => match profile.iter().rposition(|&f| f >= u) {
            Some(i) => Ok(QuantileValue { value: xs[i], at_boundary: i == n - 1 }),
            None => Ok(QuantileValue { value: xs[0], at_boundary: true }),
        },
        XInversion::InfAtLeast => match profile.iter().position(|&f| f >= u) {
            Some(i) => Ok(QuantileValue { value: xs[i], at_boundary: i == 0 }),
            None => Ok(QuantileValue { value: xs[n - 1], at_boundary: true }),
        },
    }
}
