//! Estimation of p(x) = Pr(Y = 1 | X = x) from plain samples and from
//! case-control (response-biased) samples.
//!
//! Under case-control sampling a record is included with probability λ₁ when
//! it is a case and λ₀ when it is a control; only the ratio θ = λ₀/λ₁
//! matters, and without it only α(x) = θ(1-p(x))/p(x) is identifiable. Every
//! debiasing operation therefore takes θ as an explicit argument; there is no
//! code path that recovers p without one.

use crate::error::{Error, Result};
use crate::isotonic::{isotonic_fit, Direction};
use crate::kernel::{evaluation_window, kernel_weight, window_guard, Bandwidth, Interval, Kernel};
use crate::step::QuantileValue;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryRecord {
    pub x: f64,
    pub y: bool,
    /// Sampling indicator; records with `s = false` carry no usable response.
    pub s: bool,
}

impl BinaryRecord {
    pub fn new(x: f64, y: bool) -> Self {
        BinaryRecord { x, y, s: true }
    }

    pub fn with_sampling(x: f64, y: bool, s: bool) -> Self {
        BinaryRecord { x, y, s }
    }
}

/// The case-control sampling mechanism: inclusion rates, their ratio θ and
/// the population odds γ = Pr(Y=0)/Pr(Y=1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasDesign {
    pub lambda0: Option<f64>,
    pub lambda1: Option<f64>,
    pub theta: f64,
    pub gamma: f64,
}

impl BiasDesign {
    pub fn from_rates(lambda0: f64, lambda1: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("lambda0", lambda0), ("lambda1", lambda1)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} = {v} is not a probability")));
            }
        }
        if lambda1 <= 0.0 {
            return Err(Error::InvalidArgument("lambda1 must be positive".into()));
        }
        if gamma <= 0.0 || gamma.is_nan() {
            return Err(Error::InvalidArgument(format!("gamma = {gamma} must be positive")));
        }
        Ok(BiasDesign {
            lambda0: Some(lambda0),
            lambda1: Some(lambda1),
            theta: lambda0 / lambda1,
            gamma,
        })
    }

    pub fn from_theta(theta: f64, gamma: f64) -> Result<Self> {
        if theta <= 0.0 || theta.is_nan() {
            return Err(Error::InvalidArgument(format!("theta = {theta} must be positive")));
        }
        if gamma <= 0.0 || gamma.is_nan() {
            return Err(Error::InvalidArgument(format!("gamma = {gamma} must be positive")));
        }
        Ok(BiasDesign { lambda0: None, lambda1: None, theta, gamma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    DiscreteGrid,
    Kernel,
}

/// A fitted probability curve on an ordered grid, with the weights
/// (cell counts or kernel masses) that monotonization uses.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliFit {
    kind: FitKind,
    points: Vec<(f64, f64)>,
    weights: Vec<f64>,
    window: Option<Interval>,
}

impl BernoulliFit {
    fn new(kind: FitKind, points: Vec<(f64, f64)>, weights: Vec<f64>, window: Option<Interval>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(points.iter().all(|&(_, p)| (-1e-12..=1.0 + 1e-12).contains(&p)));
        let points = points
            .into_iter()
            .map(|(x, p)| (x, p.clamp(0.0, 1.0)))
            .collect();
        BernoulliFit { kind, points, weights, window }
    }

    pub fn kind(&self) -> FitKind {
        self.kind
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn window(&self) -> Option<Interval> {
        self.window
    }

    /// Fitted value at an exact grid point.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        self.points
            .binary_search_by(|&(g, _)| g.total_cmp(&x))
            .ok()
            .map(|i| self.points[i].1)
    }

    pub fn is_monotone(&self, direction: Direction) -> bool {
        self.points.windows(2).all(|w| match direction {
            Direction::Increasing => w[0].1 <= w[1].1,
            Direction::Decreasing => w[0].1 >= w[1].1,
        })
    }
}

fn sampled(data: &[BinaryRecord]) -> impl Iterator<Item = &BinaryRecord> {
    data.iter().filter(|r| r.s)
}

/// Per-level maximum likelihood fit: at each distinct observed x the
/// proportion of cases among sampled records.
pub fn fit_discrete_mle(data: &[BinaryRecord]) -> Result<BernoulliFit> {
    let mut rows: Vec<(f64, bool)> = sampled(data).map(|r| (r.x, r.y)).collect();
    if rows.is_empty() {
        return Err(Error::EmptyData);
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let x = rows[i].0;
        let mut count = 0usize;
        let mut cases = 0usize;
        while i < rows.len() && rows[i].0 == x {
            count += 1;
            cases += rows[i].1 as usize;
            i += 1;
        }
        points.push((x, cases as f64 / count as f64));
        weights.push(count as f64);
    }
    Ok(BernoulliFit::new(FitKind::DiscreteGrid, points, weights, None))
}

/// Kernel-smoothed (local likelihood) fit at a single point: the weighted
/// proportion of cases among sampled records.
pub fn fit_kernel(data: &[BinaryRecord], kernel: &Kernel, bandwidth: &Bandwidth, x: f64) -> Result<f64> {
    let xs: Vec<f64> = sampled(data).map(|r| r.x).collect();
    if xs.is_empty() {
        return Err(Error::EmptyData);
    }
    window_guard(&xs, bandwidth, x)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for r in sampled(data) {
        let w = kernel_weight(kernel, bandwidth, x, r.x);
        den += w;
        if r.y {
            num += w;
        }
    }
    if den <= 0.0 {
        return Err(Error::NotEstimable { x });
    }
    Ok((num / den).clamp(0.0, 1.0))
}

/// Kernel fit over a grid, with the local kernel masses as weights.
pub fn fit_kernel_grid(
    data: &[BinaryRecord],
    kernel: &Kernel,
    bandwidth: &Bandwidth,
    grid: &[f64],
) -> Result<BernoulliFit> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let xs: Vec<f64> = sampled(data).map(|r| r.x).collect();
    if xs.is_empty() {
        return Err(Error::EmptyData);
    }
    let window = evaluation_window(&xs, bandwidth).ok();
    let mut points = Vec::with_capacity(grid.len());
    let mut weights = Vec::with_capacity(grid.len());
    let mut sorted: Vec<f64> = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    for &x in &sorted {
        points.push((x, fit_kernel(data, kernel, bandwidth, x)?));
        let mass: f64 = sampled(data).map(|r| kernel_weight(kernel, bandwidth, x, r.x)).sum();
        weights.push(mass);
    }
    Ok(BernoulliFit::new(FitKind::Kernel, points, weights, window))
}

/// The displayed likelihood statistic `1 - Σ y_i s_i / Σ s_i`, the sampled
/// control fraction. Its estimand is θγ/(1+θγ), the biased-sample analogue
/// of the odds θγ.
pub fn estimate_theta_gamma(data: &[BinaryRecord]) -> Result<f64> {
    let mut total = 0usize;
    let mut cases = 0usize;
    for r in sampled(data) {
        total += 1;
        cases += r.y as usize;
    }
    if total == 0 {
        return Err(Error::NoSampledRows);
    }
    Ok(1.0 - cases as f64 / total as f64)
}

/// Ratio of sampled controls to sampled cases at a discrete level; +∞ when
/// the level holds no cases (downstream debiasing maps it to p = 0).
pub fn estimate_alpha_discrete(data: &[BinaryRecord], level: f64) -> Result<f64> {
    let mut cases = 0usize;
    let mut controls = 0usize;
    for r in sampled(data).filter(|r| r.x == level) {
        if r.y {
            cases += 1;
        } else {
            controls += 1;
        }
    }
    if cases == 0 && controls == 0 {
        return Err(Error::InvalidArgument(format!("no sampled records at level x = {level}")));
    }
    if cases == 0 {
        return Ok(f64::INFINITY);
    }
    Ok(controls as f64 / cases as f64)
}

/// Kernel-weighted control-to-case ratio at x; +∞ when the weighted case
/// mass vanishes while control mass remains.
pub fn estimate_alpha_kernel(
    data: &[BinaryRecord],
    kernel: &Kernel,
    bandwidth: &Bandwidth,
    x: f64,
) -> Result<f64> {
    let xs: Vec<f64> = sampled(data).map(|r| r.x).collect();
    if xs.is_empty() {
        return Err(Error::EmptyData);
    }
    window_guard(&xs, bandwidth, x)?;
    let mut case_mass = 0.0;
    let mut control_mass = 0.0;
    for r in sampled(data) {
        let w = kernel_weight(kernel, bandwidth, x, r.x);
        if r.y {
            case_mass += w;
        } else {
            control_mass += w;
        }
    }
    if case_mass <= 0.0 && control_mass <= 0.0 {
        return Err(Error::NotEstimable { x });
    }
    if case_mass <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(control_mass / case_mass)
}

/// p(x) = θπ(x) / (1 + (θ-1)π(x)).
pub fn debias_probability(pi: f64, theta: f64) -> f64 {
    assert!(theta > 0.0, "theta must be positive");
    assert!((0.0..=1.0).contains(&pi), "pi must be a probability");
    (theta * pi / (1.0 + (theta - 1.0) * pi)).clamp(0.0, 1.0)
}

/// π(x) = p(x) / (p(x) + θ(1-p(x))); exact inverse of [`debias_probability`].
pub fn bias_forward(p: f64, theta: f64) -> f64 {
    assert!(theta > 0.0, "theta must be positive");
    assert!((0.0..=1.0).contains(&p), "p must be a probability");
    (p / (p + theta * (1.0 - p))).clamp(0.0, 1.0)
}

/// Debiased per-level fit with known θ:
/// `θ Σ y_i s_i 1{x_i=x_j} / Σ (1-y_i+θy_i) s_i 1{x_i=x_j}`.
pub fn fit_debiased_discrete(data: &[BinaryRecord], theta: f64) -> Result<BernoulliFit> {
    if theta <= 0.0 || theta.is_nan() {
        return Err(Error::InvalidArgument(format!("theta = {theta} must be positive")));
    }
    let mut rows: Vec<(f64, bool)> = sampled(data).map(|r| (r.x, r.y)).collect();
    if rows.is_empty() {
        return Err(Error::EmptyData);
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let x = rows[i].0;
        let mut num = 0.0;
        let mut den = 0.0;
        let mut count = 0usize;
        while i < rows.len() && rows[i].0 == x {
            let y = rows[i].1 as usize as f64;
            num += theta * y;
            den += 1.0 - y + theta * y;
            count += 1;
            i += 1;
        }
        if den <= 0.0 {
            return Err(Error::NotEstimable { x });
        }
        points.push((x, (num / den).clamp(0.0, 1.0)));
        weights.push(count as f64);
    }
    Ok(BernoulliFit::new(FitKind::DiscreteGrid, points, weights, None))
}

/// Debiased kernel fit with known θ over a grid, weights `K_h(x - x_i)`.
pub fn fit_debiased_kernel(
    data: &[BinaryRecord],
    theta: f64,
    kernel: &Kernel,
    bandwidth: &Bandwidth,
    grid: &[f64],
) -> Result<BernoulliFit> {
    if theta <= 0.0 || theta.is_nan() {
        return Err(Error::InvalidArgument(format!("theta = {theta} must be positive")));
    }
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let xs: Vec<f64> = sampled(data).map(|r| r.x).collect();
    if xs.is_empty() {
        return Err(Error::EmptyData);
    }
    let window = evaluation_window(&xs, bandwidth).ok();
    let mut sorted: Vec<f64> = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut points = Vec::with_capacity(sorted.len());
    let mut weights = Vec::with_capacity(sorted.len());
    for &x in &sorted {
        window_guard(&xs, bandwidth, x)?;
        let mut num = 0.0;
        let mut den = 0.0;
        let mut mass = 0.0;
        for r in sampled(data) {
            let w = kernel_weight(kernel, bandwidth, x, r.x);
            let y = r.y as usize as f64;
            num += theta * y * w;
            den += (1.0 - y + theta * y) * w;
            mass += w;
        }
        if den <= 0.0 {
            return Err(Error::NotEstimable { x });
        }
        points.push((x, (num / den).clamp(0.0, 1.0)));
        weights.push(mass);
    }
    Ok(BernoulliFit::new(FitKind::Kernel, points, weights, window))
}

/// Isotonic projection of the fitted curve in the requested direction,
/// weighted by cell counts (discrete) or kernel masses (kernel fits).
pub fn monotonize(fit: &BernoulliFit, direction: Direction) -> BernoulliFit {
    let values: Vec<f64> = fit.points.iter().map(|&(_, p)| p).collect();
    let projected = isotonic_fit(&values, &fit.weights, direction);
    let points = fit
        .points
        .iter()
        .zip(projected)
        .map(|(&(x, _), p)| (x, p))
        .collect();
    BernoulliFit::new(fit.kind, points, fit.weights.clone(), fit.window)
}

/// Generalized inverse of a monotone fit at level `u`: the infimum of the
/// level set `{x: p̂(x) ≥ u}` for increasing fits and its supremum for
/// decreasing fits. The result is flagged when the level is attained only at
/// a grid edge or not at all (the true crossing may lie beyond the grid).
pub fn invert_monotone(fit: &BernoulliFit, u: f64, direction: Direction) -> Result<QuantileValue> {
    if fit.points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    debug_assert!(fit.is_monotone(direction), "apply monotonize first");
    let pts = &fit.points;
    match direction {
        Direction::Increasing => {
            match pts.iter().position(|&(_, p)| p >= u) {
                Some(i) => Ok(QuantileValue { value: pts[i].0, at_boundary: i == 0 }),
                None => Ok(QuantileValue { value: pts[pts.len() - 1].0, at_boundary: true }),
            }
        }
        Direction::Decreasing => {
            match pts.iter().rposition(|&(_, p)| p >= u) {
                Some(i) => Ok(QuantileValue { value: pts[i].0, at_boundary: i == pts.len() - 1 }),
                None => Ok(QuantileValue { value: pts[0].0, at_boundary: true }),
            }
        }
    }
}
