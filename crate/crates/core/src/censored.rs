//! Estimators for the three censored/truncated designs: left truncation
//! with right censoring (LTRC), right truncation, and double truncation.
//!
//! Each design is a different sampling condition on (X, T, Y, C) and a
//! different family of product-limit displays; the risk set of every product
//! is the weighted mass of records whose observation interval brackets the
//! event value.

use crate::conditional::ConditionalCdf;
use crate::error::{Error, Result};
use crate::kernel::{check_in_window, evaluation_window, kernel_weights, Bandwidth, Interval, Kernel};
use crate::product_limit::{forward_product, reverse_product, PlEvent, RiskMass, SortedValues};
use crate::step::StepDistribution;

/// Left-truncated right-censored record: observed (x, t, z, δ) with
/// z = min(response, censoring time) and δ indicating an uncensored
/// response, conditional on t ≤ z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtrcRecord {
    pub x: f64,
    pub t: f64,
    pub z: f64,
    pub delta: bool,
}

impl LtrcRecord {
    pub fn new(x: f64, t: f64, z: f64, delta: bool) -> Self {
        LtrcRecord { x, t, z, delta }
    }
}

/// Right-truncated record: (x, y, c) observed conditional on y ≤ c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtRecord {
    pub x: f64,
    pub y: f64,
    pub c: f64,
}

impl RtRecord {
    pub fn new(x: f64, y: f64, c: f64) -> Self {
        RtRecord { x, y, c }
    }
}

/// Doubly truncated record: (x, t, y, c) observed conditional on t ≤ y ≤ c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtRecord {
    pub x: f64,
    pub t: f64,
    pub y: f64,
    pub c: f64,
}

impl DtRecord {
    pub fn new(x: f64, t: f64, y: f64, c: f64) -> Self {
        DtRecord { x, t, y, c }
    }
}

#[derive(Debug, Clone)]
pub struct LtrcSample {
    records: Vec<LtrcRecord>,
    xs: Vec<f64>,
    z_sorted: SortedValues,
    t_sorted: SortedValues,
}

impl LtrcSample {
    pub fn new(records: Vec<LtrcRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyData);
        }
        for (index, r) in records.iter().enumerate() {
            if r.t > r.z || r.t.is_nan() || r.z.is_nan() {
                return Err(Error::SamplingCondition { index, condition: "t <= z" });
            }
        }
        let xs = records.iter().map(|r| r.x).collect();
        let zs: Vec<f64> = records.iter().map(|r| r.z).collect();
        let ts: Vec<f64> = records.iter().map(|r| r.t).collect();
        Ok(LtrcSample {
            z_sorted: SortedValues::new(&zs),
            t_sorted: SortedValues::new(&ts),
            records,
            xs,
        })
    }

    pub fn from_records_lossy(records: Vec<LtrcRecord>) -> (Result<Self>, usize) {
        let total = records.len();
        let kept: Vec<LtrcRecord> = records.into_iter().filter(|r| r.t <= r.z).collect();
        let rejected = total - kept.len();
        (Self::new(kept), rejected)
    }

    pub fn records(&self) -> &[LtrcRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn window(&self, bandwidth: &Bandwidth) -> Result<Interval> {
        evaluation_window(&self.xs, bandwidth)
    }

    fn product(&self, weights: &[f64]) -> StepDistribution {
        let risk = RiskMass::new(&self.t_sorted, &self.z_sorted, weights);
        let mut events: Vec<PlEvent> = self
            .z_sorted
            .order
            .iter()
            .filter(|&&i| self.records[i].delta)
            .map(|&i| {
                let r = &self.records[i];
                PlEvent { value: r.z, weight: weights[i], risk: risk.at(r.z) }
            })
            .collect();
        forward_product(&mut events)
    }

    /// Kernel-weighted product-limit for the conditional distribution of the
    /// response at x: events at uncensored z, risk sets {j: t_j ≤ z_i ≤ z_j}.
    /// The returned distribution's `survival` accessor is the fitted
    /// conditional survival curve.
    pub fn conditional_distribution(
        &self,
        kernel: &Kernel,
        bandwidth: &Bandwidth,
        x: f64,
    ) -> Result<StepDistribution> {
        let w = kernel_weights(&self.xs, kernel, bandwidth, x)?;
        Ok(self.product(&w))
    }

    /// m̂(x): jump-sum over uncensored events of the conditional fit.
    pub fn regression_mean(&self, kernel: &Kernel, bandwidth: &Bandwidth, x: f64) -> Result<f64> {
        Ok(self.conditional_distribution(kernel, bandwidth, x)?.mean())
    }

    /// Unit-weight product-limit for the marginal distribution of the
    /// response; reduces to Kaplan-Meier when no record is truncated.
    pub fn marginal_distribution(&self) -> StepDistribution {
        self.product(&vec![1.0; self.records.len()])
    }

    pub fn conditional(
        &self,
        kernel: Kernel,
        bandwidth: Bandwidth,
    ) -> Result<LtrcConditionalCdf<'_>> {
        let window = self.window(&bandwidth)?;
        Ok(LtrcConditionalCdf { sample: self, kernel, bandwidth, window })
    }
}

#[derive(Debug, Clone)]
pub struct LtrcConditionalCdf<'a> {
    sample: &'a LtrcSample,
    kernel: Kernel,
    bandwidth: Bandwidth,
    window: Interval,
}

impl ConditionalCdf for LtrcConditionalCdf<'_> {
    fn window(&self) -> Interval {
        self.window
    }

    fn slice(&self, x: f64) -> Result<StepDistribution> {
        check_in_window(x, &self.window)?;
        self.sample.conditional_distribution(&self.kernel, &self.bandwidth, x)
    }
}

#[derive(Debug, Clone)]
pub struct RtSample {
    records: Vec<RtRecord>,
    xs: Vec<f64>,
    y_sorted: SortedValues,
    c_sorted: SortedValues,
}

impl RtSample {
    pub fn new(records: Vec<RtRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyData);
        }
        for (index, r) in records.iter().enumerate() {
            if r.y > r.c || r.y.is_nan() || r.c.is_nan() {
                return Err(Error::SamplingCondition { index, condition: "y <= c" });
            }
        }
        let xs = records.iter().map(|r| r.x).collect();
        let ys: Vec<f64> = records.iter().map(|r| r.y).collect();
        let cs: Vec<f64> = records.iter().map(|r| r.c).collect();
        Ok(RtSample {
            y_sorted: SortedValues::new(&ys),
            c_sorted: SortedValues::new(&cs),
            records,
            xs,
        })
    }

    pub fn from_records_lossy(records: Vec<RtRecord>) -> (Result<Self>, usize) {
        let total = records.len();
        let kept: Vec<RtRecord> = records.into_iter().filter(|r| r.y <= r.c).collect();
        let rejected = total - kept.len();
        (Self::new(kept), rejected)
    }

    pub fn records(&self) -> &[RtRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn window(&self, bandwidth: &Bandwidth) -> Result<Interval> {
        evaluation_window(&self.xs, bandwidth)
    }

    /// Reverse-time product-limit for the conditional CDF at x: the product
    /// over events above y, risk sets {j: y_j ≤ y_i ≤ c_j}. Unidentifiable
    /// bottom mass lands in the distribution's floor.
    pub fn conditional_cdf(
        &self,
        kernel: &Kernel,
        bandwidth: &Bandwidth,
        x: f64,
    ) -> Result<StepDistribution> {
        let w = kernel_weights(&self.xs, kernel, bandwidth, x)?;
        let risk = RiskMass::new(&self.y_sorted, &self.c_sorted, &w);
        let mut events: Vec<PlEvent> = self
            .y_sorted
            .order
            .iter()
            .map(|&i| {
                let r = &self.records[i];
                PlEvent { value: r.y, weight: w[i], risk: risk.at(r.y) }
            })
            .collect();
        Ok(reverse_product(&mut events))
    }

    /// m̂(x): jump-sum mean of the reverse-time conditional CDF.
    pub fn regression_mean(&self, kernel: &Kernel, bandwidth: &Bandwidth, x: f64) -> Result<f64> {
        Ok(self.conditional_cdf(kernel, bandwidth, x)?.mean())
    }

    /// Product-limit for the truncating variable: events at c_i, risk sets
    /// {j: y_j ≤ c_i ≤ c_j}. The returned distribution's `survival` accessor
    /// is the fitted survival of C.
    pub fn censoring_distribution(&self) -> StepDistribution {
        let w = vec![1.0; self.records.len()];
        let risk = RiskMass::new(&self.y_sorted, &self.c_sorted, &w);
        let mut events: Vec<PlEvent> = self
            .c_sorted
            .values
            .iter()
            .map(|&c| PlEvent { value: c, weight: 1.0, risk: risk.at(c) })
            .collect();
        forward_product(&mut events)
    }

    pub fn conditional(
        &self,
        kernel: Kernel,
        bandwidth: Bandwidth,
    ) -> Result<RtConditionalCdf<'_>> {
        let window = self.window(&bandwidth)?;
        Ok(RtConditionalCdf { sample: self, kernel, bandwidth, window })
    }
}

#[derive(Debug, Clone)]
pub struct RtConditionalCdf<'a> {
    sample: &'a RtSample,
    kernel: Kernel,
    bandwidth: Bandwidth,
    window: Interval,
}

impl ConditionalCdf for RtConditionalCdf<'_> {
    fn window(&self) -> Interval {
        self.window
    }

    fn slice(&self, x: f64) -> Result<StepDistribution> {
        check_in_window(x, &self.window)?;
        self.sample.conditional_cdf(&self.kernel, &self.bandwidth, x)
    }
}

/// Which numerator the doubly-truncated F_T product uses. The printed
/// display counts events at c_i ≤ t, which produces a decreasing product;
/// the alternate counts truncation events t ≤ t_i (the same form as the
/// singly-truncated case) and is the consistent CDF estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtTruncationNumerator {
    AsPrinted,
    TruncationEvents,
}

#[derive(Debug, Clone)]
pub struct DtSample {
    records: Vec<DtRecord>,
    xs: Vec<f64>,
    t_sorted: SortedValues,
    y_sorted: SortedValues,
    c_sorted: SortedValues,
}

/// Conditional CDF under double truncation, with the clipping and exclusion
/// diagnostics the plug-in ratio requires.
#[derive(Debug, Clone)]
pub struct DtConditionalEstimate {
    pub dist: StepDistribution,
    /// Events whose estimated censoring survival was zero, dropped from the
    /// sum (near-boundary nonidentifiability).
    pub excluded_events: usize,
    /// Events whose cumulative mass was capped at one.
    pub clipped_events: usize,
    /// Total mass removed by capping.
    pub clipped_mass: f64,
}

impl DtSample {
    pub fn new(records: Vec<DtRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyData);
        }
        for (index, r) in records.iter().enumerate() {
            if !(r.t <= r.y && r.y <= r.c) {
                return Err(Error::SamplingCondition { index, condition: "t <= y <= c" });
            }
        }
        let xs = records.iter().map(|r| r.x).collect();
        let ts: Vec<f64> = records.iter().map(|r| r.t).collect();
        let ys: Vec<f64> = records.iter().map(|r| r.y).collect();
        let cs: Vec<f64> = records.iter().map(|r| r.c).collect();
        Ok(DtSample {
            t_sorted: SortedValues::new(&ts),
            y_sorted: SortedValues::new(&ys),
            c_sorted: SortedValues::new(&cs),
            records,
            xs,
        })
    }

    pub fn from_records_lossy(records: Vec<DtRecord>) -> (Result<Self>, usize) {
        let total = records.len();
        let kept: Vec<DtRecord> =
            records.into_iter().filter(|r| r.t <= r.y && r.y <= r.c).collect();
        let rejected = total - kept.len();
        (Self::new(kept), rejected)
    }

    pub fn records(&self) -> &[DtRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn window(&self, bandwidth: &Bandwidth) -> Result<Interval> {
        evaluation_window(&self.xs, bandwidth)
    }

    /// Product-limit for the right-truncating variable: events at c_i, risk
    /// sets {j: y_j ≤ c_i ≤ c_j}; `survival` is the fitted survival of C.
    pub fn censoring_distribution(&self) -> StepDistribution {
        let w = vec![1.0; self.records.len()];
        let risk = RiskMass::new(&self.y_sorted, &self.c_sorted, &w);
        let mut events: Vec<PlEvent> = self
            .c_sorted
            .values
            .iter()
            .map(|&c| PlEvent { value: c, weight: 1.0, risk: risk.at(c) })
            .collect();
        forward_product(&mut events)
    }

    /// Product-limit for the left-truncating variable, risk sets
    /// {j: t_j ≤ t_i ≤ y_j}. With `AsPrinted`, events sit at c_i ≤ t and the
    /// printed (decreasing) product is exposed through the returned
    /// distribution's `survival` accessor; with `TruncationEvents`, the
    /// reverse-time product over t_i ≥ t yields a genuine CDF for F_T.
    pub fn truncation_cdf(&self, numerator: DtTruncationNumerator) -> StepDistribution {
        let w = vec![1.0; self.records.len()];
        let risk = RiskMass::new(&self.t_sorted, &self.y_sorted, &w);
        match numerator {
            DtTruncationNumerator::AsPrinted => {
                let mut events: Vec<PlEvent> = self
                    .records
                    .iter()
                    .map(|r| PlEvent { value: r.c, weight: 1.0, risk: risk.at(r.t) })
                    .collect();
                forward_product(&mut events)
            }
            DtTruncationNumerator::TruncationEvents => {
                let mut events: Vec<PlEvent> = self
                    .records
                    .iter()
                    .map(|r| PlEvent { value: r.t, weight: 1.0, risk: risk.at(r.t) })
                    .collect();
                reverse_product(&mut events)
            }
        }
    }

    /// Kernel-weighted product whose `survival` is the censoring-weighted
    /// exceedance H(y; x) = P(Y > y, Y ≤ C | X = x) normalized to one at
    /// -∞; events at y_i, risk sets {j: t_j ≤ y_i ≤ y_j}.
    pub fn subsurvival(
        &self,
        kernel: &Kernel,
        bandwidth: &Bandwidth,
        x: f64,
    ) -> Result<StepDistribution> {
        let w = kernel_weights(&self.xs, kernel, bandwidth, x)?;
        let risk = RiskMass::new(&self.t_sorted, &self.y_sorted, &w);
        let mut events: Vec<PlEvent> = self
            .y_sorted
            .order
            .iter()
            .map(|&i| {
                let r = &self.records[i];
                PlEvent { value: r.y, weight: w[i], risk: risk.at(r.y) }
            })
            .collect();
        Ok(forward_product(&mut events))
    }

    /// Plug-in conditional CDF: jumps of the subsurvival reweighted by the
    /// inverse censoring survival at each event, cumulative mass capped at
    /// one. `fc` must come from [`DtSample::censoring_distribution`].
    pub fn conditional_cdf(
        &self,
        kernel: &Kernel,
        bandwidth: &Bandwidth,
        x: f64,
        fc: &StepDistribution,
    ) -> Result<DtConditionalEstimate> {
        let h = self.subsurvival(kernel, bandwidth, x)?;
        let mut jumps = Vec::with_capacity(h.jumps().len());
        let mut excluded_events = 0usize;
        let mut clipped_events = 0usize;
        let mut clipped_mass = 0.0;
        let mut cum = 0.0;
        for &(loc, mass) in h.jumps() {
            let surv_c = fc.survival(loc);
            if surv_c <= 0.0 {
                excluded_events += 1;
                continue;
            }
            let mut weighted = mass / surv_c;
            if cum + weighted > 1.0 {
                let allowed = (1.0 - cum).max(0.0);
                clipped_mass += weighted - allowed;
                clipped_events += 1;
                weighted = allowed;
            }
            if weighted > 0.0 {
                jumps.push((loc, weighted));
                cum += weighted;
            }
        }
        Ok(DtConditionalEstimate {
            dist: StepDistribution::new(jumps, 0.0),
            excluded_events,
            clipped_events,
            clipped_mass,
        })
    }

    pub fn conditional(
        &self,
        kernel: Kernel,
        bandwidth: Bandwidth,
    ) -> Result<DtConditionalCdf<'_>> {
        let window = self.window(&bandwidth)?;
        let fc = self.censoring_distribution();
        Ok(DtConditionalCdf { sample: self, kernel, bandwidth, window, fc })
    }
}

#[derive(Debug, Clone)]
pub struct DtConditionalCdf<'a> {
    sample: &'a DtSample,
    kernel: Kernel,
    bandwidth: Bandwidth,
    window: Interval,
    fc: StepDistribution,
}

impl ConditionalCdf for DtConditionalCdf<'_> {
    fn window(&self) -> Interval {
        self.window
    }

    fn slice(&self, x: f64) -> Result<StepDistribution> {
        check_in_window(x, &self.window)?;
        Ok(self.sample.conditional_cdf(&self.kernel, &self.bandwidth, x, &self.fc)?.dist)
    }
}
