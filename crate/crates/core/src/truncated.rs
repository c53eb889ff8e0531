//! Estimators for a response observed under left truncation: records
//! (x, t, y) are seen only when t ≤ y, in the model Y = m(X) + ε.
//!
//! The conditional CDF estimator is the kernel-weighted product-limit over
//! the observed responses, with risk sets {j : T_j ≤ Y_i ≤ Y_j}. The
//! marginal estimators are the same products with unit weights, and the
//! truncation distribution is the reverse-time product over the T values.

use crate::conditional::ConditionalCdf;
use crate::error::{Error, Result};
use crate::kernel::{
    check_in_window, evaluation_window, kernel_weights, Bandwidth, Interval, Kernel,
};
use crate::product_limit::{forward_product, reverse_product, PlEvent, RiskMass, SortedValues};
use crate::step::StepDistribution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtRecord {
    pub x: f64,
    pub t: f64,
    pub y: f64,
}

impl LtRecord {
    pub fn new(x: f64, t: f64, y: f64) -> Self {
        LtRecord { x, t, y }
    }
}

/// A validated left-truncated sample with cached sort orders, so that each
/// x-slice costs one sweep instead of one sort.
#[derive(Debug, Clone)]
pub struct LtSample {
    records: Vec<LtRecord>,
    xs: Vec<f64>,
    y_sorted: SortedValues,
    t_sorted: SortedValues,
}

impl LtSample {
    /// Requires every record to satisfy the sampling condition t ≤ y.
    pub fn new(records: Vec<LtRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyData);
        }
        for (index, r) in records.iter().enumerate() {
            if r.t > r.y || r.t.is_nan() || r.y.is_nan() {
                return Err(Error::SamplingCondition { index, condition: "t <= y" });
            }
        }
        let xs = records.iter().map(|r| r.x).collect();
        let ys: Vec<f64> = records.iter().map(|r| r.y).collect();
        let ts: Vec<f64> = records.iter().map(|r| r.t).collect();
        Ok(LtSample {
            y_sorted: SortedValues::new(&ys),
            t_sorted: SortedValues::new(&ts),
            records,
            xs,
        })
    }

    /// Drops violating records instead of failing; returns the reject count.
    pub fn from_records_lossy(records: Vec<LtRecord>) -> (Result<Self>, usize) {
        let total = records.len();
        let kept: Vec<LtRecord> = records.into_iter().filter(|r| r.t <= r.y).collect();
        let rejected = total - kept.len();
        (Self::new(kept), rejected)
    }

    pub fn records(&self) -> &[LtRecord] {
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

    fn weights_at(&self, kernel: &Kernel, bandwidth: &Bandwidth, x: f64) -> Result<Vec<f64>> {
        kernel_weights(&self.xs, kernel, bandwidth, x)
    }

    /// A(y; x): kernel-weighted fraction of observed responses at or below y.
    pub fn sub_cdf(&self, kernel: &Kernel, bandwidth: &Bandwidth, y: f64, x: f64) -> Result<f64> {
        let w = self.weights_at(kernel, bandwidth, x)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for (r, wi) in self.records.iter().zip(&w) {
            den += wi;
            if r.y <= y {
                num += wi;
            }
        }
        Ok((num / den).clamp(0.0, 1.0))
    }

    /// B(y; x): kernel-weighted fraction of records whose observation
    /// interval brackets y, i.e. t ≤ y ≤ observed response.
    pub fn risk_prob(&self, kernel: &Kernel, bandwidth: &Bandwidth, y: f64, x: f64) -> Result<f64> {
        let w = self.weights_at(kernel, bandwidth, x)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for (r, wi) in self.records.iter().zip(&w) {
            den += wi;
            if r.t <= y && y <= r.y {
                num += wi;
            }
        }
        Ok((num / den).clamp(0.0, 1.0))
    }

    /// Product-limit estimate of the conditional CDF of Y at x. Jumps sit at
    /// observed responses with positive kernel weight; survival left at the
    /// top is the defect.
    pub fn conditional_cdf(
        &self,
        kernel: &Kernel,
        bandwidth: &Bandwidth,
        x: f64,
    ) -> Result<StepDistribution> {
        let w = self.weights_at(kernel, bandwidth, x)?;
        let risk = RiskMass::new(&self.t_sorted, &self.y_sorted, &w);
        // Emit events in response order so the product pass never re-sorts.
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

    /// m̂(x): jump-sum mean of the conditional product-limit CDF.
    pub fn regression_mean(&self, kernel: &Kernel, bandwidth: &Bandwidth, x: f64) -> Result<f64> {
        Ok(self.conditional_cdf(kernel, bandwidth, x)?.mean())
    }

    /// Marginal product-limit distribution of Y (unit weights); its
    /// `survival` accessor is the classical left-truncation survival curve.
    pub fn marginal_distribution(&self) -> StepDistribution {
        let w = vec![1.0; self.records.len()];
        let risk = RiskMass::new(&self.t_sorted, &self.y_sorted, &w);
        let mut events: Vec<PlEvent> = self
            .y_sorted
            .values
            .iter()
            .map(|&y| PlEvent { value: y, weight: 1.0, risk: risk.at(y) })
            .collect();
        forward_product(&mut events)
    }

    /// Reverse-time product-limit estimate of the truncation CDF F_T.
    pub fn truncation_cdf(&self) -> StepDistribution {
        let w = vec![1.0; self.records.len()];
        let risk = RiskMass::new(&self.t_sorted, &self.y_sorted, &w);
        let mut events: Vec<PlEvent> = self
            .t_sorted
            .values
            .iter()
            .map(|&t| PlEvent { value: t, weight: 1.0, risk: risk.at(t) })
            .collect();
        reverse_product(&mut events)
    }

    /// Mean of the estimated truncation distribution.
    pub fn mean_truncation(&self) -> f64 {
        self.truncation_cdf().mean()
    }

    /// Mean of the estimated marginal distribution of Y.
    pub fn mean_response(&self) -> f64 {
        self.marginal_distribution().mean()
    }

    /// Residual distribution: the average over in-window records of the
    /// conditional CDF slice at X_i recentred by m_hat(X_i). Records outside
    /// the window are skipped and counted.
    pub fn residual_cdf<F>(
        &self,
        kernel: &Kernel,
        bandwidth: &Bandwidth,
        m_hat: F,
    ) -> Result<ResidualCdf>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let window = evaluation_window(&self.xs, bandwidth).ok();
        let usable: Vec<&LtRecord> = self
            .records
            .iter()
            .filter(|r| window.is_none_or(|w| w.contains(r.x)))
            .collect();
        let skipped = self.records.len() - usable.len();
        if usable.is_empty() {
            return Err(Error::NotEstimable { x: f64::NAN });
        }
        let share = 1.0 / usable.len() as f64;
        let slices = crate::exec::map(&usable, |r| {
            self.conditional_cdf(kernel, bandwidth, r.x).map(|s| s.shift(-m_hat(r.x)))
        });
        let mut jumps = Vec::new();
        for slice in slices {
            for &(loc, mass) in slice?.jumps() {
                jumps.push((loc, mass * share));
            }
        }
        Ok(ResidualCdf { dist: StepDistribution::new(jumps, 0.0), skipped })
    }

    /// Conditional-CDF view with a validated (nonempty) window, for quantile
    /// inversion and grid evaluation.
    pub fn conditional(
        &self,
        kernel: Kernel,
        bandwidth: Bandwidth,
    ) -> Result<LtConditionalCdf<'_>> {
        let window = self.window(&bandwidth)?;
        Ok(LtConditionalCdf { sample: self, kernel, bandwidth, window })
    }
}

#[derive(Debug, Clone)]
pub struct ResidualCdf {
    pub dist: StepDistribution,
    /// Records outside the evaluation window, excluded from the average.
    pub skipped: usize,
}

#[derive(Debug, Clone)]
pub struct LtConditionalCdf<'a> {
    sample: &'a LtSample,
    kernel: Kernel,
    bandwidth: Bandwidth,
    window: Interval,
}

impl ConditionalCdf for LtConditionalCdf<'_> {
    fn window(&self) -> Interval {
        self.window
    }

    fn slice(&self, x: f64) -> Result<StepDistribution> {
        check_in_window(x, &self.window)?;
        self.sample.conditional_cdf(&self.kernel, &self.bandwidth, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{kernel_weight, window_guard, KernelKind};

    fn sample(rows: &[(f64, f64, f64)]) -> LtSample {
        LtSample::new(rows.iter().map(|&(x, t, y)| LtRecord::new(x, t, y)).collect()).unwrap()
    }

    fn uniform_all() -> (Kernel, Bandwidth) {
        // Covers every record from every evaluation point used in the tests.
        (Kernel::new(KernelKind::Uniform), Bandwidth::fixed(1e6).unwrap())
    }

    /// Direct translation of the displayed product, O(n²), for oracle checks.
    fn oracle_cdf(rows: &[(f64, f64, f64)], k: &Kernel, h: &Bandwidth, y: f64, x: f64) -> f64 {
        let w: Vec<f64> = rows.iter().map(|r| kernel_weight(k, h, x, r.0)).collect();
        let mut prod = 1.0;
        for (i, &(_, ti, yi)) in rows.iter().enumerate() {
            let num = if ti <= yi && yi <= y { w[i] } else { 0.0 };
            let den: f64 = rows
                .iter()
                .enumerate()
                .filter(|&(_, &(_, tj, yj))| tj <= yi && yi <= yj)
                .map(|(j, _)| w[j])
                .sum();
            if num > 0.0 {
                prod *= 1.0 - num / den;
            }
        }
        1.0 - prod
    }

    #[test]
    fn ingestion_rejects_sampling_violations() {
        let bad = vec![LtRecord::new(0.0, 2.0, 1.0)];
        assert!(matches!(
            LtSample::new(bad.clone()),
            Err(Error::SamplingCondition { index: 0, .. })
        ));
        let (res, rejected) = LtSample::from_records_lossy(
            vec![LtRecord::new(0.0, 0.0, 1.0), LtRecord::new(0.0, 2.0, 1.0)],
        );
        assert_eq!(rejected, 1);
        assert_eq!(res.unwrap().len(), 1);
    }

    #[test]
    fn sub_cdf_and_risk_prob_by_enumeration() {
        let rows = [(0.1, 0.0, 1.0), (0.2, 0.5, 2.0), (0.3, 1.5, 3.0)];
        let s = sample(&rows);
        let (k, h) = uniform_all();
        // A at y=2: two of three responses at or below.
        assert!((s.sub_cdf(&k, &h, 2.0, 0.2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.sub_cdf(&k, &h, 100.0, 0.2).unwrap(), 1.0);
        assert_eq!(s.sub_cdf(&k, &h, 0.5, 0.2).unwrap(), 0.0);
        // B at y=1: records 1 and 2 bracket it, record 3 enters at 1.5.
        assert!((s.risk_prob(&k, &h, 1.0, 0.2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.risk_prob(&k, &h, -5.0, 0.2).unwrap(), 0.0);
        // Single record bracketing y=1.
        let one = sample(&[(0.0, 0.0, 2.0)]);
        assert_eq!(one.risk_prob(&k, &h, 1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn conditional_cdf_single_record_is_unit_jump() {
        let s = sample(&[(0.5, -1.0, 2.0)]);
        let (k, h) = uniform_all();
        let d = s.conditional_cdf(&k, &h, 0.5).unwrap();
        assert_eq!(d.jumps(), &[(2.0, 1.0)]);
    }

    #[test]
    fn conditional_cdf_hand_dataset() {
        // Risk sets by hand: at y=1 records {1,2}, at y=2 records {2,3},
        // at y=3 record {3}. Factors 1/2, 1/2, 0.
        let rows = [(0.1, 0.0, 1.0), (0.2, 0.5, 2.0), (0.3, 1.5, 3.0)];
        let s = sample(&rows);
        let (k, h) = uniform_all();
        let d = s.conditional_cdf(&k, &h, 0.2).unwrap();
        assert!((d.cdf(1.0) - 0.5).abs() < 1e-15);
        assert!((d.cdf(2.0) - 0.75).abs() < 1e-15);
        assert!((d.cdf(3.0) - 1.0).abs() < 1e-15);
        for y in [0.5, 1.0, 1.7, 2.0, 2.5, 3.0, 4.0] {
            let oracle = oracle_cdf(&rows, &k, &h, y, 0.2);
            assert!((d.cdf(y) - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn no_truncation_reduces_to_empirical_cdf() {
        let rows = [(0.0, -9.0, 2.0), (1.0, -9.0, 1.0), (2.0, -9.0, 3.0), (3.0, -9.0, 2.5)];
        let s = sample(&rows);
        let (k, h) = uniform_all();
        let d = s.conditional_cdf(&k, &h, 1.5).unwrap();
        let mut ys: Vec<f64> = rows.iter().map(|r| r.2).collect();
        ys.sort_by(f64::total_cmp);
        for (i, &y) in ys.iter().enumerate() {
            assert!((d.cdf(y) - (i + 1) as f64 / 4.0).abs() < 1e-12);
        }
        // Regression mean equals the sample mean exactly.
        let mean = s.regression_mean(&k, &h, 1.5).unwrap();
        let sample_mean: f64 = ys.iter().sum::<f64>() / 4.0;
        assert!((mean - sample_mean).abs() < 1e-12);
    }

    #[test]
    fn randomized_small_samples_match_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let k = Kernel::new(KernelKind::Epanechnikov);
        for _ in 0..50 {
            let n = rng.random_range(1..=6);
            let rows: Vec<(f64, f64, f64)> = (0..n)
                .map(|_| {
                    let y: f64 = rng.random_range(-1.0..2.0);
                    let t = y - rng.random_range(0.0..2.0);
                    let x: f64 = rng.random_range(-1.0..1.0);
                    (x, t, y)
                })
                .collect();
            let s = sample(&rows);
            let h = Bandwidth::fixed(rng.random_range(0.5..3.0)).unwrap();
            let x = rng.random_range(-0.5..0.5);
            if window_guard(s.xs(), &h, x).is_err() {
                continue;
            }
            let d = match s.conditional_cdf(&k, &h, x) {
                Ok(d) => d,
                Err(Error::NotEstimable { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            for probe in [-1.5, -0.5, 0.0, 0.5, 1.0, 1.5, 2.5] {
                let oracle = oracle_cdf(&rows, &k, &h, probe, x);
                assert!(
                    (d.cdf(probe) - oracle).abs() < 1e-12,
                    "cdf({probe}) = {} vs oracle {oracle}",
                    d.cdf(probe)
                );
            }
        }
    }

    #[test]
    fn zero_weight_records_do_not_affect_slice() {
        let near = [(0.0, -1.0, 1.0), (0.1, 0.5, 2.0), (-0.1, 0.2, 1.5)];
        let k = Kernel::new(KernelKind::Uniform);
        let h = Bandwidth::fixed(0.5).unwrap();
        let base = sample(&near);
        // Force a usable window by spanning records; evaluation at 0 keeps
        // far records at zero weight.
        let mut with_far = near.to_vec();
        with_far.push((5.0, -1.0, 0.7));
        with_far.push((-5.0, 0.0, 2.4));
        let far = sample(&with_far);
        let d0 = base.conditional_cdf(&k, &h, 0.0).unwrap();
        let d1 = far.conditional_cdf(&k, &h, 0.0).unwrap();
        assert_eq!(d0.jumps(), d1.jumps());
    }

    #[test]
    fn isolated_record_zero_over_zero_convention() {
        // The far record is outside the kernel reach at x = 2 and nothing
        // else is in its risk set there: its factor is 0/0 and contributes
        // exactly 1 (no jump, no crash).
        let rows = [(0.0, -1.0, 1.0), (2.0, -1.0, 1.5), (2.2, -1.0, 2.0), (4.0, 5.0, 6.0)];
        let s = sample(&rows);
        let k = Kernel::new(KernelKind::Uniform);
        let h = Bandwidth::fixed(1.5).unwrap();
        let d = s.conditional_cdf(&k, &h, 2.0).unwrap();
        assert_eq!(d.jumps().len(), 2);
        assert!((d.cdf(2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn translation_equivariance() {
        let rows = [(0.1, 0.0, 1.0), (0.2, 0.5, 2.0), (0.3, 1.5, 3.0), (0.4, 0.7, 1.8)];
        let s = sample(&rows);
        let c = 3.75;
        let shifted = sample(
            &rows.iter().map(|&(x, t, y)| (x, t + c, y + c)).collect::<Vec<_>>(),
        );
        let (k, h) = uniform_all();
        let d = s.conditional_cdf(&k, &h, 0.2).unwrap();
        let ds = shifted.conditional_cdf(&k, &h, 0.2).unwrap();
        assert_eq!(d.jumps().len(), ds.jumps().len());
        for (&(l0, m0), &(l1, m1)) in d.jumps().iter().zip(ds.jumps()) {
            assert!((l1 - (l0 + c)).abs() < 1e-12);
            assert!((m1 - m0).abs() < 1e-12);
        }
    }

    #[test]
    fn marginal_survival_hand_risk_sets() {
        // Risk set at y=1 is only record 1 (t2 = 2 > 1): survival drops to 0
        // there and the estimator collapses onto the first response.
        let s = sample(&[(0.0, 0.0, 1.0), (1.0, 2.0, 3.0)]);
        let d = s.marginal_distribution();
        assert_eq!(d.survival(1.0), 0.0);
        assert_eq!(d.jumps(), &[(1.0, 1.0)]);
    }

    #[test]
    fn marginal_matches_conditional_with_flat_kernel() {
        let rows = [(0.1, 0.0, 1.0), (0.9, 0.5, 2.0), (0.5, 1.5, 3.0)];
        let s = sample(&rows);
        let (k, h) = uniform_all();
        let cond = s.conditional_cdf(&k, &h, 0.5).unwrap();
        let marg = s.marginal_distribution();
        assert_eq!(cond.jumps().len(), marg.jumps().len());
        for (&(l0, m0), &(l1, m1)) in cond.jumps().iter().zip(marg.jumps()) {
            assert_eq!(l0, l1);
            assert!((m0 - m1).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_cdf_hand_dataset() {
        // Two records, T = {0, 2}, Y = {1, 3}. Risk at t=0: {j: T_j ≤ 0 ≤ Y_j}
        // = {1}; at t=2: {j: T_j ≤ 2 ≤ Y_j} = {2}. Reverse product:
        // F(t ≥ 2) = 1, factor at 2 is 0 → F on [0,2) = 0.
        let s = sample(&[(0.0, 0.0, 1.0), (1.0, 2.0, 3.0)]);
        let d = s.truncation_cdf();
        assert_eq!(d.cdf(2.0), 1.0);
        assert_eq!(d.cdf(1.0), 0.0);

        let same = sample(&[(0.0, 1.0, 2.0), (1.0, 1.0, 5.0)]);
        assert_eq!(same.truncation_cdf().jumps().len(), 1);
    }

    #[test]
    fn means_of_single_record() {
        let s = sample(&[(0.0, 0.5, 2.0)]);
        assert!((s.mean_truncation() - 0.5).abs() < 1e-15);
        assert!((s.mean_response() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn mean_response_reduces_to_sample_mean() {
        let rows = [(0.0, -9.0, 2.0), (1.0, -9.0, 1.0), (2.0, -9.0, 3.0), (3.0, -9.0, 2.5)];
        let s = sample(&rows);
        let mean: f64 = rows.iter().map(|r| r.2).sum::<f64>() / 4.0;
        assert!((s.mean_response() - mean).abs() < 1e-12);
        // With Y above every T, the truncation estimator is the empirical
        // CDF of T and its mean is the sample mean of T.
        let rows2 = [(0.0, 0.3, 9.0), (1.0, 0.9, 9.5), (2.0, 0.1, 8.0)];
        let s2 = sample(&rows2);
        let mean_t: f64 = rows2.iter().map(|r| r.1).sum::<f64>() / 3.0;
        assert!((s2.mean_truncation() - mean_t).abs() < 1e-12);
    }

    #[test]
    fn residual_cdf_single_record_and_shift_equivariance() {
        let one = sample(&[(0.5, -1.0, 2.0)]);
        let (k, h) = uniform_all();
        let r = one.residual_cdf(&k, &h, |_| 2.0).unwrap();
        assert_eq!(r.dist.jumps(), &[(0.0, 1.0)]);
        assert_eq!(r.skipped, 0);

        // Translating the response axis (every y and t by c) together with
        // m_hat + c cancels exactly in the recentred average.
        let rows = [(0.1, 0.0, 1.0), (0.2, 0.5, 2.0), (0.3, 1.5, 3.0), (0.45, 0.2, 2.2)];
        let s = sample(&rows);
        let c = 1.5;
        let shifted = sample(
            &rows.iter().map(|&(x, t, y)| (x, t + c, y + c)).collect::<Vec<_>>(),
        );
        let m = |x: f64| 1.0 + x;
        let base = s.residual_cdf(&k, &h, m).unwrap();
        let moved = shifted.residual_cdf(&k, &h, |x| m(x) + c).unwrap();
        assert_eq!(base.dist.jumps().len(), moved.dist.jumps().len());
        for (&(l0, m0), &(l1, m1)) in base.dist.jumps().iter().zip(moved.dist.jumps()) {
            assert!((l0 - l1).abs() < 1e-12);
            assert!((m0 - m1).abs() < 1e-12);
        }
    }

    #[test]
    fn conditional_view_enforces_window() {
        let rows = [(0.0, -1.0, 1.0), (5.0, -1.0, 2.0), (10.0, -1.0, 3.0)];
        let s = sample(&rows);
        let k = Kernel::new(KernelKind::Epanechnikov);
        let h = Bandwidth::fixed(1.0).unwrap();
        let cond = s.conditional(k, h).unwrap();
        assert_eq!(cond.window(), Interval::new(1.0, 9.0));
        assert!(cond.slice(5.0).is_ok());
        assert!(matches!(cond.slice(0.5), Err(Error::OutsideWindow { .. })));
    }
}
