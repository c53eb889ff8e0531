//! Current-status (interval observation) estimation: only an inspection time
//! c and the indicator δ = 1{response ≤ c} are observed per record.
//!
//! The kernel-weighted isotonic regression of δ on c is the local maximum
//! likelihood estimator of t ↦ F_ε(t - m(x)): the weighted least-squares
//! monotone fit maximizes the binomial log-likelihood over monotone curves.

use crate::error::{Error, Result};
use crate::isotonic::{isotonic_fit, Direction};
use crate::kernel::{evaluation_window, kernel_weights, Bandwidth, Interval, Kernel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsRecord {
    pub x: f64,
    pub c: f64,
    pub delta: bool,
}

impl CsRecord {
    pub fn new(x: f64, c: f64, delta: bool) -> Self {
        CsRecord { x, c, delta }
    }
}

#[derive(Debug, Clone)]
pub struct CsSample {
    records: Vec<CsRecord>,
    xs: Vec<f64>,
}

/// A monotone nondecreasing step function on inspection points, levels in
/// [0, 1]; the fitted conditional CDF of the response at the evaluation
/// point.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneFit {
    points: Vec<(f64, f64)>,
    weights: Vec<f64>,
}

impl MonotoneFit {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Step evaluation: the level at the largest point ≤ t, zero before the
    /// first point.
    pub fn evaluate(&self, t: f64) -> f64 {
        let k = self.points.partition_point(|&(c, _)| c <= t);
        if k == 0 {
            0.0
        } else {
            self.points[k - 1].1
        }
    }

    pub fn min_level(&self) -> f64 {
        self.points.first().map_or(0.0, |p| p.1)
    }

    pub fn max_level(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.1)
    }

    /// Jump-sum mean of the curve read as a CDF (baseline zero before the
    /// first point; mass above the last level is not located and is ignored).
    pub fn mean(&self) -> f64 {
        let mut prev = 0.0;
        let mut acc = 0.0;
        for &(c, level) in &self.points {
            acc += c * (level - prev);
            prev = level;
        }
        acc
    }
}

impl CsSample {
    pub fn new(records: Vec<CsRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyData);
        }
        let xs = records.iter().map(|r| r.x).collect();
        Ok(CsSample { records, xs })
    }

    pub fn records(&self) -> &[CsRecord] {
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

    /// B̂(t; x): kernel-weighted fraction of records already observed by an
    /// inspection at or below t.
    pub fn inspection_sub_cdf(
        &self,
        kernel: &Kernel,
        bandwidth: &Bandwidth,
        t: f64,
        x: f64,
    ) -> Result<f64> {
        let w = kernel_weights(&self.xs, kernel, bandwidth, x)?;
        let total: f64 = w.iter().sum();
        let hit: f64 = self
            .records
            .iter()
            .zip(&w)
            .filter(|(r, _)| r.delta && r.c <= t)
            .map(|(_, &wi)| wi)
            .sum();
        Ok((hit / total).clamp(0.0, 1.0))
    }

    /// The local NPMLE: weighted isotonic regression of δ on c, records
    /// pooled at tied inspection points first. Requires at least two
    /// distinct inspection points with positive kernel mass.
    pub fn fit_curve(&self, kernel: &Kernel, bandwidth: &Bandwidth, x: f64) -> Result<MonotoneFit> {
        let w = kernel_weights(&self.xs, kernel, bandwidth, x)?;
        let mut rows: Vec<(f64, f64, f64)> = self
            .records
            .iter()
            .zip(&w)
            .filter(|(_, &wi)| wi > 0.0)
            .map(|(r, &wi)| (r.c, r.delta as u8 as f64, wi))
            .collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Pool tied inspection points: weighted average response.
        let mut cs: Vec<f64> = Vec::new();
        let mut resp: Vec<f64> = Vec::new();
        let mut wts: Vec<f64> = Vec::new();
        for (c, d, wi) in rows {
            match cs.last() {
                Some(&last) if last == c => {
                    let k = cs.len() - 1;
                    resp[k] = (resp[k] * wts[k] + d * wi) / (wts[k] + wi);
                    wts[k] += wi;
                }
                _ => {
                    cs.push(c);
                    resp.push(d);
                    wts.push(wi);
                }
            }
        }
        if cs.len() < 2 {
            return Err(Error::Degenerate(format!(
                "need at least 2 distinct inspection points with positive kernel mass, got {}",
                cs.len()
            )));
        }
        let levels = isotonic_fit(&resp, &wts, Direction::Increasing);
        let points = cs.into_iter().zip(levels).map(|(c, l)| (c, l.clamp(0.0, 1.0))).collect();
        Ok(MonotoneFit { points, weights: wts })
    }

    /// Diagnostic deconvolution route: the per-level ratio of increments of
    /// the inspection sub-CDF against the (kernel-weighted) empirical
    /// inspection CDF. This is the unconstrained per-level frequency curve
    /// that the monotone fit projects; exposed for comparison only, the
    /// monotone fit is the estimator.
    pub fn deconvolution_diagnostic(
        &self,
        kernel: &Kernel,
        bandwidth: &Bandwidth,
        x: f64,
    ) -> Result<Vec<(f64, f64)>> {
        let w = kernel_weights(&self.xs, kernel, bandwidth, x)?;
        let mut rows: Vec<(f64, f64, f64)> = self
            .records
            .iter()
            .zip(&w)
            .filter(|(_, &wi)| wi > 0.0)
            .map(|(r, &wi)| (r.c, r.delta as u8 as f64 * wi, wi))
            .collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut hit = 0.0;
        let mut mass = 0.0;
        for (c, dwi, wi) in rows {
            match out.last() {
                Some(&(last, _)) if last == c => {
                    hit += dwi;
                    mass += wi;
                    let k = out.len() - 1;
                    out[k].1 = hit / mass;
                }
                _ => {
                    hit = dwi;
                    mass = wi;
                    out.push((c, hit / mass));
                }
            }
        }
        Ok(out)
    }

    /// m̂(x): mean of the fitted curve read as the conditional CDF of the
    /// response. The curve must pin down all but `tail_threshold` of the
    /// mass inside `support` (its first level near 0 and last level near 1),
    /// otherwise the unassigned tail mass is reported as an error.
    pub fn regression_mean(
        &self,
        kernel: &Kernel,
        bandwidth: &Bandwidth,
        x: f64,
        support: Interval,
    ) -> Result<f64> {
        let fit = self.fit_curve(kernel, bandwidth, x)?;
        let points: Vec<(f64, f64)> = fit
            .points
            .iter()
            .copied()
            .filter(|&(c, _)| support.contains(c))
            .collect();
        if points.is_empty() {
            return Err(Error::Degenerate("no inspection points inside the support".into()));
        }
        let restricted = MonotoneFit { points, weights: Vec::new() };
        let tail = restricted.min_level() + (1.0 - restricted.max_level());
        const TAIL_THRESHOLD: f64 = 0.05;
        if tail > TAIL_THRESHOLD {
            return Err(Error::PartialSupport { mass: tail, threshold: TAIL_THRESHOLD });
        }
        Ok(restricted.mean())
    }
}

impl CsSample {
    /// Conditional-CDF view of the fitted status curves, for quantile
    /// inversion and grid evaluation; requires a nonempty window.
    pub fn conditional(
        &self,
        kernel: Kernel,
        bandwidth: Bandwidth,
    ) -> Result<CsConditionalCdf<'_>> {
        let window = self.window(&bandwidth)?;
        Ok(CsConditionalCdf { sample: self, kernel, bandwidth, window })
    }
}

#[derive(Debug, Clone)]
pub struct CsConditionalCdf<'a> {
    sample: &'a CsSample,
    kernel: Kernel,
    bandwidth: Bandwidth,
    window: Interval,
}

impl crate::conditional::ConditionalCdf for CsConditionalCdf<'_> {
    fn window(&self) -> Interval {
        self.window
    }

    fn slice(&self, x: f64) -> Result<crate::step::StepDistribution> {
        let fit = self.sample.fit_curve(&self.kernel, &self.bandwidth, x)?;
        let mut jumps = Vec::with_capacity(fit.points().len());
        let mut prev = 0.0;
        for &(c, level) in fit.points() {
            if level > prev {
                jumps.push((c, level - prev));
                prev = level;
            }
        }
        Ok(crate::step::StepDistribution::new(jumps, 0.0))
    }
}

/// Binomial log-likelihood of a candidate curve at the (pooled) inspection
/// points: Σ w·[δ̄ log F + (1-δ̄) log(1-F)], with 0·log 0 = 0.
pub fn status_log_likelihood(responses: &[f64], weights: &[f64], curve: &[f64]) -> f64 {
    let mut ll = 0.0;
    for ((&d, &w), &f) in responses.iter().zip(weights).zip(curve) {
        let f = f.clamp(0.0, 1.0);
        if d > 0.0 {
            ll += if f > 0.0 { w * d * f.ln() } else { f64::NEG_INFINITY };
        }
        if d < 1.0 {
            ll += if f < 1.0 { w * (1.0 - d) * (1.0 - f).ln() } else { f64::NEG_INFINITY };
        }
    }
    ll
}

/// Score pieces of the interval-observation log-likelihood, assembled from
/// caller-supplied distribution values so the identity between them can be
/// checked against independent quadrature.
pub mod scores {
    /// Derivative of the log-likelihood in the location m(x), at
    /// z = c - m(x): -δ·f(z)/F(z) + (1-δ)·f(z)/(1-F(z)).
    pub fn location_score(delta: bool, density: f64, cdf: f64) -> f64 {
        if delta {
            -density / cdf
        } else {
            density / (1.0 - cdf)
        }
    }

    /// Directional derivative along a mean-zero direction `a` of the error
    /// distribution: δ·(∫_{-∞}^z a dF)/F(z) + (1-δ)·(∫_z^∞ a dF)/(1-F(z)),
    /// with the upper integral given by -lower_integral since ∫ a dF = 0.
    pub fn tangent_score(delta: bool, lower_integral: f64, cdf: f64) -> f64 {
        if delta {
            lower_integral / cdf
        } else {
            -lower_integral / (1.0 - cdf)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelKind;

    fn uniform_all() -> (Kernel, Bandwidth) {
        (Kernel::new(KernelKind::Uniform), Bandwidth::fixed(1e6).unwrap())
    }

    fn sample(rows: &[(f64, f64, u8)]) -> CsSample {
        CsSample::new(rows.iter().map(|&(x, c, d)| CsRecord::new(x, c, d == 1)).collect()).unwrap()
    }

    #[test]
    fn inspection_sub_cdf_counts() {
        let s = sample(&[(0.0, 1.0, 1), (0.1, 2.0, 0), (0.2, 3.0, 1), (0.3, 4.0, 1)]);
        let (k, h) = uniform_all();
        assert_eq!(s.inspection_sub_cdf(&k, &h, 10.0, 0.1).unwrap(), 0.75);
        assert_eq!(s.inspection_sub_cdf(&k, &h, 0.5, 0.1).unwrap(), 0.0);
        assert_eq!(s.inspection_sub_cdf(&k, &h, 3.0, 0.1).unwrap(), 0.5);
        let all_hit = sample(&[(0.0, 1.0, 1), (0.1, 2.0, 1)]);
        assert_eq!(all_hit.inspection_sub_cdf(&k, &h, 2.0, 0.05).unwrap(), 1.0);
    }

    #[test]
    fn monotone_deltas_come_back_unchanged() {
        let s = sample(&[(0.0, 1.0, 0), (0.1, 2.0, 0), (0.2, 3.0, 1), (0.3, 4.0, 1)]);
        let (k, h) = uniform_all();
        let fit = s.fit_curve(&k, &h, 0.1).unwrap();
        let levels: Vec<f64> = fit.points().iter().map(|p| p.1).collect();
        assert_eq!(levels, vec![0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn violating_pair_pools_to_half() {
        let s = sample(&[(0.0, 1.0, 1), (0.1, 2.0, 0)]);
        let (k, h) = uniform_all();
        let fit = s.fit_curve(&k, &h, 0.05).unwrap();
        let levels: Vec<f64> = fit.points().iter().map(|p| p.1).collect();
        assert_eq!(levels, vec![0.5, 0.5]);
    }

    #[test]
    fn degenerate_inspection_support_errors() {
        let s = sample(&[(0.0, 1.0, 1), (0.1, 1.0, 0)]);
        let (k, h) = uniform_all();
        assert!(matches!(s.fit_curve(&k, &h, 0.05), Err(Error::Degenerate(_))));
    }

    #[test]
    fn fit_matches_exhaustive_block_search() {
        // The optimal monotone fit is a contiguous block-average solution;
        // enumerate all block partitions of ≤4 points for every δ pattern.
        for mask in 0u32..16 {
            let deltas: Vec<f64> = (0..4).map(|i| ((mask >> i) & 1) as f64).collect();
            for weights in [[1.0, 1.0, 1.0, 1.0], [0.5, 2.0, 1.0, 3.0]] {
                let fit = isotonic_fit(&deltas, &weights, Direction::Increasing);
                let best = exhaustive_monotone_ls(&deltas, &weights);
                let fit_sse = sse(&deltas, &weights, &fit);
                assert!(
                    fit_sse <= best + 1e-12,
                    "mask {mask}: PAVA {fit_sse} vs exhaustive {best}"
                );
            }
        }
    }

    #[test]
    fn fit_likelihood_dominates_monotone_candidates() {
        for mask in 0u32..16 {
            let deltas: Vec<f64> = (0..4).map(|i| ((mask >> i) & 1) as f64).collect();
            let weights = [1.0, 2.0, 1.5, 0.5];
            let fit = isotonic_fit(&deltas, &weights, Direction::Increasing);
            let fit_ll = status_log_likelihood(&deltas, &weights, &fit);
            // Monotone repair of the raw pattern by running max, the overall
            // mean as a constant curve, and a fixed ramp.
            let run_max: Vec<f64> = deltas
                .iter()
                .scan(0.0f64, |m, &d| {
                    *m = m.max(d);
                    Some(*m)
                })
                .collect();
            let mean =
                deltas.iter().zip(&weights).map(|(&d, &w)| d * w).sum::<f64>() / 5.0;
            let candidates =
                [run_max, vec![mean; 4], vec![0.1, 0.3, 0.6, 0.9]];
            for cand in candidates {
                let cand_ll = status_log_likelihood(&deltas, &weights, &cand);
                assert!(
                    fit_ll + 1e-12 >= cand_ll,
                    "mask {mask}: PAVA ll {fit_ll} below candidate ll {cand_ll}"
                );
            }
        }
    }

    fn sse(resp: &[f64], w: &[f64], fit: &[f64]) -> f64 {
        resp.iter().zip(w).zip(fit).map(|((&d, &wi), &f)| wi * (d - f) * (d - f)).sum()
    }

    /// Minimum weighted SSE over monotone vectors, by enumerating contiguous
    /// block partitions (the optimum is a block-average solution).
    fn exhaustive_monotone_ls(resp: &[f64], w: &[f64]) -> f64 {
        let n = resp.len();
        let mut best = f64::INFINITY;
        // Bitmask over n-1 potential block boundaries.
        for cut in 0u32..(1 << (n - 1)) {
            let mut blocks: Vec<(usize, usize)> = Vec::new();
            let mut start = 0;
            for i in 0..n - 1 {
                if (cut >> i) & 1 == 1 {
                    blocks.push((start, i + 1));
                    start = i + 1;
                }
            }
            blocks.push((start, n));
            let mut fitted = vec![0.0; n];
            let mut prev = f64::NEG_INFINITY;
            let mut ok = true;
            for &(a, b) in &blocks {
                let wsum: f64 = w[a..b].iter().sum();
                let mean: f64 =
                    resp[a..b].iter().zip(&w[a..b]).map(|(&d, &wi)| d * wi).sum::<f64>() / wsum;
                if mean < prev - 1e-12 {
                    ok = false;
                    break;
                }
                prev = mean;
                for f in fitted[a..b].iter_mut() {
                    *f = mean;
                }
            }
            if ok {
                best = best.min(sse(resp, w, &fitted));
            }
        }
        best
    }

    #[test]
    fn monotone_fit_is_projection_of_the_deconvolution_diagnostic() {
        let s = sample(&[
            (0.0, 1.0, 1),
            (0.1, 2.0, 0),
            (0.2, 2.0, 1),
            (0.3, 3.0, 0),
            (0.4, 4.0, 1),
        ]);
        let (k, h) = uniform_all();
        let diag = s.deconvolution_diagnostic(&k, &h, 0.2).unwrap();
        // Per-level frequencies: 1, 1/2, 0, 1 at c = 1, 2, 3, 4.
        let values: Vec<f64> = diag.iter().map(|p| p.1).collect();
        assert_eq!(values, vec![1.0, 0.5, 0.0, 1.0]);
        // The sub-CDF is the weighted cumulative of the diagnostic's hits.
        assert_eq!(s.inspection_sub_cdf(&k, &h, 2.0, 0.2).unwrap(), 0.4);

        let fit = s.fit_curve(&k, &h, 0.2).unwrap();
        let weights: Vec<f64> = fit.weights().to_vec();
        let projected = isotonic_fit(&values, &weights, Direction::Increasing);
        for ((c, level), (d, p)) in fit.points().iter().zip(diag.iter().zip(&projected)) {
            assert_eq!(*c, d.0);
            assert!((level - p).abs() < 1e-15);
        }
    }

    #[test]
    fn regression_mean_point_mass_and_symmetry() {
        // Curve 0,0,1,1: a unit jump at the third inspection point.
        let s = sample(&[(0.0, 1.0, 0), (0.1, 2.0, 0), (0.2, 3.0, 1), (0.3, 4.0, 1)]);
        let (k, h) = uniform_all();
        let support = Interval::new(-10.0, 10.0);
        let m = s.regression_mean(&k, &h, 0.1, support).unwrap();
        assert!((m - 3.0).abs() < 1e-12);

        // Symmetric curve 0, 1/2, 1/2, 1 around 3: mass 1/2 at 2 and 1/2 at 4.
        let s2 = sample(&[(0.0, 1.0, 0), (0.1, 2.0, 1), (0.2, 3.0, 0), (0.3, 4.0, 1)]);
        let m2 = s2.regression_mean(&k, &h, 0.1, support).unwrap();
        assert!((m2 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn partial_support_is_reported() {
        // All responses already observed at every inspection: the curve sits
        // at one and never starts near zero.
        let s = sample(&[(0.0, 1.0, 1), (0.1, 2.0, 1), (0.2, 3.0, 1)]);
        let (k, h) = uniform_all();
        match s.regression_mean(&k, &h, 0.1, Interval::new(-10.0, 10.0)) {
            Err(Error::PartialSupport { mass, threshold }) => {
                assert!((mass - 1.0).abs() < 1e-12);
                assert_eq!(threshold, 0.05);
            }
            other => panic!("expected partial support, got {other:?}"),
        }
    }

    #[test]
    fn curve_evaluation_is_a_step_function() {
        let fit = MonotoneFit {
            points: vec![(1.0, 0.2), (2.0, 0.6), (3.0, 1.0)],
            weights: vec![1.0; 3],
        };
        assert_eq!(fit.evaluate(0.9), 0.0);
        assert_eq!(fit.evaluate(1.0), 0.2);
        assert_eq!(fit.evaluate(2.5), 0.6);
        assert_eq!(fit.evaluate(9.0), 1.0);
        assert!((fit.mean() - (1.0 * 0.2 + 2.0 * 0.4 + 3.0 * 0.4)).abs() < 1e-15);
    }
}
