//! Replication harness: simulate a design, run a bound estimator over a
//! query grid, and aggregate bias/variance/RMSE against the oracle truth.

use std::sync::Arc;

use partreg_core::{exec, Bandwidth, Interval, Kernel};

use crate::error::{SimError, SimResult};
use crate::simulate::{derive_seed, simulate_design, Design, DesignSample};
use crate::truth::DesignTruth;

#[derive(Debug, Clone, Copy)]
pub struct SmoothingSpec {
    pub kernel: Kernel,
    pub bandwidth: BandwidthSpec,
}

#[derive(Debug, Clone, Copy)]
pub enum BandwidthSpec {
    Fixed(f64),
    ScaledPower { exponent: f64 },
}

impl SmoothingSpec {
    pub fn resolve(&self, xs: &[f64]) -> partreg_core::Result<Bandwidth> {
        match self.bandwidth {
            BandwidthSpec::Fixed(h) => Bandwidth::fixed(h),
            BandwidthSpec::ScaledPower { exponent } => {
                partreg_core::kernel::default_bandwidth(xs, exponent)
            }
        }
    }
}

/// One evaluation point: a covariate value and, for (y, x) functionals, a
/// response level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Query {
    pub x: f64,
    pub y: Option<f64>,
}

impl Query {
    pub fn at_x(x: f64) -> Self {
        Query { x, y: None }
    }

    pub fn at(y: f64, x: f64) -> Self {
        Query { x, y: Some(y) }
    }

    pub fn y_or_err(&self) -> partreg_core::Result<f64> {
        self.y.ok_or_else(|| {
            partreg_core::Error::InvalidArgument("query needs a response level y".into())
        })
    }
}

type EstimateFn =
    dyn Fn(&DesignSample, &SmoothingSpec, Query) -> partreg_core::Result<f64> + Send + Sync;
type TruthFn = dyn Fn(&DesignTruth, Query) -> SimResult<f64> + Send + Sync;

/// A named estimator bound to the design sample it runs on, paired with the
/// oracle value it chases.
#[derive(Clone)]
pub struct Binding {
    name: String,
    estimate: Arc<EstimateFn>,
    truth: Arc<TruthFn>,
}

impl Binding {
    pub fn new(
        name: impl Into<String>,
        estimate: impl Fn(&DesignSample, &SmoothingSpec, Query) -> partreg_core::Result<f64>
            + Send
            + Sync
            + 'static,
        truth: impl Fn(&DesignTruth, Query) -> SimResult<f64> + Send + Sync + 'static,
    ) -> Self {
        Binding { name: name.into(), estimate: Arc::new(estimate), truth: Arc::new(truth) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn estimate(
        &self,
        sample: &DesignSample,
        smoothing: &SmoothingSpec,
        query: Query,
    ) -> partreg_core::Result<f64> {
        (self.estimate)(sample, smoothing, query)
    }

    pub fn truth_value(&self, truth: &DesignTruth, query: Query) -> SimResult<f64> {
        (self.truth)(truth, query)
    }

    /// The fitted conditional CDF at (y, x), whichever design produced the
    /// sample.
    pub fn conditional_cdf() -> Binding {
        Binding::new(
            "conditional_cdf",
            |sample, smoothing, q| {
                let y = q.y_or_err()?;
                let b = smoothing.resolve(&sample.xs())?;
                let k = smoothing.kernel;
                match sample {
                    DesignSample::LeftTruncated(s) => {
                        Ok(s.conditional_cdf(&k, &b, q.x)?.cdf(y))
                    }
                    DesignSample::Ltrc(s) => {
                        Ok(s.conditional_distribution(&k, &b, q.x)?.cdf(y))
                    }
                    DesignSample::RightTruncated(s) => Ok(s.conditional_cdf(&k, &b, q.x)?.cdf(y)),
                    DesignSample::DoubleTruncated(s) => {
                        let fc = s.censoring_distribution();
                        Ok(s.conditional_cdf(&k, &b, q.x, &fc)?.dist.cdf(y))
                    }
                    DesignSample::CurrentStatus(s) => Ok(s.fit_curve(&k, &b, q.x)?.evaluate(y)),
                    DesignSample::Binary(_) => Err(partreg_core::Error::InvalidArgument(
                        "conditional CDF is not defined for binary designs".into(),
                    )),
                }
            },
            |truth, q| Ok(truth.conditional_cdf(q.y_or_err()?, q.x)),
        )
    }

    /// The regression mean m̂(x) of the design.
    pub fn regression_mean() -> Binding {
        Binding::new(
            "regression_mean",
            |sample, smoothing, q| {
                let b = smoothing.resolve(&sample.xs())?;
                let k = smoothing.kernel;
                match sample {
                    DesignSample::LeftTruncated(s) => s.regression_mean(&k, &b, q.x),
                    DesignSample::Ltrc(s) => s.regression_mean(&k, &b, q.x),
                    DesignSample::RightTruncated(s) => s.regression_mean(&k, &b, q.x),
                    DesignSample::CurrentStatus(s) => {
                        s.regression_mean(&k, &b, q.x, Interval::new(f64::MIN, f64::MAX))
                    }
                    DesignSample::DoubleTruncated(_) | DesignSample::Binary(_) => {
                        Err(partreg_core::Error::InvalidArgument(
                            "regression mean is not defined for this design".into(),
                        ))
                    }
                }
            },
            |truth, q| Ok(truth.m_at(q.x)),
        )
    }

    /// Â(y; x) under left truncation.
    pub fn sub_cdf() -> Binding {
        Binding::new(
            "sub_cdf",
            |sample, smoothing, q| {
                let y = q.y_or_err()?;
                let b = smoothing.resolve(&sample.xs())?;
                match sample {
                    DesignSample::LeftTruncated(s) => s.sub_cdf(&smoothing.kernel, &b, y, q.x),
                    _ => Err(partreg_core::Error::InvalidArgument(
                        "sub_cdf runs on the left-truncated design".into(),
                    )),
                }
            },
            |truth, q| {
                Ok(crate::oracle::alpha_a_b(truth, Design::LeftTruncated, q.y_or_err()?, q.x)?.a)
            },
        )
    }

    /// B̂(y; x) under left truncation.
    pub fn risk_prob() -> Binding {
        Binding::new(
            "risk_prob",
            |sample, smoothing, q| {
                let y = q.y_or_err()?;
                let b = smoothing.resolve(&sample.xs())?;
                match sample {
                    DesignSample::LeftTruncated(s) => s.risk_prob(&smoothing.kernel, &b, y, q.x),
                    _ => Err(partreg_core::Error::InvalidArgument(
                        "risk_prob runs on the left-truncated design".into(),
                    )),
                }
            },
            |truth, q| {
                Ok(crate::oracle::alpha_a_b(truth, Design::LeftTruncated, q.y_or_err()?, q.x)?.b)
            },
        )
    }

    /// Debiased population prevalence: the sampled case fraction pushed
    /// through the θ-debiasing map. This is the functional the covariate-
    /// truncated design recovers (selection on X leaves the conditional law
    /// of Y unchanged, so the θ correction is marginal, not pointwise).
    pub fn debiased_prevalence(theta: f64) -> Binding {
        Binding::new(
            "debiased_prevalence",
            move |sample, _smoothing, _q| match sample {
                DesignSample::Binary(rows) => {
                    let control_fraction =
                        partreg_core::bernoulli::estimate_theta_gamma(rows)?;
                    Ok(partreg_core::bernoulli::debias_probability(
                        1.0 - control_fraction,
                        theta,
                    ))
                }
                _ => Err(partreg_core::Error::InvalidArgument(
                    "debiased prevalence runs on binary designs".into(),
                )),
            },
            |truth, _q| {
                let odds = crate::oracle::population_odds(truth)?;
                Ok(1.0 / (1.0 + odds))
            },
        )
    }

    /// Debiased Bernoulli fit p̂(x) with θ taken from the truth's sampling
    /// rates (case-control) or covariate-truncation rates.
    pub fn debiased_probability(theta: f64) -> Binding {
        Binding::new(
            "debiased_probability",
            move |sample, smoothing, q| {
                let b = smoothing.resolve(&sample.xs())?;
                match sample {
                    DesignSample::Binary(rows) => {
                        let fit = partreg_core::bernoulli::fit_debiased_kernel(
                            rows,
                            theta,
                            &smoothing.kernel,
                            &b,
                            &[q.x],
                        )?;
                        Ok(fit.points()[0].1)
                    }
                    _ => Err(partreg_core::Error::InvalidArgument(
                        "debiased fit runs on binary designs".into(),
                    )),
                }
            },
            |truth, q| truth.p_at(q.x),
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub smoothing: SmoothingSpec,
    /// Run replications through the rayon pool when compiled with the
    /// `parallel` feature; results are identical either way.
    pub parallel: bool,
}

#[derive(Debug, Clone)]
pub struct ReportRow {
    pub query: Query,
    pub truth: f64,
    pub mean: f64,
    pub bias: f64,
    pub variance: f64,
    pub rmse: f64,
    /// Replications where the estimator failed at this query.
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct EstimatorReport {
    pub design: &'static str,
    pub estimator: String,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
    /// Mean empirical acceptance rate across replications.
    pub acceptance_rate: f64,
}

impl EstimatorReport {
    pub fn grid_mean_rmse(&self) -> f64 {
        self.rows.iter().map(|r| r.rmse).sum::<f64>() / self.rows.len() as f64
    }
}

/// Run `reps` independent replications of (simulate → estimate over grid)
/// and aggregate against the oracle truth per query. Estimator failures are
/// recorded, not fatal; replication seeds derive from `seed` by SplitMix64,
/// so reports are reproducible bit-for-bit.
pub fn monte_carlo(
    truth: &DesignTruth,
    design: Design,
    binding: &Binding,
    grid: &[Query],
    cfg: &McConfig,
) -> SimResult<EstimatorReport> {
    if cfg.reps < 2 {
        return Err(SimError::Config("need at least 2 replications".into()));
    }
    if grid.is_empty() {
        return Err(SimError::Config("empty query grid".into()));
    }
    let rep_ids: Vec<u64> = (0..cfg.reps as u64).collect();
    let run_one = |rep: &u64| -> SimResult<(Vec<Option<f64>>, f64)> {
        let sim = simulate_design(truth, design, cfg.n, derive_seed(cfg.seed, *rep))?;
        let estimates = grid
            .iter()
            .map(|&q| binding.estimate(&sim.sample, &cfg.smoothing, q).ok())
            .collect();
        Ok((estimates, sim.acceptance_rate))
    };
    let outcomes: Vec<SimResult<(Vec<Option<f64>>, f64)>> = if cfg.parallel {
        exec::map(&rep_ids, run_one)
    } else {
        exec::map_seq(&rep_ids, run_one)
    };

    let mut per_query: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.reps); grid.len()];
    let mut failures = vec![0usize; grid.len()];
    let mut acceptance = 0.0;
    for outcome in outcomes {
        let (estimates, rate) = outcome?;
        acceptance += rate;
        for (i, est) in estimates.into_iter().enumerate() {
            match est {
                Some(v) => per_query[i].push(v),
                None => failures[i] += 1,
            }
        }
    }
    acceptance /= cfg.reps as f64;

    let mut rows = Vec::with_capacity(grid.len());
    for ((&query, values), &failed) in grid.iter().zip(&per_query).zip(&failures) {
        let truth_value = binding.truth_value(truth, query)?;
        let k = values.len();
        let (mean, variance, rmse) = if k == 0 {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            let mean = values.iter().sum::<f64>() / k as f64;
            let variance = if k > 1 {
                values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64
            } else {
                0.0
            };
            let mse = values
                .iter()
                .map(|v| (v - truth_value) * (v - truth_value))
                .sum::<f64>()
                / k as f64;
            (mean, variance, mse.sqrt())
        };
        rows.push(ReportRow {
            query,
            truth: truth_value,
            mean,
            bias: mean - truth_value,
            variance,
            rmse,
            failures: failed,
        });
    }
    Ok(EstimatorReport {
        design: design.name(),
        estimator: binding.name().to_string(),
        n: cfg.n,
        reps: cfg.reps,
        seed: cfg.seed,
        rows,
        acceptance_rate: acceptance,
    })
}
