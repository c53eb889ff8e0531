//! The estimate subcommand: fit the design's estimators over a covariate
//! grid and emit plot-ready CSVs plus the run manifest.

use partreg_core::kernel::evaluation_window;
use partreg_core::{
    bernoulli, exec, quantile, ConditionalCdf, Direction, DtTruncationNumerator, Interval,
    StepDistribution, XInversion,
};
use partreg_sim::{Design, DesignSample};
use serde_json::json;

use crate::commands::{parse_grid_spec, parse_levels, resolve_smoothing};
use crate::fail::{CliError, CliResult};
use crate::ingest::{ingest, Dataset};
use crate::output::{fmt_bool, fmt_f64, CsvFile, Manifest};
use crate::args::{DirectionArg, EstimateArgs};

pub fn run(args: &EstimateArgs) -> CliResult<()> {
    let design: Design = args.design.into();
    let dataset = ingest(&args.input, design)?;
    let config = json!({
        "input": args.input.display().to_string(),
        "design": design.name(),
        "kernel": format!("{:?}", args.smoothing.kernel).to_lowercase(),
        "bandwidth": args.smoothing.bandwidth,
        "bandwidth_exponent": args.smoothing.bandwidth_exponent,
        "grid": args.grid,
        "grid_count": args.grid_count,
        "y_grid": args.y_grid,
        "y_grid_count": args.y_grid_count,
        "theta": args.theta,
        "quantiles": args.quantiles,
        "y_levels": args.y_levels,
        "monotone_direction": format!("{:?}", args.monotone_direction).to_lowercase(),
        "dt_printed_numerator": args.dt_printed_numerator,
        "seed": args.seed,
    });
    let mut manifest = Manifest::new("estimate", design.name(), args.seed, config)
        .with_rejects(&dataset.rejects);
    manifest.records = dataset.len();

    match &dataset.sample {
        DesignSample::Binary(_) => estimate_binary(args, design, &dataset, &mut manifest)?,
        _ => estimate_continuous(args, &dataset, &mut manifest)?,
    }

    let manifest_path = args.out_dir.join("manifest.json");
    manifest.outputs.push("manifest.json".to_string());
    manifest.write(&manifest_path)?;
    println!(
        "estimate: {} records ({} rejected), outputs in {}",
        dataset.len(),
        dataset.rejects.len(),
        args.out_dir.display()
    );
    Ok(())
}

fn levels_of(args: &EstimateArgs) -> CliResult<Vec<f64>> {
    parse_levels(&args.quantiles, true)
}

fn covariate_grid(args: &EstimateArgs, window: Interval) -> CliResult<Vec<f64>> {
    let grid = match &args.grid {
        Some(spec) => parse_grid_spec(spec)?,
        None => window.grid(args.grid_count),
    };
    for &x in &grid {
        if !window.contains(x) {
            return Err(CliError::Estimation(format!(
                "grid point {x} outside the evaluation window [{}, {}]",
                window.lo, window.hi
            )));
        }
    }
    Ok(grid)
}

fn response_grid(args: &EstimateArgs, observed: (f64, f64)) -> CliResult<Vec<f64>> {
    match &args.y_grid {
        Some(spec) => parse_grid_spec(spec),
        None => Ok(Interval::new(observed.0, observed.1).grid(args.y_grid_count)),
    }
}

struct ConditionalOutputs {
    defect_mean: f64,
    defect_max: f64,
    skipped: usize,
}

/// Evaluate slices over the grid and write cdf.csv, quantiles.csv and the
/// m_hat column of estimates.csv (when the design defines a mean).
#[allow(clippy::too_many_arguments)]
fn emit_conditional<C: ConditionalCdf + Sync>(
    args: &EstimateArgs,
    cond: &C,
    grid: &[f64],
    y_grid: &[f64],
    with_mean: bool,
) -> CliResult<ConditionalOutputs> {
    let levels = levels_of(args)?;
    let slices: Vec<partreg_core::Result<StepDistribution>> =
        exec::map(grid, |&x| cond.slice(x));

    let mut estimates = if with_mean {
        Some(CsvFile::create(&args.out_dir.join("estimates.csv"), &["x", "m_hat"])?)
    } else {
        None
    };
    let mut cdf = CsvFile::create(&args.out_dir.join("cdf.csv"), &["x", "y", "cdf"])?;
    let mut quants = CsvFile::create(
        &args.out_dir.join("quantiles.csv"),
        &["kind", "u", "fixed", "value", "boundary"],
    )?;

    let mut defect_sum = 0.0;
    let mut defect_max: f64 = 0.0;
    let mut skipped = 0usize;
    let mut usable = 0usize;
    for (&x, slice) in grid.iter().zip(&slices) {
        let slice = match slice {
            Ok(s) => s,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        usable += 1;
        let unlocated = 1.0 - slice.jump_mass();
        defect_sum += unlocated;
        defect_max = defect_max.max(unlocated);
        if let Some(est) = estimates.as_mut() {
            est.row(&[fmt_f64(x), fmt_f64(slice.mean())])?;
        }
        for &y in y_grid {
            cdf.row(&[fmt_f64(x), fmt_f64(y), fmt_f64(slice.cdf(y))])?;
        }
        for &u in &levels {
            let q = slice.quantile(u);
            quants.row(&[
                "in_y".to_string(),
                fmt_f64(u),
                fmt_f64(x),
                fmt_f64(q.value),
                fmt_bool(q.at_boundary),
            ])?;
        }
    }
    if let Some(y_levels) = &args.y_levels {
        for &y in &parse_levels(y_levels, false)? {
            for &u in &levels {
                let q = quantile::quantile_in_x(cond, u, y, grid, XInversion::SupAtLeast, false)?;
                quants.row(&[
                    "in_x".to_string(),
                    fmt_f64(u),
                    fmt_f64(y),
                    fmt_f64(q.value),
                    fmt_bool(q.at_boundary),
                ])?;
            }
        }
    }
    if let Some(est) = estimates {
        est.finish()?;
    }
    cdf.finish()?;
    quants.finish()?;
    Ok(ConditionalOutputs {
        defect_mean: if usable > 0 { defect_sum / usable as f64 } else { f64::NAN },
        defect_max,
        skipped,
    })
}

fn write_marginal(
    file: &mut CsvFile,
    curve: &str,
    dist: &StepDistribution,
) -> CliResult<()> {
    for &(loc, _) in dist.jumps() {
        file.row(&[curve.to_string(), fmt_f64(loc), fmt_f64(dist.cdf(loc))])?;
    }
    Ok(())
}

fn estimate_continuous(
    args: &EstimateArgs,
    dataset: &Dataset,
    manifest: &mut Manifest,
) -> CliResult<()> {
    let xs = dataset.sample.xs();
    let (kernel, bandwidth) = resolve_smoothing(&args.smoothing, &xs)?;
    let window = evaluation_window(&xs, &bandwidth)?;
    manifest.window = Some((window.lo, window.hi));
    let grid = covariate_grid(args, window)?;
    if grid.is_empty() {
        return Ok(());
    }

    let mut files = vec!["cdf.csv".to_string(), "quantiles.csv".to_string()];
    match &dataset.sample {
        DesignSample::LeftTruncated(s) => {
            let observed = response_range(s.records().iter().map(|r| r.y));
            let y_grid = response_grid(args, observed)?;
            let cond = s.conditional(kernel, bandwidth)?;
            let out = emit_conditional(args, &cond, &grid, &y_grid, true)?;
            apply_outputs(manifest, &out);
            let mut marginals =
                CsvFile::create(&args.out_dir.join("marginals.csv"), &["curve", "location", "cdf"])?;
            write_marginal(&mut marginals, "response_cdf", &s.marginal_distribution())?;
            write_marginal(&mut marginals, "truncation_cdf", &s.truncation_cdf())?;
            marginals.finish()?;
            manifest.stats = json!({
                "mean_response": s.mean_response(),
                "mean_truncation": s.mean_truncation(),
            });
            files.push("estimates.csv".to_string());
            files.push("marginals.csv".to_string());
        }
        DesignSample::Ltrc(s) => {
            let observed = response_range(s.records().iter().map(|r| r.z));
            let y_grid = response_grid(args, observed)?;
            let cond = s.conditional(kernel, bandwidth)?;
            let out = emit_conditional(args, &cond, &grid, &y_grid, true)?;
            apply_outputs(manifest, &out);
            let mut marginals =
                CsvFile::create(&args.out_dir.join("marginals.csv"), &["curve", "location", "cdf"])?;
            write_marginal(&mut marginals, "response_cdf", &s.marginal_distribution())?;
            marginals.finish()?;
            let censored = s.records().iter().filter(|r| !r.delta).count();
            manifest.stats = json!({
                "censored_fraction": censored as f64 / s.len() as f64,
            });
            files.push("estimates.csv".to_string());
            files.push("marginals.csv".to_string());
        }
        DesignSample::RightTruncated(s) => {
            let observed = response_range(s.records().iter().map(|r| r.y));
            let y_grid = response_grid(args, observed)?;
            let cond = s.conditional(kernel, bandwidth)?;
            let out = emit_conditional(args, &cond, &grid, &y_grid, true)?;
            apply_outputs(manifest, &out);
            let mut marginals =
                CsvFile::create(&args.out_dir.join("marginals.csv"), &["curve", "location", "cdf"])?;
            write_marginal(&mut marginals, "censoring_cdf", &s.censoring_distribution())?;
            marginals.finish()?;
            files.push("estimates.csv".to_string());
            files.push("marginals.csv".to_string());
        }
        DesignSample::DoubleTruncated(s) => {
            let observed = response_range(s.records().iter().map(|r| r.y));
            let y_grid = response_grid(args, observed)?;
            let cond = s.conditional(kernel, bandwidth)?;
            let out = emit_conditional(args, &cond, &grid, &y_grid, false)?;
            apply_outputs(manifest, &out);
            // Clip/exclusion diagnostics from the per-point estimates.
            let fc = s.censoring_distribution();
            let mut clipped = 0usize;
            let mut excluded = 0usize;
            for &x in &grid {
                if let Ok(est) = s.conditional_cdf(&kernel, &bandwidth, x, &fc) {
                    clipped += est.clipped_events;
                    excluded += est.excluded_events;
                }
            }
            manifest.clipped_events = Some(clipped);
            manifest.excluded_events = Some(excluded);
            let numerator = if args.dt_printed_numerator {
                DtTruncationNumerator::AsPrinted
            } else {
                DtTruncationNumerator::TruncationEvents
            };
            let mut marginals =
                CsvFile::create(&args.out_dir.join("marginals.csv"), &["curve", "location", "cdf"])?;
            write_marginal(&mut marginals, "censoring_cdf", &fc)?;
            write_marginal(&mut marginals, "truncation_cdf", &s.truncation_cdf(numerator))?;
            marginals.finish()?;
            files.push("marginals.csv".to_string());
        }
        DesignSample::CurrentStatus(s) => {
            let observed = response_range(s.records().iter().map(|r| r.c));
            let y_grid = response_grid(args, observed)?;
            let cond = s.conditional(kernel, bandwidth)?;
            let out = emit_conditional(args, &cond, &grid, &y_grid, false)?;
            apply_outputs(manifest, &out);
            // Means need the identifiability check, so they get their own
            // pass with failures skipped and counted.
            let support = Interval::new(observed.0, observed.1);
            let mut estimates =
                CsvFile::create(&args.out_dir.join("estimates.csv"), &["x", "m_hat"])?;
            let means: Vec<(f64, partreg_core::Result<f64>)> = exec::map(&grid, |&x| {
                (x, s.regression_mean(&kernel, &bandwidth, x, support))
            });
            let mut failed = manifest.skipped_grid_points.unwrap_or(0);
            for (x, m) in means {
                match m {
                    Ok(m) => estimates.row(&[fmt_f64(x), fmt_f64(m)])?,
                    Err(_) => failed += 1,
                }
            }
            manifest.skipped_grid_points = Some(failed);
            estimates.finish()?;
            let hit = s.records().iter().filter(|r| r.delta).count();
            manifest.stats = json!({
                "already_observed_fraction": hit as f64 / s.len() as f64,
            });
            files.push("estimates.csv".to_string());
        }
        DesignSample::Binary(_) => unreachable!("binary designs take the discrete path"),
    }
    manifest.outputs.extend(files);
    Ok(())
}

fn apply_outputs(manifest: &mut Manifest, out: &ConditionalOutputs) {
    manifest.defect_mean = Some(out.defect_mean);
    manifest.defect_max = Some(out.defect_max);
    manifest.skipped_grid_points = Some(out.skipped);
}

fn response_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

fn estimate_binary(
    args: &EstimateArgs,
    design: Design,
    dataset: &Dataset,
    manifest: &mut Manifest,
) -> CliResult<()> {
    let rows = match &dataset.sample {
        DesignSample::Binary(rows) => rows,
        _ => unreachable!(),
    };
    let xs = dataset.sample.xs();
    let (kernel, bandwidth) = resolve_smoothing(&args.smoothing, &xs)?;
    let window = evaluation_window(&xs, &bandwidth)?;
    manifest.window = Some((window.lo, window.hi));
    let grid = covariate_grid(args, window)?;
    if grid.is_empty() {
        return Ok(());
    }

    let needs_theta = matches!(design, Design::CaseControl | Design::XTruncated);
    let theta = match (needs_theta, args.theta) {
        (true, Some(theta)) if theta > 0.0 => Some(theta),
        (true, Some(theta)) => {
            return Err(CliError::Config(format!("theta = {theta} must be positive")))
        }
        (true, None) => {
            return Err(CliError::Config(format!(
                "design {} needs --theta: only the odds ratio α(x) is identifiable \
                 without the sampling ratio",
                design.name()
            )))
        }
        (false, t) => t,
    };

    let fit = match theta {
        Some(theta) => bernoulli::fit_debiased_kernel(rows, theta, &kernel, &bandwidth, &grid)?,
        None => bernoulli::fit_kernel_grid(rows, &kernel, &bandwidth, &grid)?,
    };

    let mut estimates = if needs_theta {
        CsvFile::create(
            &args.out_dir.join("estimates.csv"),
            &["x", "p_hat", "pi_hat", "alpha_hat"],
        )?
    } else {
        CsvFile::create(&args.out_dir.join("estimates.csv"), &["x", "p_hat"])?
    };
    for &(x, p) in fit.points() {
        if needs_theta {
            let pi = bernoulli::fit_kernel(rows, &kernel, &bandwidth, x)?;
            let alpha = bernoulli::estimate_alpha_kernel(rows, &kernel, &bandwidth, x)?;
            estimates.row(&[fmt_f64(x), fmt_f64(p), fmt_f64(pi), fmt_f64(alpha)])?;
        } else {
            estimates.row(&[fmt_f64(x), fmt_f64(p)])?;
        }
    }
    estimates.finish()?;

    let direction = match args.monotone_direction {
        DirectionArg::Increasing => Direction::Increasing,
        DirectionArg::Decreasing => Direction::Decreasing,
    };
    let monotone = bernoulli::monotonize(&fit, direction);
    let mut quants = CsvFile::create(
        &args.out_dir.join("quantiles.csv"),
        &["kind", "u", "fixed", "value", "boundary"],
    )?;
    for &u in &levels_of(args)? {
        let q = bernoulli::invert_monotone(&monotone, u, direction)?;
        quants.row(&[
            "level_inverse".to_string(),
            fmt_f64(u),
            String::new(),
            fmt_f64(q.value),
            fmt_bool(q.at_boundary),
        ])?;
    }
    quants.finish()?;

    manifest.stats = json!({
        "sampled_control_fraction": bernoulli::estimate_theta_gamma(rows)?,
        "sampled_rows": rows.iter().filter(|r| r.s).count(),
    });
    manifest
        .outputs
        .extend(["estimates.csv".to_string(), "quantiles.csv".to_string()]);
    Ok(())
}
