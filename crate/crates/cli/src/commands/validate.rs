//! The validate subcommand: Monte Carlo runs of the design's estimators on
//! its canonical scenario, reported per query and summarized as pass/fail
//! checks (consistency between sample sizes, bias tolerances).

use partreg_core::Kernel;
use partreg_sim::{
    monte_carlo, scenarios, truncation_lambdas, BandwidthSpec, Binding, Design, EstimatorReport,
    McConfig, Query, SmoothingSpec,
};
use serde_json::json;

use crate::fail::{CliError, CliResult};
use crate::output::{fmt_f64, CsvFile, Manifest};
use crate::args::ValidateArgs;

struct Check {
    name: String,
    value: f64,
    bound: f64,
    pass: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, bound, pass: value < bound }
    }
}

fn cdf_grid(design: Design) -> Vec<Query> {
    let (xs, ys): (&[f64], &[f64]) = match design {
        Design::CurrentStatus => (&[-0.3, 0.0, 0.3], &[-1.0, 0.0, 1.0]),
        _ => (&[0.3, 0.5, 0.7], &[1.5, 2.0, 2.5]),
    };
    let mut grid = Vec::new();
    for &x in xs {
        for &y in ys {
            grid.push(Query::at(y, x));
        }
    }
    grid
}

fn mean_grid(design: Design) -> Vec<Query> {
    match design {
        Design::CurrentStatus => vec![Query::at_x(-0.3), Query::at_x(0.0), Query::at_x(0.3)],
        _ => vec![Query::at_x(0.3), Query::at_x(0.5), Query::at_x(0.7)],
    }
}

fn mean_bias_tolerance(design: Design) -> Option<(f64, f64)> {
    // (query x, |bias| bound)
    match design {
        Design::LeftTruncated => Some((0.5, 0.15)),
        Design::Ltrc => Some((0.5, 0.2)),
        Design::RightTruncated => Some((0.5, 0.15)),
        Design::CurrentStatus => Some((0.0, 0.15)),
        _ => None,
    }
}

fn write_report(file: &mut CsvFile, report: &EstimatorReport) -> CliResult<()> {
    for row in &report.rows {
        file.row(&[
            report.estimator.clone(),
            report.n.to_string(),
            fmt_f64(row.query.x),
            row.query.y.map(fmt_f64).unwrap_or_default(),
            fmt_f64(row.truth),
            fmt_f64(row.mean),
            fmt_f64(row.bias),
            fmt_f64(row.variance),
            fmt_f64(row.rmse),
            row.failures.to_string(),
        ])?;
    }
    Ok(())
}

pub fn run(args: &ValidateArgs) -> CliResult<()> {
    let design: Design = args.design.into();
    let truth = scenarios::scenario(design);
    let smoothing = SmoothingSpec {
        kernel: Kernel::new(args.smoothing.kernel.into()),
        bandwidth: match args.smoothing.bandwidth {
            Some(h) => BandwidthSpec::Fixed(h),
            None => BandwidthSpec::ScaledPower { exponent: args.smoothing.bandwidth_exponent },
        },
    };
    let config_large = McConfig {
        n: args.n,
        reps: args.reps,
        seed: args.seed,
        smoothing,
        parallel: true,
    };
    let config_small = McConfig { n: args.n_small, ..config_large };

    let bindings: Vec<(Binding, Vec<Query>)> = match design {
        Design::Plain => vec![(Binding::debiased_probability(1.0), mean_grid(design))],
        Design::CaseControl => {
            let theta = truth.theta()?;
            vec![(Binding::debiased_probability(theta), mean_grid(design))]
        }
        Design::XTruncated => {
            // Selection on X leaves the conditional law unchanged; the θ
            // correction recovers the marginal prevalence.
            let (_, _, theta) = truncation_lambdas(&truth)?;
            vec![(Binding::debiased_prevalence(theta), vec![Query::at_x(0.5)])]
        }
        Design::DoubleTruncated => vec![(Binding::conditional_cdf(), cdf_grid(design))],
        _ => vec![
            (Binding::conditional_cdf(), cdf_grid(design)),
            (Binding::regression_mean(), mean_grid(design)),
        ],
    };

    let mut report_file = CsvFile::create(
        &args.out_dir.join("report.csv"),
        &[
            "estimator", "n", "x", "y", "truth", "mean", "bias", "variance", "rmse", "failures",
        ],
    )?;
    let mut checks: Vec<Check> = Vec::new();
    for (binding, grid) in &bindings {
        let small = monte_carlo(&truth, design, binding, grid, &config_small)?;
        let large = monte_carlo(&truth, design, binding, grid, &config_large)?;
        write_report(&mut report_file, &small)?;
        write_report(&mut report_file, &large)?;
        checks.push(Check::below(
            format!("{}_rmse_shrinks (n={} vs n={})", binding.name(), args.n, args.n_small),
            large.grid_mean_rmse(),
            small.grid_mean_rmse(),
        ));
        if binding.name() == "regression_mean" {
            if let Some((x_query, bound)) = mean_bias_tolerance(design) {
                if let Some(row) = large.rows.iter().find(|r| r.query.x == x_query) {
                    checks.push(Check::below(
                        format!("regression_mean_abs_bias at x={x_query} (n={})", args.n),
                        row.bias.abs(),
                        bound,
                    ));
                }
            }
        }
        if binding.name() == "conditional_cdf" && design == Design::DoubleTruncated {
            checks.push(Check::below(
                format!("conditional_cdf_grid_rmse (n={})", args.n),
                large.grid_mean_rmse(),
                0.1,
            ));
        }
        if binding.name() == "debiased_probability" && args.n >= 5000 {
            let max_rmse = large.rows.iter().map(|r| r.rmse).fold(0.0, f64::max);
            checks.push(Check::below(
                format!("debiased_probability_max_rmse (n={})", args.n),
                max_rmse,
                0.08,
            ));
        }
    }
    report_file.finish()?;

    let config = json!({
        "design": design.name(),
        "n": args.n,
        "n_small": args.n_small,
        "reps": args.reps,
        "seed": args.seed,
        "kernel": format!("{:?}", args.smoothing.kernel).to_lowercase(),
        "bandwidth": args.smoothing.bandwidth,
        "bandwidth_exponent": args.smoothing.bandwidth_exponent,
    });
    let mut manifest = Manifest::new("validate", design.name(), args.seed, config);
    manifest.records = args.n;
    manifest.stats = json!({
        "checks": checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "value": c.value,
                    "bound": c.bound,
                    "pass": c.pass,
                })
            })
            .collect::<Vec<_>>(),
    });
    manifest.outputs = vec!["report.csv".to_string(), "summary.json".to_string()];
    manifest.write(&args.out_dir.join("summary.json"))?;

    let mut failed = 0usize;
    for check in &checks {
        let tag = if check.pass { " ok " } else { "FAIL" };
        println!(
            "[{tag}] {}: {:.6} {} {:.6}",
            check.name,
            check.value,
            if check.pass { "<" } else { ">=" },
            check.bound
        );
        if !check.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(CliError::Tolerance(format!(
            "{failed} of {} validation checks failed for design {}",
            checks.len(),
            design.name()
        )));
    }
    println!(
        "validate: all {} checks passed for design {}",
        checks.len(),
        design.name()
    );
    Ok(())
}
