//! The inspect subcommand: dataset summary and design checks.

use partreg_sim::{Design, DesignSample};

use crate::fail::CliResult;
use crate::ingest::{ingest, schema};
use crate::args::InspectArgs;

fn column_stats(name: &str, values: &[f64]) {
    let n = values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / n;
    println!("  {name:>6}: min {min:.6}  mean {mean:.6}  max {max:.6}");
}

pub fn run(args: &InspectArgs) -> CliResult<()> {
    let design: Design = args.design.into();
    let dataset = ingest(&args.input, design)?;
    println!("dataset: {}", args.input.display());
    println!(
        "design:  {} (columns {})",
        dataset.design.name(),
        schema(dataset.design).join(",")
    );
    println!(
        "rows:    {} read, {} usable, {} rejected",
        dataset.rows_read,
        dataset.len(),
        dataset.rejects.len()
    );
    for (line, reason) in dataset.rejects.iter().take(10) {
        println!("  reject line {line}: {reason}");
    }
    if dataset.rejects.len() > 10 {
        println!("  ... {} more", dataset.rejects.len() - 10);
    }

    match &dataset.sample {
        DesignSample::Binary(rows) => {
            let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
            column_stats("x", &xs);
            let sampled = rows.iter().filter(|r| r.s).count();
            let cases = rows.iter().filter(|r| r.s && r.y).count();
            println!("  sampled rows: {sampled} ({cases} cases)");
        }
        DesignSample::LeftTruncated(s) => {
            column_stats("x", &s.records().iter().map(|r| r.x).collect::<Vec<_>>());
            column_stats("t", &s.records().iter().map(|r| r.t).collect::<Vec<_>>());
            column_stats("y", &s.records().iter().map(|r| r.y).collect::<Vec<_>>());
            println!("  sampling condition t <= y holds on every usable row");
        }
        DesignSample::Ltrc(s) => {
            column_stats("x", &s.records().iter().map(|r| r.x).collect::<Vec<_>>());
            column_stats("t", &s.records().iter().map(|r| r.t).collect::<Vec<_>>());
            column_stats("z", &s.records().iter().map(|r| r.z).collect::<Vec<_>>());
            let censored = s.records().iter().filter(|r| !r.delta).count();
            println!(
                "  censored fraction: {:.4} ({censored} of {})",
                censored as f64 / s.len() as f64,
                s.len()
            );
        }
        DesignSample::RightTruncated(s) => {
            column_stats("x", &s.records().iter().map(|r| r.x).collect::<Vec<_>>());
            column_stats("y", &s.records().iter().map(|r| r.y).collect::<Vec<_>>());
            column_stats("c", &s.records().iter().map(|r| r.c).collect::<Vec<_>>());
            println!("  sampling condition y <= c holds on every usable row");
        }
        DesignSample::DoubleTruncated(s) => {
            column_stats("x", &s.records().iter().map(|r| r.x).collect::<Vec<_>>());
            column_stats("t", &s.records().iter().map(|r| r.t).collect::<Vec<_>>());
            column_stats("y", &s.records().iter().map(|r| r.y).collect::<Vec<_>>());
            column_stats("c", &s.records().iter().map(|r| r.c).collect::<Vec<_>>());
            println!("  sampling condition t <= y <= c holds on every usable row");
        }
        DesignSample::CurrentStatus(s) => {
            column_stats("x", &s.records().iter().map(|r| r.x).collect::<Vec<_>>());
            column_stats("c", &s.records().iter().map(|r| r.c).collect::<Vec<_>>());
            let hit = s.records().iter().filter(|r| r.delta).count();
            println!(
                "  already-observed fraction: {:.4} ({hit} of {})",
                hit as f64 / s.len() as f64,
                s.len()
            );
        }
    }

    // Window at the default bandwidth rule, when the sample supports one.
    let xs = dataset.sample.xs();
    match partreg_core::kernel::default_bandwidth(&xs, 0.25)
        .and_then(|h| partreg_core::kernel::evaluation_window(&xs, &h).map(|w| (h, w)))
    {
        Ok((h, w)) => println!(
            "window:  [{:.6}, {:.6}] at default bandwidth h = {:.6}",
            w.lo,
            w.hi,
            h.value()
        ),
        Err(e) => println!("window:  unavailable ({e})"),
    }
    Ok(())
}
