//! The simulate subcommand: draw a dataset from the design's canonical
//! scenario and write it in the design's CSV schema.

use partreg_sim::{scenarios, simulate_design, Design, DesignSample};

use crate::fail::CliResult;
use crate::ingest::schema;
use crate::output::{fmt_bool, fmt_f64, CsvFile};
use crate::args::SimulateArgs;

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let design: Design = args.design.into();
    let truth = scenarios::scenario(design);
    let sim = simulate_design(&truth, design, args.n, args.seed)?;
    let mut file = CsvFile::create(&args.out, schema(design))?;
    match &sim.sample {
        DesignSample::Binary(rows) => {
            for r in rows {
                match design {
                    Design::CaseControl => {
                        file.row(&[fmt_f64(r.x), fmt_bool(r.y), fmt_bool(r.s)])?
                    }
                    _ => file.row(&[fmt_f64(r.x), fmt_bool(r.y)])?,
                }
            }
        }
        DesignSample::LeftTruncated(s) => {
            for r in s.records() {
                file.row(&[fmt_f64(r.x), fmt_f64(r.t), fmt_f64(r.y)])?;
            }
        }
        DesignSample::Ltrc(s) => {
            for r in s.records() {
                file.row(&[fmt_f64(r.x), fmt_f64(r.t), fmt_f64(r.z), fmt_bool(r.delta)])?;
            }
        }
        DesignSample::RightTruncated(s) => {
            for r in s.records() {
                file.row(&[fmt_f64(r.x), fmt_f64(r.y), fmt_f64(r.c)])?;
            }
        }
        DesignSample::DoubleTruncated(s) => {
            for r in s.records() {
                file.row(&[fmt_f64(r.x), fmt_f64(r.t), fmt_f64(r.y), fmt_f64(r.c)])?;
            }
        }
        DesignSample::CurrentStatus(s) => {
            for r in s.records() {
                file.row(&[fmt_f64(r.x), fmt_f64(r.c), fmt_bool(r.delta)])?;
            }
        }
    }
    let path = file.finish()?;
    println!(
        "simulate: {} {} records to {} (acceptance rate {:.4}, {} raw draws)",
        args.n,
        design.name(),
        path.display(),
        sim.acceptance_rate,
        sim.raw_draws
    );
    Ok(())
}
