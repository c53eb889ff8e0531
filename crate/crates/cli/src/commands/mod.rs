pub mod estimate;
pub mod inspect;
pub mod simulate;
pub mod validate;

use partreg_core::{Bandwidth, Kernel};

use crate::fail::{CliError, CliResult};
use crate::args::SmoothingArgs;

pub fn resolve_smoothing(args: &SmoothingArgs, xs: &[f64]) -> CliResult<(Kernel, Bandwidth)> {
    let kernel = Kernel::new(args.kernel.into());
    let bandwidth = match args.bandwidth {
        Some(h) => Bandwidth::fixed(h)?,
        None => partreg_core::kernel::default_bandwidth(xs, args.bandwidth_exponent)?,
    };
    Ok((kernel, bandwidth))
}

/// Parse a grid spec `lo:hi:count`.
pub fn parse_grid_spec(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!("grid spec '{spec}' is not lo:hi:count")));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::Config(format!("bad grid lower bound '{}'", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::Config(format!("bad grid upper bound '{}'", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| CliError::Config(format!("bad grid count '{}'", parts[2])))?;
    if lo >= hi || lo.is_nan() || hi.is_nan() {
        return Err(CliError::Config(format!("grid spec '{spec}' is empty")));
    }
    // A zero count is allowed: estimation is skipped and only the manifest
    // is written.
    Ok(partreg_core::Interval::new(lo, hi).grid(count))
}

/// Parse a comma-separated list of levels in (0, 1).
pub fn parse_levels(spec: &str, open_unit: bool) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let u: f64 = part
            .parse()
            .map_err(|_| CliError::Config(format!("bad level '{part}'")))?;
        if open_unit && !(0.0 < u && u < 1.0) {
            return Err(CliError::Config(format!("level {u} outside (0, 1)")));
        }
        out.push(u);
    }
    if out.is_empty() {
        return Err(CliError::Config(format!("no levels in '{spec}'")));
    }
    Ok(out)
}
