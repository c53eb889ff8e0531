//! Parallel vs sequential throughput of the data-parallel inner loops:
//! slice evaluation across a covariate grid and Monte Carlo replications.
//!
//! Run with `cargo bench -p partreg-sim`.

use criterion::{criterion_group, criterion_main, Criterion};
use partreg_core::{exec, Kernel, KernelKind};
use partreg_sim::{
    monte_carlo, scenarios, simulate_design, BandwidthSpec, Binding, Design, DesignSample,
    McConfig, Query, SmoothingSpec,
};

fn conditional_cdf_grid(c: &mut Criterion) {
    let truth = scenarios::scenario(Design::LeftTruncated);
    let sim = simulate_design(&truth, Design::LeftTruncated, 2000, 9).unwrap();
    let sample = match sim.sample {
        DesignSample::LeftTruncated(s) => s,
        _ => unreachable!(),
    };
    let kernel = Kernel::new(KernelKind::Epanechnikov);
    let bandwidth = partreg_core::kernel::default_bandwidth(sample.xs(), 0.25).unwrap();
    let grid = sample.window(&bandwidth).unwrap().grid(101);

    let mut group = c.benchmark_group("conditional_cdf_grid_n2000");
    group.bench_function("parallel", |b| {
        b.iter(|| {
            exec::map(&grid, |&x| {
                sample.conditional_cdf(&kernel, &bandwidth, x).unwrap().jump_mass()
            })
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            exec::map_seq(&grid, |&x| {
                sample.conditional_cdf(&kernel, &bandwidth, x).unwrap().jump_mass()
            })
        })
    });
    group.finish();
}

fn monte_carlo_replications(c: &mut Criterion) {
    let truth = scenarios::scenario(Design::LeftTruncated);
    let grid = [Query::at_x(0.3), Query::at_x(0.5), Query::at_x(0.7)];
    let base = McConfig {
        n: 500,
        reps: 32,
        seed: 7,
        smoothing: SmoothingSpec {
            kernel: Kernel::new(KernelKind::Epanechnikov),
            bandwidth: BandwidthSpec::ScaledPower { exponent: 0.25 },
        },
        parallel: true,
    };
    let binding = Binding::regression_mean();

    let mut group = c.benchmark_group("monte_carlo_32reps_n500");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| monte_carlo(&truth, Design::LeftTruncated, &binding, &grid, &base).unwrap())
    });
    let sequential = McConfig { parallel: false, ..base };
    group.bench_function("sequential", |b| {
        b.iter(|| {
            monte_carlo(&truth, Design::LeftTruncated, &binding, &grid, &sequential).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, conditional_cdf_grid, monte_carlo_replications);
criterion_main!(benches);
