//! Sequential vs parallel execution of the data-parallel workloads:
//! a figure-style quadrature sweep, a unitarity batch, and an oracle
//! refinement pair.

use std::f64::consts::SQRT_2;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use entangle_core::analytic::unitarity_defect;
use entangle_core::harness::sweep::{sweep_with, SweepAxis, SweepSpec};
use entangle_core::oracle::{simulate_detailed, InputChannel, SimGrid};
use entangle_core::par::Execution;
use entangle_core::spectra::SpectralFunction;
use entangle_core::PhysicalParams;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn quadrature_sweep(c: &mut Criterion) {
    let params = PhysicalParams::new(0.25, 0.25 * SQRT_2, 1.0);
    let spec = SweepSpec::new(
        SweepAxis::KappaInOverKappa,
        0.01,
        2.0,
        64,
        params,
        SpectralFunction::gaussian(1.0).unwrap(),
    );
    let mut group = c.benchmark_group("gaussian_sweep_64");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| sweep_with(black_box(&spec), exec).unwrap())
        });
    }
    group.finish();
}

fn unitarity_batch(c: &mut Criterion) {
    let params = PhysicalParams::new(0.7, 1.1, 0.9).with_delta_e(0.2);
    let dks: Vec<f64> = (0..100_000).map(|j| -50.0 + 1e-3 * j as f64).collect();
    let mut group = c.benchmark_group("unitarity_1e5");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| unitarity_defect(black_box(&params), &dks, exec))
        });
    }
    group.finish();
}

fn oracle_pair(c: &mut Criterion) {
    let kappa = SQRT_2 / 3.0;
    let params = PhysicalParams::new(1.0, 1.0, kappa);
    let bandwidth = 10.0 * kappa;
    let grid = SimGrid { n_modes: 801, bandwidth, t_final: 30.0 / kappa, dt: 0.1 / bandwidth, tau: 0.0 };
    let f = SpectralFunction::cavity_photon();
    let mut group = c.benchmark_group("oracle_refinement_pair");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| simulate_detailed(&params, &f, &grid, InputChannel::L, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, quadrature_sweep, unitarity_batch, oracle_pair);
criterion_main!(benches);
