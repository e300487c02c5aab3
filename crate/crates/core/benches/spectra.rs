use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use bec_squeeze::spectra::{linear_grid, squeezing_spectrum_with, SpectraOptions};
use bec_squeeze::sweeps::{sweep_kappa, SweepOptions};
use bec_squeeze::{EffectiveParams, Execution};

fn modes() -> Vec<(&'static str, Execution)> {
    let mut m = vec![("sequential", Execution::Sequential)];
    if Execution::parallel_available() {
        m.push(("parallel", Execution::Parallel));
    }
    m
}

fn spectrum_grid(c: &mut Criterion) {
    let e = EffectiveParams::symmetric(1e5, 1.0, 10_000).unwrap();
    let opts = SpectraOptions::default();
    let mut group = c.benchmark_group("spectrum_grid");
    for points in [2_001usize, 100_001] {
        let grid = linear_grid(-10.0, 10.0, points).unwrap();
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, points), &grid, |b, g| {
                b.iter(|| squeezing_spectrum_with(&e, 0.0, black_box(g), &opts, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn kappa_sweep(c: &mut Criterion) {
    let e = EffectiveParams::symmetric(1e4, 1.0, 10_000).unwrap();
    let kappas = [0.25, 0.5, 1.0, 2.0, 4.0, 10.0];
    let opts = SweepOptions::default();
    let mut group = c.benchmark_group("kappa_sweep");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| sweep_kappa(&e, black_box(&kappas), 0.0, &opts, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, spectrum_grid, kappa_sweep);
criterion_main!(benches);
