//! Single worker versus the default pool on the main hot paths.

use std::hint::black_box;

use besselab::besselnorm::{unif_norm_sweep, RieszSource, SpaceIndex, DEFAULT_RADII};
use besselab::exec;
use besselab::gridfield::{dft, Domain, Field, GridSpec};
use besselab::multiplier::{growth_integral, MultiplierProblem};
use besselab::riesz::RieszParam;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

fn modes() -> [(&'static str, usize); 2] {
    [("serial", 1), ("parallel", exec::current_threads())]
}

fn bench_dft(c: &mut Criterion) {
    let grid = GridSpec::new(2, 8.0, 256).unwrap();
    let values = (0..grid.len())
        .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
        .collect();
    let u = Field::new(grid, Domain::Physical, values).unwrap();
    let mut g = c.benchmark_group("dft_2d_256");
    for (name, threads) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exec::with_threads(threads, || dft(black_box(&u)).unwrap()))
        });
    }
    g.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let grid = GridSpec::new(2, 8.0, 64).unwrap();
    let source = RieszSource::new(RieszParam::new(1.2, 2).unwrap());
    let idx = SpaceIndex::new(-0.5, 2.0).unwrap();
    let mut g = c.benchmark_group("unif_sweep_2d_64");
    g.sample_size(10);
    for (name, threads) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                exec::with_threads(threads, || {
                    unif_norm_sweep(&source, &idx, &grid, &DEFAULT_RADII, 8).unwrap()
                })
            })
        });
    }
    g.finish();
}

fn bench_growth(c: &mut Criterion) {
    let p = MultiplierProblem::new(3, 1.0, 1.0).unwrap();
    let mut g = c.benchmark_group("growth_integral_3d");
    for (name, threads) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exec::with_threads(threads, || growth_integral(&p, black_box(2.1), 64.0, 512).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_dft, bench_sweep, bench_growth);
criterion_main!(benches);
