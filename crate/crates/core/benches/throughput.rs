//! Solve, verify and differentiate the near-identity fixture on one thread
//! and on the full pool. Without the `parallel` feature only the
//! sequential fallback is measured.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polydisk_core::analysis::{empirical_bilipschitz, wirtinger};
use polydisk_core::fixtures::biharmonic_near_identity;
use polydisk_core::identities::green_moment_integral;
use polydisk_core::solver::{solve, verify_solution};
use polydisk_core::{Complex64, DiskGrid};

fn sink<T>(value: T) {
    black_box(value);
}

fn workloads(c: &mut Criterion, label: &str, run: &dyn Fn(&mut (dyn FnMut() + Send))) {
    let mut group = c.benchmark_group("throughput");
    group.sample_size(10);
    for (n_r, n_t) in [(32, 128), (64, 256)] {
        let grid = DiskGrid::shared(n_r, n_t).unwrap();
        let problem = biharmonic_near_identity(&grid).unwrap();
        let sol = solve(&problem).unwrap();
        let size = format!("{label}/{n_r}x{n_t}");
        group.bench_function(BenchmarkId::new("solve", &size), |b| {
            b.iter(|| run(&mut || sink(solve(&problem).unwrap())))
        });
        group.bench_function(BenchmarkId::new("verify", &size), |b| {
            b.iter(|| run(&mut || sink(verify_solution(&sol, 1e-6).unwrap())))
        });
        group.bench_function(BenchmarkId::new("wirtinger", &size), |b| {
            b.iter(|| run(&mut || sink(wirtinger(&sol.f).unwrap())))
        });
        group.bench_function(BenchmarkId::new("pairs", &size), |b| {
            b.iter(|| run(&mut || sink(empirical_bilipschitz(&sol.f, 2000, 1).unwrap())))
        });
    }
    let disk = DiskGrid::new(32, 256).unwrap();
    group.bench_function(BenchmarkId::new("green_moment", label), |b| {
        b.iter(|| run(&mut || sink(green_moment_integral(Complex64::new(0.3, 0.4), true, &disk).unwrap())))
    });
    group.finish();
}

#[cfg(feature = "parallel")]
fn compare(c: &mut Criterion) {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    workloads(c, "sequential", &|f| single.install(|| f()));
    workloads(c, "parallel", &|f| f());
}

#[cfg(not(feature = "parallel"))]
fn compare(c: &mut Criterion) {
    workloads(c, "sequential", &|f| f());
}

criterion_group!(benches, compare);
criterion_main!(benches);
