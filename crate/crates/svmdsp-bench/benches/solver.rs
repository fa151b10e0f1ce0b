//! Throughput of the dual solver and the Gram builders.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use svmdsp::psm::{sinc_gram, spectral_gram, SpectralGrid};
use svmdsp::qp::{default_tolerance, solve_real};
use svmdsp_bench::random_problem;

fn bench_solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_real");
    for &n in &[32usize, 128, 512] {
        // a dead zone covering most targets exercises the sparse path
        for (label, eps) in [("dense", 0.0), ("sparse", 1.0)] {
            let dp = random_problem(7, n, eps);
            let tol = default_tolerance(&dp.targets);
            group.bench_with_input(
                BenchmarkId::new(label, n),
                &dp,
                |b, dp| b.iter(|| solve_real(black_box(dp), tol).unwrap()),
            );
        }
    }
    group.finish();
}

fn bench_grams(c: &mut Criterion) {
    let mut group = c.benchmark_group("gram_builders");
    for &n in &[64usize, 256] {
        let times: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let grid = SpectralGrid::new(2.0 * std::f64::consts::PI / n as f64, n / 2).unwrap();
        group.bench_with_input(BenchmarkId::new("spectral", n), &times, |b, t| {
            b.iter(|| spectral_gram(black_box(t), &grid))
        });
        group.bench_with_input(BenchmarkId::new("sinc", n), &times, |b, t| {
            b.iter(|| sinc_gram(black_box(t), std::f64::consts::PI))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_solver, bench_grams);
criterion_main!(benches);
