use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use manymatch_bench::{instance, line_points};
use manymatch_core::gen::random_planar_graph;
use manymatch_core::oracle::{edge_cover_opt, DENSE_BOUND};
use manymatch_core::penalty1d;
use manymatch_core::separator::planar_separator;
use manymatch_core::{solve_approx, solve_exact, SolveOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_penalty1d(c: &mut Criterion) {
    let mut g = c.benchmark_group("penalty1d");
    for n in [256usize, 4096, 65536] {
        let pts = line_points(n as u64, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &pts, |b, pts| {
            b.iter(|| penalty1d::solve(black_box(pts)).unwrap())
        });
    }
    g.finish();
}

fn bench_exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_exact");
    g.sample_size(10);
    for (n, delta) in [(40usize, 16i64), (100, 1024), (200, 1024)] {
        let inst = instance(1, n, delta);
        g.bench_with_input(BenchmarkId::new(format!("delta{delta}"), n), &inst, |b, inst| {
            b.iter(|| solve_exact(black_box(inst), &SolveOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn bench_approx(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_approx");
    g.sample_size(10);
    let inst = instance(2, 200, 1024);
    for eps in [1.0, 1e-3] {
        g.bench_with_input(BenchmarkId::new("n200", eps), &eps, |b, &eps| {
            b.iter(|| solve_approx(black_box(&inst), eps, &SolveOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    let inst = instance(3, 40, 16);
    g.bench_function("edge_cover_opt/40", |b| b.iter(|| edge_cover_opt(black_box(&inst), DENSE_BOUND).unwrap()));
    g.finish();
}

fn bench_separator(c: &mut Criterion) {
    let mut g = c.benchmark_group("planar_separator");
    for n in [100usize, 500, 2000] {
        let graph = random_planar_graph(&mut ChaCha8Rng::seed_from_u64(n as u64), n, 0.8).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &graph, |b, graph| {
            b.iter(|| planar_separator(black_box(graph)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_penalty1d, bench_exact, bench_approx, bench_oracle, bench_separator);
criterion_main!(benches);
