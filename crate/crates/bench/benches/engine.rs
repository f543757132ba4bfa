use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sublin_bench::{coin_model, log_tail_model, normal_pair};
use sublin_core::nlexp::{upper_expect, Distribution, TestFunction};
use sublin_core::scenario::{estimate_capacity_upper, EstimateBudget, PathEvent};
use sublin_core::truncation::{default_y_grid, psi_profile, SmoothCutoff};

fn quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("upper_expect");
    let normals = normal_pair();
    group.bench_function("normal_pair_square", |b| {
        let f = TestFunction::power(2);
        b.iter(|| upper_expect(black_box(&normals), &f).unwrap())
    });
    let log_tail = sublin_core::AmbiguitySet::singleton(Distribution::standard_log_tail());
    for n in [10u64, 10_000] {
        let y = SmoothCutoff::new(n).unwrap().test_function();
        group.bench_with_input(BenchmarkId::new("log_tail_truncated_mean", n), &y, |b, y| {
            b.iter(|| upper_expect(black_box(&log_tail), y).unwrap())
        });
    }
    group.finish();
}

fn tail_functional(c: &mut Criterion) {
    let model = log_tail_model();
    let grid = default_y_grid();
    c.bench_function("psi_profile_log_tail_1e4", |b| {
        b.iter(|| psi_profile(black_box(&model), 10_000, &grid).unwrap())
    });
}

fn capacity_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("capacity_search");
    group.sample_size(10);
    let model = coin_model();
    let budget = EstimateBudget::new(10_000, 1, 4, 1);
    for n in [10u64, 100, 1000] {
        group.bench_with_input(BenchmarkId::new("coins_upper_exceed", n), &n, |b, &n| {
            b.iter(|| estimate_capacity_upper(&model, PathEvent::upper_exceed(0.1), n, &budget).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, quadrature, tail_functional, capacity_search);
criterion_main!(benches);
