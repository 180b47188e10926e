use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hotelling::{
    condition_holds, grid_enumerate_equilibria, is_equilibrium_oracle, profit_integral_oracle,
    run_dynamics, sample_random_grid, Schedule, DEFAULT_ENUMERATION_BUDGET,
};

fn verdicts(c: &mut Criterion) {
    let mut group = c.benchmark_group("verdict");
    for n in [3usize, 8, 32] {
        let profile = sample_random_grid(n, 360, n as u64).unwrap();
        group.bench_with_input(BenchmarkId::new("gap_condition", n), &profile, |b, p| {
            b.iter(|| condition_holds(black_box(p)))
        });
        group.bench_with_input(BenchmarkId::new("oracle", n), &profile, |b, p| {
            b.iter(|| is_equilibrium_oracle(black_box(p)).is_equilibrium)
        });
    }
    group.finish();
}

fn integral(c: &mut Criterion) {
    let profile = sample_random_grid(10, 360, 1).unwrap();
    c.bench_function("integral_oracle/n10_m1e5", |b| {
        b.iter(|| profit_integral_oracle(black_box(&profile), 100_000).unwrap())
    });
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(10);
    for (n, m) in [(4usize, 12u64), (5, 12)] {
        group.bench_function(format!("n{n}_m{m}"), |b| {
            b.iter(|| {
                grid_enumerate_equilibria(n, m, DEFAULT_ENUMERATION_BUDGET)
                    .unwrap()
                    .len()
            })
        });
    }
    group.finish();
}

fn dynamics(c: &mut Criterion) {
    let start = sample_random_grid(5, 360, 9).unwrap();
    c.bench_function("dynamics/round_robin_n5", |b| {
        b.iter(|| {
            run_dynamics(black_box(&start), Schedule::RoundRobin, 500)
                .steps
                .len()
        })
    });
}

criterion_group!(benches, verdicts, integral, enumeration, dynamics);
criterion_main!(benches);
