use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wealthstat::{bitcoin, convolve, inequality, mc, solver, AtomicKind, Cutoff, DEFAULT_TAIL_TOL};

fn partitions(c: &mut Criterion) {
    let mut g = c.benchmark_group("partition_numbers");
    for v in [1_000usize, 10_000] {
        g.bench_with_input(BenchmarkId::from_parameter(v), &v, |b, &v| b.iter(|| bitcoin::partition_numbers(black_box(v))));
    }
    g.finish();
}

fn gini(c: &mut Criterion) {
    let mut g = c.benchmark_group("gini_poisson");
    for m in [1.0, 100.0, 10_000.0] {
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| b.iter(|| inequality::gini_poisson(black_box(m))));
    }
    g.finish();
}

fn solvers(c: &mut Criterion) {
    c.bench_function("solve_betabar_bitcoin", |b| {
        b.iter(|| bitcoin::solve_betabar_bitcoin(black_box(1e6), bitcoin::HARD_CAP_SATOSHI))
    });
    c.bench_function("solve_beta_truncated", |b| {
        b.iter(|| solver::solve_beta_distinguishable(black_box(3.7), Cutoff::Finite(10)))
    });
}

fn banks(c: &mut Criterion) {
    let mut g = c.benchmark_group("bank_convolution");
    for n in [16u64, 4096] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| convolve::bank_convolution(black_box(4.0), n, DEFAULT_TAIL_TOL))
        });
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_occupancy");
    g.sample_size(10);
    for kind in [AtomicKind::Poisson, AtomicKind::Bosonic, AtomicKind::Fermionic] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{kind:?}")), &kind, |b, &kind| {
            b.iter(|| mc::sample_occupancy(kind, 300, 1000, 100, 7, 0))
        });
    }
    g.finish();
}

criterion_group!(benches, partitions, gini, solvers, banks, sampling);
criterion_main!(benches);
