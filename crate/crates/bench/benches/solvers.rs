use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sgames_bench::{bench_chain, bench_concurrent, bench_mdp, bench_turn_based};
use sgames_core::chain::{
    exit_distribution, mean_discounted_time, multidiscounted_value_mc, parity_value_mc,
    ExitMethod, ExitQuery,
};
use sgames_core::mdp::{multidiscounted_value_mdp, parity_value_mdp};
use sgames_core::robust::{certify_value_bound, perturb, Objective};
use sgames_core::solve::{multidiscounted_value_concurrent, parity_value_turnbased, TbMethod};

fn chain_benches(c: &mut Criterion) {
    let mut group = c.benchmark_group("chain");
    for n in [10usize, 50, 150] {
        let (m, spec, p) = bench_chain(n);
        group.bench_with_input(BenchmarkId::new("multidiscounted", n), &n, |b, _| {
            b.iter(|| multidiscounted_value_mc(black_box(&m), black_box(&spec)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parity", n), &n, |b, _| {
            b.iter(|| parity_value_mc(black_box(&m), black_box(&p)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("mean_discounted_time", n), &n, |b, _| {
            b.iter(|| mean_discounted_time(black_box(&m), black_box(&spec)).unwrap())
        });
    }
    group.finish();
}

fn exit_benches(c: &mut Criterion) {
    let mut group = c.benchmark_group("exit_distribution");
    let (m, _, _) = bench_chain(6);
    let q = ExitQuery::new(vec![1, 2, 3, 4, 5], 1);
    group.bench_function("linear", |b| {
        b.iter(|| exit_distribution(black_box(&m), black_box(&q), ExitMethod::Linear).unwrap())
    });
    group.bench_function("freidlin_wentzell", |b| {
        b.iter(|| {
            exit_distribution(black_box(&m), black_box(&q), ExitMethod::FreidlinWentzell).unwrap()
        })
    });
    group.finish();
}

fn mdp_benches(c: &mut Criterion) {
    let mut group = c.benchmark_group("mdp");
    for n in [10usize, 30] {
        let (g, spec, p) = bench_mdp(n);
        group.bench_with_input(BenchmarkId::new("multidiscounted", n), &n, |b, _| {
            b.iter(|| multidiscounted_value_mdp(black_box(&g), black_box(&spec), 1e-9).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parity", n), &n, |b, _| {
            b.iter(|| parity_value_mdp(black_box(&g), black_box(&p)).unwrap())
        });
    }
    group.finish();
}

fn game_benches(c: &mut Criterion) {
    let mut group = c.benchmark_group("games");
    let (g, spec) = bench_concurrent(8);
    group.bench_function("shapley_concurrent_8", |b| {
        b.iter(|| multidiscounted_value_concurrent(black_box(&g), black_box(&spec), 1e-7).unwrap())
    });
    let (tb, p) = bench_turn_based(6);
    group.bench_function("tb_parity_improvement_6", |b| {
        b.iter(|| parity_value_turnbased(black_box(&tb), black_box(&p), TbMethod::Improvement).unwrap())
    });
    group.finish();
}

fn robustness_benches(c: &mut Criterion) {
    let mut group = c.benchmark_group("robustness");
    let (m, _, p) = bench_chain(20);
    let g = m.to_game();
    let g2 = perturb(&g, 0.01, 0x3333).unwrap();
    group.bench_function("certify_value_bound_chain_20", |b| {
        b.iter(|| certify_value_bound(black_box(&g), black_box(&g2), Objective::Parity(&p)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    chain_benches,
    exit_benches,
    mdp_benches,
    game_benches,
    robustness_benches
);
criterion_main!(benches);
