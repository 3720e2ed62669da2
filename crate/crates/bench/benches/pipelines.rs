use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use orbint_bench::{chorded_cycle, regular_request, split, SPLIT_CASES};
use orbint_core::closed_forms::hessenberg_sum;
use orbint_core::moment_graph::{min_formal_poincare_bnb, min_formal_poincare_exhaustive, BNB_BUDGET};
use orbint_core::polytopes::default_xi;
use orbint_core::{ak_count, solve_weighted_integral, tail_count, HessenbergCase, Oracle, RegularElementSpec};

fn counting(c: &mut Criterion) {
    let mut g = c.benchmark_group("counting_engine");
    for (n1, n2) in SPLIT_CASES {
        let (req, table) = regular_request(split(n1, n2), &[12, 13]);
        g.bench_with_input(BenchmarkId::new("ak_count", format!("{n1},{n2}")), &req, |b, r| {
            b.iter(|| ak_count(r, &table).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("tail_count", format!("{n1},{n2}")), &req, |b, r| {
            b.iter(|| tail_count(r, &table).unwrap())
        });
    }
    g.sample_size(10);
    g.bench_function("solve_weighted_integral 1,2", |b| b.iter(|| solve_weighted_integral(&split(1, 2)).unwrap()));
    g.finish();
}

fn closed_forms(c: &mut Criterion) {
    c.bench_function("hessenberg_sum aniso 3,2", |b| b.iter(|| hessenberg_sum(HessenbergCase::for_gl3(3, 2), 0)));
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    let mixed = RegularElementSpec::Gl3Mixed { m: 1, n: 1 };
    g.bench_function("mixed 1,1 F q=2", |b| {
        b.iter(|| Oracle::new(&mixed, 2).unwrap().count_fundamental_domain().unwrap().count)
    });
    let s = split(1, 2);
    let xi = default_xi(&s.m0());
    g.bench_function("split 1,2 xi-stable q=2", |b| {
        b.iter(|| Oracle::new(&s, 2).unwrap().count_xi_stable(&xi).unwrap().count)
    });
    g.finish();
}

fn moment_graphs(c: &mut Criterion) {
    let mut g = c.benchmark_group("moment_graph");
    g.sample_size(10);
    for n in [6usize, 8] {
        let graph = chorded_cycle(n);
        g.bench_with_input(BenchmarkId::new("exhaustive", n), &graph, |b, gr| {
            b.iter(|| min_formal_poincare_exhaustive(gr, 10).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("bnb", n), &graph, |b, gr| {
            b.iter(|| min_formal_poincare_bnb(gr, BNB_BUDGET).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, counting, closed_forms, oracle, moment_graphs);
criterion_main!(benches);
