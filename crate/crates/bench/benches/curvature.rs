use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use curvflow::curvature::{self, CurvatureContext};
use curvflow::wl::{static_refine, FeatureKind};
use curvflow::{generate, PairSelection};
use curvflow_bench::{dense_digraph, solve, sparse_digraph, transport_instance, SIZES};

fn transport(c: &mut Criterion) {
    let mut group = c.benchmark_group("wasserstein1");
    for n in SIZES {
        let inst = transport_instance(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| black_box(solve(inst)).cost)
        });
    }
    group.finish();
}

fn curc(c: &mut Criterion) {
    let mut group = c.benchmark_group("curc_all_pairs");
    group.sample_size(20);
    for n in SIZES {
        let sparse = sparse_digraph(n);
        let dense = dense_digraph(n);
        group.bench_with_input(BenchmarkId::new("sparse", n), &sparse, |b, g| {
            b.iter(|| curvature::curc(black_box(g), &PairSelection::All).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("dense", n), &dense, |b, g| {
            b.iter(|| curvature::curc(black_box(g), &PairSelection::All).unwrap())
        });
    }
    group.finish();
}

fn context(c: &mut Criterion) {
    let g = dense_digraph(32);
    c.bench_function("kernel_and_limit_distance_32", |b| {
        b.iter(|| CurvatureContext::new(black_box(&g)).unwrap())
    });
}

fn bounds(c: &mut Criterion) {
    let mut group = c.benchmark_group("bounds_16");
    group.sample_size(20);
    let g = sparse_digraph(16);
    let sym = generate::random_symmetric_support(&mut curvflow_bench::rng(7), 16, 0.3);
    group.bench_function("lb1", |b| b.iter(|| curvature::lb1(&g, &PairSelection::All).unwrap()));
    group.bench_function("lb2", |b| b.iter(|| curvature::lb2(&sym, &PairSelection::Edges).unwrap()));
    group.bench_function("idle", |b| b.iter(|| curvature::idle_curc(&g, &PairSelection::Edges).unwrap()));
    group.finish();
}

fn refinement(c: &mut Criterion) {
    let g = sparse_digraph(32);
    let feats = FeatureKind::Concat(vec![FeatureKind::Rrwp(4), FeatureKind::Spd(8)])
        .build(&g)
        .unwrap();
    c.bench_function("static_refine_rrwp4_spd8_32", |b| {
        b.iter(|| static_refine(black_box(&feats), None).unwrap())
    });
}

criterion_group!(benches, transport, curc, context, bounds, refinement);
criterion_main!(benches);
