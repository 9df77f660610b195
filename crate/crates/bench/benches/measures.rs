use std::hint::black_box;

use boolcomp::assemblage::minblocks;
use boolcomp::hypergraph::{k_stars, nu, tau, tau_star};
use boolcomp::measures::{global, local, MeasureId};
use boolcomp::tree::iterate;
use boolcomp::Assignment;
use boolcomp_bench::fixtures;
use criterion::{criterion_group, criterion_main, Criterion};

fn blocks(c: &mut Criterion) {
    let mut g = c.benchmark_group("minblocks");
    for (name, f) in fixtures().into_iter().take(4) {
        let x = Assignment::zeros(f.arity());
        g.bench_function(name, |b| b.iter(|| black_box(minblocks(&f, &x).unwrap())));
    }
    g.finish();
}

fn local_measures(c: &mut Criterion) {
    let f = boolcomp::bublitz();
    let x = Assignment::zeros(6);
    let mut g = c.benchmark_group("local_bublitz");
    for m in [
        MeasureId::Bs,
        MeasureId::BsStar,
        MeasureId::C,
        MeasureId::CStar,
    ] {
        g.bench_function(m.to_string(), |b| {
            b.iter(|| black_box(local(&f, &x, m).unwrap()))
        });
    }
    g.finish();
}

fn global_measures(c: &mut Criterion) {
    let mut g = c.benchmark_group("global_c");
    g.sample_size(10);
    for (name, f) in fixtures().into_iter().take(3) {
        g.bench_function(name, |b| {
            b.iter(|| black_box(global(&f, MeasureId::C).unwrap()))
        });
    }
    g.finish();
}

fn hypergraph(c: &mut Criterion) {
    let h = k_stars(6).unwrap();
    let mut g = c.benchmark_group("stars_k6");
    g.bench_function("nu", |b| b.iter(|| black_box(nu(&h).unwrap())));
    g.bench_function("tau", |b| b.iter(|| black_box(tau(&h).unwrap())));
    g.bench_function("tau_star", |b| b.iter(|| black_box(tau_star(&h).unwrap())));
    g.finish();
}

fn composition(c: &mut Criterion) {
    let f = boolcomp::named_fn("NAND", Some(2)).unwrap();
    c.bench_function("iterate_nand2_k4", |b| {
        b.iter(|| black_box(iterate(&f, 4).unwrap()))
    });
}

criterion_group!(
    benches,
    blocks,
    local_measures,
    global_measures,
    hypergraph,
    composition
);
criterion_main!(benches);
