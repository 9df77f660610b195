use std::hint::black_box;

use boolcomp::complimit::{bs_lift_packing, charval, default_tol, Mat2};
use boolcomp::measures::MeasureId;
use boolcomp_bench::fixtures;
use criterion::{criterion_group, criterion_main, Criterion};

fn characteristic_values(c: &mut Criterion) {
    let mut g = c.benchmark_group("charval");
    g.sample_size(10);
    let tol = default_tol();
    for (name, f) in fixtures().into_iter().take(3) {
        for m in [MeasureId::C, MeasureId::CStar] {
            g.bench_function(format!("{name}/{m}"), |b| {
                b.iter(|| black_box(charval(&f, m, &tol).unwrap()))
            });
        }
    }
    g.finish();
}

fn lift(c: &mut Criterion) {
    let f = boolcomp::bublitz();
    c.bench_function("bs_lift_packing_bublitz", |b| {
        b.iter(|| black_box(bs_lift_packing(&f, &f, false).unwrap()))
    });
}

fn spectral(c: &mut Criterion) {
    let m = Mat2::from_ints(8, 1, 8, 4).unwrap();
    c.bench_function("rho_exact", |b| b.iter(|| black_box(m.rho())));
    c.bench_function("rho_f64", |b| b.iter(|| black_box(m.rho_f64())));
}

criterion_group!(benches, characteristic_values, lift, spectral);
criterion_main!(benches);
