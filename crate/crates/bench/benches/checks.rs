use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use norden::catalog::{self, RANDOM_DEGREE};
use norden::conjugation::Conjugates;
use norden::curvature::curvature_at;
use norden::suite::run_check;
use norden::Tolerance;
use norden_bench::{fixture, CASES};

fn pointwise(c: &mut Criterion) {
    let s = catalog::nonintegrable_j_example().unwrap();
    let conn = catalog::random_connection(4, 1, RANDOM_DEGREE).unwrap();
    let p = [0.1, -0.2, 0.3, 0.05];
    c.bench_function("context nonintegrableJ", |b| b.iter(|| s.context_at(black_box(&p)).unwrap()));
    c.bench_function("connection jet dim 4", |b| b.iter(|| conn.jet_at(black_box(&p)).unwrap()));
    let ctx = s.context_at(&p).unwrap();
    let jet = conn.jet_at(&p).unwrap();
    c.bench_function("conjugates dim 4", |b| b.iter(|| Conjugates::at(black_box(jet.clone()), &ctx)));
    c.bench_function("curvature dim 4", |b| b.iter(|| curvature_at(black_box(&jet), &p)));
}

fn checks(c: &mut Criterion) {
    let mut group = c.benchmark_group("checks (10 points)");
    group.sample_size(20);
    for (id, name) in CASES {
        let (s, conn, samples) = fixture(id, name).unwrap();
        group.bench_function(format!("{id} on {name}"), |b| {
            b.iter(|| run_check(id, &s, &conn, &samples, Tolerance::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, pointwise, checks);
criterion_main!(benches);
