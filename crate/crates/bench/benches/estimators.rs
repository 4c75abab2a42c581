use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use stability_core::*;

fn cube_distribution(d: usize) -> FiniteDistribution {
    let atoms = (0..d).map(|i| {
        let y = if i % 2 == 0 { Label::Plus } else { Label::Minus };
        (LabeledExample::new(i, y), 1.0 / d as f64)
    });
    FiniteDistribution::new(atoms).unwrap()
}

fn histogram(c: &mut Criterion) {
    let mut g = c.benchmark_group("output_histogram");
    g.sample_size(10);
    for d in [3, 6] {
        let a = cube_learner(d, 0.1).unwrap();
        let dist = cube_distribution(d);
        g.bench_with_input(BenchmarkId::new("cube", d), &d, |b, _| {
            b.iter(|| output_histogram(&a, &dist, 500, 2048, Seed(1)).unwrap())
        });
    }
    g.finish();
}

fn exact(c: &mut Criterion) {
    let class = Arc::new(make_cube(3).unwrap());
    let a = erm_learner(class).unwrap();
    let dist = cube_distribution(3);
    let mut g = c.benchmark_group("exact_oracle");
    for n in [4, 8] {
        g.bench_with_input(BenchmarkId::new("erm_cube3", n), &n, |b, &n| {
            b.iter(|| exact_output_distribution(&a, &dist, n).unwrap())
        });
    }
    g.finish();
}

fn dims(c: &mut Criterion) {
    let cube = make_cube(4).unwrap();
    let stars = make_singletons(5).unwrap();
    c.bench_function("vc_cube4", |b| b.iter(|| vc_dimension(black_box(&cube)).unwrap()));
    c.bench_function("ldim_cube4", |b| b.iter(|| littlestone_dimension(black_box(&cube)).unwrap()));
    c.bench_function("hollow_star_singletons5", |b| b.iter(|| hollow_star_number(black_box(&stars), 6).unwrap()));
}

fn boosting(c: &mut Criterion) {
    let params = boost_params(0.5, 0.2, 0.2, 50).unwrap();
    let inner = threshold_learner(4, 0.2).unwrap();
    let fallback = Hypothesis::all_plus(inner.domain_len());
    let b = boost(inner, params, fallback).unwrap();
    let dist = FiniteDistribution::new([
        (LabeledExample::new(0, Label::Plus), 0.5),
        (LabeledExample::new(2, Label::Minus), 0.5),
    ])
    .unwrap();
    let s = draw_sample(&dist, params.sample_size(), Seed(3));
    let mut g = c.benchmark_group("boost");
    g.sample_size(10);
    g.bench_function("thresholds4_run", |bch| bch.iter(|| b.run(&s, Seed(4)).unwrap()));
    g.finish();
}

criterion_group!(benches, histogram, exact, dims, boosting);
criterion_main!(benches);
