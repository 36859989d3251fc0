use std::hint::black_box;

use conestab::lab::{run_cell, NoiseKind, NoiseSpec, SweepConfig};
use conestab::samples::line_grid;
use conestab::topology::DEFAULT_GAUGE_TOL;
use conestab::{
    gauge, stabilize, ApproxQuadraticMap, Euclidean, ExtendedReal, ExtendedReals,
    NeighborhoodScale, StabilizeOptions, VectorElement,
};
use conestab_cli::expr::parse_expression;
use criterion::{criterion_group, criterion_main, Criterion};

fn bench_gauge(c: &mut Criterion) {
    let cone = Euclidean::new(3).unwrap();
    let a = VectorElement::new(vec![1.25, -3.5, 0.75]).unwrap();
    let w = VectorElement::splat(3, 1.0);
    c.bench_function("gauge_r3", |b| {
        b.iter(|| gauge(&cone, black_box(&a), &w, DEFAULT_GAUGE_TOL).unwrap())
    });
}

fn bench_stabilize(c: &mut Criterion) {
    let f = ApproxQuadraticMap::from_fn(
        Euclidean::new(1).unwrap(),
        ExtendedReals,
        |x: &VectorElement| ExtendedReal::finite(x.coords()[0].powi(2) + 1.0),
    );
    let pts = line_grid(-4.0, 4.0, 0.25).unwrap();
    let v = NeighborhoodScale::xi(2.0).unwrap();
    let opts = StabilizeOptions::default();
    c.bench_function("stabilize_offset_square", |b| {
        b.iter(|| stabilize(&f, black_box(&pts), &v, &opts).unwrap())
    });
}

fn bench_expression(c: &mut Criterion) {
    let e = parse_expression("x1^2 + 0.1*sin(3*x1) - abs(x2)/4").unwrap();
    let x = [0.75, -1.5];
    c.bench_function("expression_eval", |b| {
        b.iter(|| e.eval(black_box(&x)).unwrap())
    });
}

fn bench_sweep_cell(c: &mut Criterion) {
    let cfg = SweepConfig::default();
    let cell = SweepConfig {
        epsilons: vec![0.6],
        dimensions: vec![2],
        seeds: vec![1],
        noises: vec![NoiseSpec::full(NoiseKind::SeededHash)],
        ..cfg.clone()
    }
    .cells()[0];
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("cell_d2_seeded_hash", |b| {
        b.iter(|| run_cell(black_box(&cell), &cfg))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_gauge,
    bench_stabilize,
    bench_expression,
    bench_sweep_cell
);
criterion_main!(benches);
