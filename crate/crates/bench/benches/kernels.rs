use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ndarray::Array2;
use waveleton::dynamics::{PhaseSpaceRhs, RhsKind, Truncation};
use waveleton::mra::{dwt_1d, dwt_2d};
use waveleton::operator::{project_operator, DenseOperator};
use waveleton::wavelet::build_filter_pair;
use waveleton::{Family, PhaseSpaceGrid, PolynomialPotential, WignerField};
use waveleton_bench::test_signal;

fn dwt(c: &mut Criterion) {
    let f = build_filter_pair(Family::Symmlet, 8).unwrap();
    let mut group = c.benchmark_group("dwt");
    for n in [1024usize, 16384] {
        let s = test_signal(n);
        group.bench_with_input(BenchmarkId::new("1d", n), &s, |b, s| b.iter(|| dwt_1d(black_box(s), &f, 6).unwrap()));
    }
    let s = test_signal(256);
    let field = Array2::from_shape_fn((256, 256), |(i, j)| s[i] * s[j]);
    group.bench_function("2d/256", |b| b.iter(|| dwt_2d(black_box(&field), &f, 4).unwrap()));
    group.finish();
}

fn ns_apply(c: &mut Criterion) {
    let f = build_filter_pair(Family::Daubechies, 3).unwrap();
    let op = DenseOperator::regularized_kernel(256, 1e-2).unwrap();
    let ns = project_operator(&op, &f, 5).unwrap();
    let v = test_signal(256);
    let mut group = c.benchmark_group("ns_apply");
    group.bench_function("dense/256", |b| b.iter(|| op.apply(black_box(&v)).unwrap()));
    group.bench_function("ns/256", |b| b.iter(|| ns.apply(black_box(&v)).unwrap()));
    group.finish();
}

fn rhs(c: &mut Criterion) {
    let grid = PhaseSpaceGrid::symmetric(8.0, 8.0, 128).unwrap();
    let w = WignerField::gaussian(grid, 1.0, 1.0, 1.0, 0.0, 0.8, 0.8).unwrap();
    let quartic = PolynomialPotential::new(vec![0.0, 0.0, 0.5, 0.0, 0.1]);
    let assembler = PhaseSpaceRhs::default();
    let mut group = c.benchmark_group("rhs");
    group.bench_function("liouville/128", |b| b.iter(|| assembler.rate(black_box(&w), &quartic, &RhsKind::Liouville).unwrap()));
    group.bench_function("moyal/128", |b| {
        b.iter(|| assembler.rate(black_box(&w), &quartic, &RhsKind::Moyal(Truncation::Auto)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, dwt, ns_apply, rhs);
criterion_main!(benches);
