use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use iotsense::lowrank::{masked_rpca, rpca, RecoveryProblem};
use iotsense::{svd, svt};
use iotsense_bench::traffic;

fn decompositions(c: &mut Criterion) {
    let mut group = c.benchmark_group("svd");
    for size in [50, 100, 200] {
        let y = traffic(size, 5, 0.0).observed;
        group.bench_with_input(BenchmarkId::new("thin", size), &y, |b, y| b.iter(|| svd(y).unwrap()));
        group.bench_with_input(BenchmarkId::new("svt", size), &y, |b, y| b.iter(|| svt(y, 1.0).unwrap()));
    }
    group.finish();
}

fn recovery(c: &mut Criterion) {
    let mut group = c.benchmark_group("recovery");
    group.sample_size(10);
    for size in [50, 100] {
        let full = traffic(size, 5, 0.0);
        let problem = RecoveryProblem::new(full.observed);
        group.bench_with_input(BenchmarkId::new("rpca", size), &problem, |b, p| b.iter(|| rpca(p).unwrap()));

        let partial = traffic(size, 5, 0.2);
        let problem = RecoveryProblem::new(partial.observed).with_mask(partial.mask);
        group.bench_with_input(BenchmarkId::new("masked", size), &problem, |b, p| b.iter(|| masked_rpca(p).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, decompositions, recovery);
criterion_main!(benches);
