use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use csd::lattice::{make_grid, make_state, DataSpec};
use csd::par;
use csd::probes::{member_seed, packet_block, pair_ratio, product_pair, PairFamily};
use csd::solver::evolve;
use csd::spaces::{y_norm, Sign};

fn product_member(n: usize, i: usize) -> f64 {
    let grid = make_grid(16.0, n).unwrap();
    let (f, g) = product_pair(&grid, 0.0, 0.0, PairFamily::Coherent, 1, i as u64);
    pair_ratio(&f, &g, 0.0, 0.0, 0.0)
}

fn block_member(n: usize, i: usize) -> f64 {
    let grid = make_grid(8.0, n).unwrap();
    let u = packet_block(&grid, 1.0, 4.0, member_seed(3, i as u64, 0)).unwrap();
    y_norm(&u, 0.0, 0.0, Sign::Plus)
}

fn refinement_level(n: usize) -> f64 {
    let g = make_grid(16.0, n).unwrap();
    let s = make_state(
        g,
        &DataSpec::gaussian(-2.0, 1.5, 1.0),
        &DataSpec::gaussian(2.0, 1.5, 0.8),
        &DataSpec::gaussian(0.0, 2.0, 0.5),
        &DataSpec::gaussian(1.0, 2.0, -0.3),
        1.0,
    )
    .unwrap();
    evolve(&s, 4.0, usize::MAX).unwrap().last().u_plus[0].re
}

fn ensembles(c: &mut Criterion) {
    let mut group = c.benchmark_group("product_ensemble");
    group.sample_size(10);
    for n in [256usize, 1024] {
        group.bench_with_input(BenchmarkId::new("seq", n), &n, |b, &n| {
            b.iter(|| par::map_indexed_seq(100, |i| product_member(n, i)))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", n), &n, |b, &n| {
            b.iter(|| par::map_indexed_par(100, |i| product_member(n, i)))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("block_ensemble");
    group.sample_size(10);
    for n in [64usize, 128] {
        group.bench_with_input(BenchmarkId::new("seq", n), &n, |b, &n| {
            b.iter(|| par::map_indexed_seq(100, |i| block_member(n, i)))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", n), &n, |b, &n| {
            b.iter(|| par::map_indexed_par(100, |i| block_member(n, i)))
        });
    }
    group.finish();
}

fn refinement(c: &mut Criterion) {
    let levels = [512usize, 1024, 2048, 4096];
    let mut group = c.benchmark_group("refinement_study");
    group.sample_size(10);
    group.bench_function("seq", |b| {
        b.iter(|| par::map_indexed_seq(levels.len(), |i| refinement_level(levels[i])))
    });
    #[cfg(feature = "parallel")]
    group.bench_function("par", |b| {
        b.iter(|| par::map_indexed_par(levels.len(), |i| refinement_level(levels[i])))
    });
    group.finish();
}

criterion_group!(benches, ensembles, refinement);
criterion_main!(benches);
