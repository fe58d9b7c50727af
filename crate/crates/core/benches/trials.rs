use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use lipgraph::bmatch::plip_mwbm;
use lipgraph::graph::{BipartiteWeights, WeightVector, WeightedMultigraph};
use lipgraph::mst::lip_mst;
use lipgraph::par::{map_trials, map_trials_seq};
use lipgraph::rng::Stream;

fn grid(side: usize) -> (WeightedMultigraph, WeightVector) {
    let id = |r: usize, c: usize| r * side + c;
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < side {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    let s = Stream::new(1);
    let w = (0..edges.len()).map(|e| 1.0 + 9.0 * s.uniform(e as u64)).collect();
    (WeightedMultigraph::new(side * side, &edges).unwrap(), WeightVector::new(w).unwrap())
}

fn mst_trials(c: &mut Criterion) {
    let (g, w) = grid(12);
    let mut group = c.benchmark_group("lip_mst_trials");
    for n in [256, 2048] {
        let run = |k: usize| lip_mst(&g, &w, 0.5, Stream::new(k as u64)).unwrap().tree.weight(&w);
        group.bench_with_input(BenchmarkId::new("rayon", n), &n, |b, &n| b.iter(|| black_box(map_trials(n, run))));
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| black_box(map_trials_seq(n, run)))
        });
    }
    group.finish();
}

fn bmatch_trials(c: &mut Criterion) {
    let s = Stream::new(2);
    let w = BipartiteWeights::new(5, 5, (0..25).map(|k| s.uniform(k)).collect()).unwrap();
    let mut group = c.benchmark_group("plip_mwbm_trials");
    let n = 256;
    let run = |k: usize| plip_mwbm(&w, 0.05, Stream::new(k as u64)).unwrap().matching.weight(&w);
    group.bench_function("rayon", |b| b.iter(|| black_box(map_trials(n, run))));
    group.bench_function("sequential", |b| b.iter(|| black_box(map_trials_seq(n, run))));
    group.finish();
}

criterion_group!(benches, mst_trials, bmatch_trials);
criterion_main!(benches);
