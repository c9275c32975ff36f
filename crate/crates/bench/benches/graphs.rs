use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use sleepmis_bench::fixture;
use sleepmis_core::oracle::{check_mis, rank_order, sequential_greedy};
use sleepmis_core::{generate, simulate, AlgoParams, Algorithm, EngineConfig, GraphSpec};

fn generators(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate");
    for spec in ["gnp:n=4096,p=8/n", "gnp:n=16384,p=8/n", "tree:n=4096", "grid:rows=64,cols=64"] {
        let family: sleepmis_core::Family = spec.parse().unwrap();
        group.bench_function(spec, |b| {
            b.iter(|| generate(&GraphSpec::new(black_box(family.clone()), 5)).unwrap())
        });
    }
    group.finish();
}

fn oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    for n in [1024usize, 4096] {
        let g = fixture(&format!("gnp:n={n},p=8/n"));
        let out = simulate(&g, &AlgoParams::new(Algorithm::Sleeping), 0, EngineConfig::default()).unwrap();
        group.throughput(Throughput::Elements((g.n() + g.m()) as u64));
        group.bench_with_input(BenchmarkId::new("check_mis", n), &out, |b, out| {
            b.iter(|| check_mis(black_box(&g), &out.outputs))
        });
        group.bench_with_input(BenchmarkId::new("sequential_greedy", n), &out, |b, out| {
            b.iter(|| {
                let order = rank_order(&out.tapes).unwrap_or_else(|_| g.nodes().collect());
                sequential_greedy(black_box(&g), &order).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, generators, oracles);
criterion_main!(benches);
