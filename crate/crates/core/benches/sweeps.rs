//! Parallel versus sequential execution of the seed and trial sweeps.
//!
//! `par_map` falls back to a sequential loop without the `parallel` feature, so
//! the "parallel" rows are only meaningful under the default features.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mux_overhead::analysis::{report_for_routed, translate};
use mux_overhead::models::toy_trial_factors;
use mux_overhead::parallel::{par_map, seq_map};
use mux_overhead::prelude::*;

fn routed_batch(spec: &HardwareSpec, gates: usize, seeds: &[u64]) -> (u64, Vec<RoutedCircuit>) {
    let logical = random_circuit(&RandomCircuitConfig::new(spec.coupling.n, gates, 1), spec).unwrap();
    let (translated, t) = translate(&logical, spec).unwrap();
    let routed = seeds.iter().map(|&s| route(&translated, spec, s).unwrap()).collect();
    (t, routed)
}

fn bench_serialize_sweep(c: &mut Criterion) {
    let spec = grid_spec(square_grid(11, 11).unwrap());
    let seeds: Vec<u64> = (0..16).collect();
    let (t_tr, routed) = routed_batch(&spec, 2000, &seeds);
    let jobs: Vec<(usize, usize)> = [2usize, 4, 13, 121]
        .iter()
        .flat_map(|&k| (0..seeds.len()).map(move |i| (k, i)))
        .collect();
    let one = |&(k, i): &(usize, usize)| {
        let params = PipelineParams::new(k, seeds[i]);
        report_for_routed(t_tr, &routed[i], &spec, &params, ReportMeta::default())
            .unwrap()
            .t_serialized
    };

    let mut g = c.benchmark_group("serialize_sweep_11x11");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| black_box(par_map(&jobs, one))));
    g.bench_function("sequential", |b| b.iter(|| black_box(seq_map(&jobs, one))));
    g.finish();
}

fn bench_routing(c: &mut Criterion) {
    let spec = eagle_spec();
    let logical = random_circuit(&RandomCircuitConfig::new(127, 1000, 3), &spec).unwrap();
    let (translated, _) = translate(&logical, &spec).unwrap();
    let seeds: Vec<u64> = (0..8).collect();
    let one = |&s: &u64| route(&translated, &spec, s).unwrap().swap_count;

    let mut g = c.benchmark_group("route_seeds_eagle");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| black_box(par_map(&seeds, one))));
    g.bench_function("sequential", |b| b.iter(|| black_box(seq_map(&seeds, one))));
    g.finish();
}

fn bench_toy(c: &mut Criterion) {
    let cfg = ToyModelConfig::new(square_grid(5, 5).unwrap(), 5, 0.2, 0.01, 10.0);
    let mut g = c.benchmark_group("toy_model_5x5");
    g.sample_size(20);
    for trials in [1000usize, 10_000] {
        let ids: Vec<u64> = (0..trials as u64).collect();
        g.bench_with_input(BenchmarkId::new("parallel", trials), &ids, |b, ids| {
            b.iter(|| black_box(toy_trial_factors(&cfg, ids, true).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("sequential", trials), &ids, |b, ids| {
            b.iter(|| black_box(toy_trial_factors(&cfg, ids, false).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_serialize_sweep, bench_routing, bench_toy);
criterion_main!(benches);
