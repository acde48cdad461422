#![allow(clippy::needless_range_loop)]

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use glyph_core::distance::{build_distance_matrix, DistanceConfig, DistanceMatrix};
use glyph_core::exec::Exec;
use glyph_core::fixtures;
use glyph_core::game::{generate_synthetic_traces, Policy};
use glyph_core::ingest::dedup_sequences;
use glyph_core::layout::{force_directed_layout, stress_mds_layout, LayoutConfig, Pins};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn random_graph(n: usize, m: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
}

fn random_matrix(n: usize, seed: u64) -> DistanceMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.gen_range(1.0..100.0);
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    DistanceMatrix::from_rows((0..n).collect(), values)
}

fn distance_matrix(c: &mut Criterion) {
    let level = fixtures::fig3_level();
    let traces = generate_synthetic_traces(&level, Policy::Mixed, 300, 7).expect("fig3 is completable");
    let sequences = dedup_sequences(&traces);
    let mut group = c.benchmark_group("distance_matrix");
    group.sample_size(10);
    for (name, exec) in MODES {
        let cfg = DistanceConfig { exec, ..Default::default() };
        group.bench_function(BenchmarkId::new(name, sequences.len()), |b| {
            b.iter(|| build_distance_matrix(&sequences, &level, &cfg).unwrap())
        });
    }
    group.finish();
}

fn force_layout(c: &mut Criterion) {
    let n = 2000;
    let edges = random_graph(n, 4000, 1);
    let mut group = c.benchmark_group("force_directed");
    group.sample_size(10);
    for (name, exec) in MODES {
        let cfg = LayoutConfig { exec, ..Default::default() };
        group.bench_function(BenchmarkId::new(name, n), |b| {
            b.iter(|| force_directed_layout(n, &edges, &cfg, &Pins::new()).unwrap())
        });
    }
    group.finish();
}

fn smacof(c: &mut Criterion) {
    let n = 400;
    let matrix = random_matrix(n, 2);
    let mut group = c.benchmark_group("stress_mds");
    group.sample_size(10);
    for (name, exec) in MODES {
        let cfg = LayoutConfig { exec, iterations: 50, ..LayoutConfig::stress_mds() };
        group.bench_function(BenchmarkId::new(name, n), |b| {
            b.iter(|| stress_mds_layout(&matrix, &cfg, &Pins::new()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(kernels, distance_matrix, force_layout, smacof);
criterion_main!(kernels);
