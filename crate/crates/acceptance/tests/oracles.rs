use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use glyph_acceptance::oracle::{self, AllPairs};
use glyph_core::distance::{build_distance_matrix, dtw_distance, DistanceConfig, StateMetric};
use glyph_core::fixtures;
use glyph_core::ingest::dedup_sequences;

#[test]
fn metric_matches_enumeration_on_every_tiny_pair() {
    for level in oracle::tiny_levels().iter().take(2) {
        let states = oracle::closure(level);
        let metric = StateMetric::new(level, &DistanceConfig::default(), 0).unwrap();
        let cap = oracle::default_cap(level);
        for &a in &states {
            for &b in &states {
                assert_eq!(
                    metric.distance(&a, &b),
                    oracle::oracle_distance(level, a, b, cap, metric.big()),
                    "{}: {a} -> {b}",
                    level.id()
                );
            }
        }
    }
}

#[test]
fn floyd_warshall_agrees_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for level in oracle::tiny_levels() {
        let table = AllPairs::new(&level);
        let states = oracle::closure(&level);
        let cap = oracle::default_cap(&level);
        for _ in 0..40 {
            let a = states[rng.gen_range(0..states.len())];
            let b = states[rng.gen_range(0..states.len())];
            assert_eq!(table.directed(a, b, cap), oracle::enumerate_directed(&level, a, b, cap), "{a} -> {b}");
        }
    }
}

#[test]
fn metric_matches_floyd_warshall_on_all_levels() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut levels = oracle::tiny_levels();
    levels.extend([fixtures::strategy_level(), fixtures::fig3_level(), fixtures::t1_level()]);
    for level in levels {
        let table = AllPairs::new(&level);
        let states = oracle::closure(&level);
        let metric = StateMetric::new(&level, &DistanceConfig::default(), 0).unwrap();
        let cap = oracle::default_cap(&level);
        for _ in 0..200 {
            let a = states[rng.gen_range(0..states.len())];
            let b = states[rng.gen_range(0..states.len())];
            assert_eq!(metric.distance(&a, &b), table.distance(a, b, cap, metric.big()), "{}: {a} / {b}", level.id());
        }
    }
}

#[test]
fn dtw_matches_full_table() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let cfg = DistanceConfig::default();
    for level in oracle::tiny_levels() {
        let table = AllPairs::new(&level);
        let cap = oracle::default_cap(&level);
        for _ in 0..50 {
            let len_a = rng.gen_range(0..9);
            let a = oracle::random_walk(&level, &mut rng, len_a);
            let len_b = rng.gen_range(0..9);
            let b = oracle::random_walk(&level, &mut rng, len_b);
            let big = (u64::from(cap) + 1) * (a.len().max(b.len()) as u64 + 1);
            let want = oracle::reference_dtw(&a, &b, big, |x, y| table.distance(x, y, cap, big));
            assert_eq!(dtw_distance(&a, &b, &level, &cfg).unwrap(), want);
            assert_eq!(dtw_distance(&b, &a, &level, &cfg).unwrap(), want);
        }
    }
}

#[test]
fn strategy_matrix_matches_oracle() {
    let level = fixtures::strategy_level();
    let seqs = dedup_sequences(&fixtures::strategy_corpus([50, 20, 5, 2]));
    let (m, big) = build_distance_matrix(&seqs, &level, &DistanceConfig::default()).unwrap();
    let table = AllPairs::new(&level);
    let cap = oracle::default_cap(&level);
    for (i, a) in seqs.iter().enumerate() {
        for (j, b) in seqs.iter().enumerate() {
            let want = oracle::reference_dtw(&a.states, &b.states, big, |x, y| table.distance(x, y, cap, big));
            assert_eq!(m.get(i, j), want as f64, "D({i},{j})");
        }
    }
}
