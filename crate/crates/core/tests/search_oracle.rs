mod common;

use common::*;
use csem_core::retrieval::VectorIndex;

#[test]
fn search_matches_full_sort_with_ties() {
    let mut r = rng(5);
    for case in 0..20 {
        let n = 1 + case * 61;
        let dim = [3, 8, 32][case % 3];
        let entries = tied_index(&mut r, n, dim);
        let index = VectorIndex::build(entries.clone()).unwrap();
        for _ in 0..5 {
            let q = if rand::Rng::random_bool(&mut r, 0.5) {
                entries[rand::Rng::random_range(&mut r, 0..n)].1.clone()
            } else {
                unit(gaussian(&mut r, dim))
            };
            for k in [1, 10, n + 3] {
                let got: Vec<(String, f64)> =
                    index.search(&q, k).unwrap().entries.into_iter().map(|e| (e.chart_id, e.score)).collect();
                assert_eq!(got, brute_search(&entries, q.values(), k));
            }
        }
    }
}

#[test]
fn batch_equals_single() {
    let mut r = rng(9);
    let entries = tied_index(&mut r, 300, 16);
    let index = VectorIndex::build(entries).unwrap();
    let queries: Vec<(String, csem_core::EmbeddingVector)> =
        (0..40).map(|i| (format!("q{i}"), unit(gaussian(&mut r, 16)))).collect();
    let batch = index.batch_search(&queries, 10).unwrap();
    for ((id, q), got) in queries.iter().zip(batch) {
        assert_eq!(got, index.search_as(id, q, 10).unwrap());
    }
}

#[test]
fn save_load_round_trip() {
    let mut r = rng(2);
    let entries = tied_index(&mut r, 50, 8);
    let ids: Vec<String> = entries.iter().map(|e| e.0.clone()).collect();
    let index = VectorIndex::build(entries).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("embeddings.bin");
    index.save(&path).unwrap();
    let back = VectorIndex::load(&path, &ids).unwrap();
    assert_eq!(back.ids(), index.ids());
    for i in 0..index.len() {
        for (a, b) in back.vector(i).iter().zip(index.vector(i)) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}

#[test]
fn bad_queries_rejected() {
    let index = VectorIndex::build(vec![("a".into(), unit(vec![1.0, 0.0]))]).unwrap();
    assert!(index.search(&unit(vec![1.0, 0.0]), 0).is_err());
    assert!(index.search(&unit(vec![1.0, 0.0, 0.0]), 1).is_err());
}
