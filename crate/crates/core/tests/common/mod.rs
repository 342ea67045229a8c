//! Brute-force oracles and fixture generators shared by integration tests.
#![allow(dead_code)]

use csem_core::benchgen::GroupingConfig;
use csem_core::{BenchmarkGroup, EmbeddingVector, GroupStatus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |s, (x, y)| s + x * y)
}

pub fn unit(values: Vec<f64>) -> EmbeddingVector {
    EmbeddingVector::normalized(values).unwrap()
}

pub fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Tight clusters around random centers, so groups form at high thresholds.
pub fn clustered(
    rng: &mut ChaCha8Rng,
    n: usize,
    dim: usize,
    clusters: usize,
    spread: f64,
) -> Vec<(String, EmbeddingVector)> {
    let centers: Vec<Vec<f64>> = (0..clusters.max(1)).map(|_| unit(gaussian(rng, dim)).into_values()).collect();
    let mut ids: Vec<u32> = (0..n as u32).collect();
    // ids unrelated to generation order
    for i in (1..ids.len()).rev() {
        ids.swap(i, rng.random_range(0..=i));
    }
    (0..n)
        .map(|i| {
            let c = &centers[rng.random_range(0..centers.len())];
            let v = c.iter().map(|x| x + spread * rng.sample::<f64, _>(StandardNormal)).collect();
            (format!("c{:05}", ids[i]), unit(v))
        })
        .collect()
}

/// An anchor along axis 0 with `n` neighbours at similarity exactly `0.9`
/// (the components normalize without rounding), one of them nudged just
/// below when `miss` is set.
pub fn boundary_star(prefix: &str, dim: usize, n: usize, miss: bool) -> Vec<(String, EmbeddingVector)> {
    assert!(dim > n);
    let mut anchor = vec![0.0; dim];
    anchor[0] = 1.0;
    let mut out = vec![(format!("{prefix}-a"), unit(anchor))];
    let y = (1.0f64 - 0.81).sqrt();
    for i in 0..n {
        let mut v = vec![0.0; dim];
        v[0] = 0.9;
        v[i + 1] = y;
        let mut e = unit(v.clone());
        if miss && i == n - 1 {
            // step down until normalization no longer rounds back to 0.9
            while e.values()[0] >= 0.9 {
                v[0] = f64::from_bits(v[0].to_bits() - 1);
                e = unit(v.clone());
            }
        } else {
            assert_eq!(e.values()[0], 0.9);
        }
        out.push((format!("{prefix}-n{i}"), e));
    }
    out
}

/// O(n^2) grouping: every anchor is compared with every other chart by a full
/// sort on (similarity desc, id asc).
pub fn brute_group(vectors: &[(String, EmbeddingVector)], cfg: &GroupingConfig) -> Vec<BenchmarkGroup> {
    let mut sorted: Vec<&(String, EmbeddingVector)> = vectors.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let need = cfg.group_size - 1;
    let mut used = vec![false; sorted.len()];
    let mut groups = Vec::new();
    for a in 0..sorted.len() {
        if !cfg.distractor_reuse && used[a] {
            continue;
        }
        let mut cands: Vec<(f64, usize)> = (0..sorted.len())
            .filter(|&j| j != a && (cfg.distractor_reuse || !used[j]))
            .map(|j| (dot(sorted[a].1.values(), sorted[j].1.values()), j))
            .collect();
        cands.sort_by(|x, y| y.0.total_cmp(&x.0).then(sorted[x.1].0.cmp(&sorted[y.1].0)));
        cands.truncate(need);
        if cands.len() == need && cands.iter().all(|c| c.0 >= cfg.threshold) {
            if !cfg.distractor_reuse {
                used[a] = true;
                cands.iter().for_each(|c| used[c.1] = true);
            }
            groups.push(BenchmarkGroup {
                group_id: format!("g-{}", sorted[a].0),
                target_id: sorted[a].0.clone(),
                distractor_ids: cands.iter().map(|c| sorted[c.1].0.clone()).collect(),
                anchor_similarities: cands.iter().map(|c| c.0).collect(),
                precise_query: None,
                fuzzy_query: None,
                status: GroupStatus::Candidate,
            });
        }
    }
    groups
}

/// Full-sort search: (score desc, id asc), truncated to `k`.
pub fn brute_search(entries: &[(String, EmbeddingVector)], q: &[f64], k: usize) -> Vec<(String, f64)> {
    let mut all: Vec<(String, f64)> = entries.iter().map(|(id, v)| (id.clone(), dot(q, v.values()))).collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Compare grouping output with the oracle; `Err` describes the first
/// difference.
pub fn same_groups(got: &[BenchmarkGroup], want: &[BenchmarkGroup], tol: f64) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("{} groups, oracle has {}", got.len(), want.len()));
    }
    for (g, w) in got.iter().zip(want) {
        if g.target_id != w.target_id || g.distractor_ids != w.distractor_ids || g.group_id != w.group_id {
            return Err(format!("group {} differs from oracle {}", g.group_id, w.group_id));
        }
        for (a, b) in g.anchor_similarities.iter().zip(&w.anchor_similarities) {
            if (a - b).abs() > tol {
                return Err(format!("similarity {a} vs {b} in {}", g.group_id));
            }
        }
    }
    Ok(())
}

/// Random index with deliberate ties: duplicated vectors and coarse
/// integer-valued components.
pub fn tied_index(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<(String, EmbeddingVector)> {
    let mut out: Vec<(String, EmbeddingVector)> = Vec::with_capacity(n);
    let mut ids: Vec<u32> = (0..n as u32).collect();
    for i in (1..ids.len()).rev() {
        ids.swap(i, rng.random_range(0..=i));
    }
    for i in 0..n {
        let v = if i > 0 && rng.random_bool(0.2) {
            out[rng.random_range(0..i)].1.clone()
        } else if rng.random_bool(0.3) {
            let mut raw: Vec<f64> = (0..dim).map(|_| rng.random_range(-2i32..=2) as f64).collect();
            if raw.iter().all(|x| *x == 0.0) {
                raw[0] = 1.0;
            }
            unit(raw)
        } else {
            unit(gaussian(rng, dim))
        };
        out.push((format!("x{:06}", ids[i]), v));
    }
    out
}
