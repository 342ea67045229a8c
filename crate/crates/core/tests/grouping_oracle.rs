mod common;

use common::*;
use csem_core::benchgen::{group_charts, GroupingConfig};

fn check(vectors: &[(String, csem_core::EmbeddingVector)], cfg: &GroupingConfig) {
    let got = group_charts(vectors, cfg).unwrap();
    let want = brute_group(vectors, cfg);
    same_groups(&got, &want, 1e-9).unwrap();
}

#[test]
fn random_instances_match_brute_force() {
    let mut r = rng(11);
    for case in 0..12 {
        let n = 20 + case * 37;
        let v = clustered(&mut r, n, 16, 1 + n / 12, 0.12);
        for reuse in [true, false] {
            check(&v, &GroupingConfig { threshold: 0.9, group_size: 5, distractor_reuse: reuse });
            check(&v, &GroupingConfig { threshold: 0.8, group_size: 3, distractor_reuse: reuse });
        }
    }
}

#[test]
fn threshold_is_inclusive() {
    let cfg = GroupingConfig::default();
    let star = boundary_star("s", 8, 4, false);
    let groups = group_charts(&star, &cfg).unwrap();
    assert_eq!(groups.len(), 1);
    assert_eq!(groups[0].target_id, "s-a");
    assert!(groups[0].anchor_similarities.iter().all(|&s| s == 0.9));
    check(&star, &cfg);
}

#[test]
fn one_ulp_below_threshold_fails() {
    let cfg = GroupingConfig::default();
    let star = boundary_star("s", 8, 4, true);
    assert!(group_charts(&star, &cfg).unwrap().is_empty());
    check(&star, &cfg);
}

#[test]
fn ties_go_to_smaller_id() {
    // five identical neighbours for four slots
    let mut v = vec![("a".to_string(), unit(vec![1.0, 0.0]))];
    for id in ["e", "c", "b", "f", "d"] {
        v.push((id.to_string(), unit(vec![1.0, 0.0])));
    }
    let groups = group_charts(&v, &GroupingConfig::default()).unwrap();
    assert_eq!(groups[0].distractor_ids, ["b", "c", "d", "e"]);
    check(&v, &GroupingConfig::default());
    check(&v, &GroupingConfig { distractor_reuse: false, ..GroupingConfig::default() });
}

#[test]
fn duplicate_ids_rejected() {
    let v = vec![("a".to_string(), unit(vec![1.0])), ("a".to_string(), unit(vec![1.0]))];
    assert!(group_charts(&v, &GroupingConfig::default()).is_err());
}
