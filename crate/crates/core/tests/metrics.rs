use std::collections::BTreeMap;

use csem_core::evalharness::{mrr_contrib, ndcg_contrib, recall_at_k, report_from_ranks, MetricConfig};
use proptest::prelude::*;

fn report(ranks: &[Option<usize>]) -> csem_core::EvalReport {
    let m: BTreeMap<String, Option<usize>> = ranks.iter().enumerate().map(|(i, r)| (format!("q{i:04}"), *r)).collect();
    report_from_ranks(m, &MetricConfig::default(), "t")
}

#[test]
fn worked_example() {
    let r = report(&[Some(1), Some(3), None]);
    assert!((r.mrr_at_10 - 4.0 / 9.0).abs() < 1e-12);
    assert!((r.ndcg_at_10 - 0.5).abs() < 1e-12);
    assert!((r.recall(1) - 1.0 / 3.0).abs() < 1e-12);
    assert!((r.recall(5) - 2.0 / 3.0).abs() < 1e-12);
    assert!((r.recall(10) - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn ranks_beyond_cutoff_score_zero() {
    assert_eq!(mrr_contrib(Some(11), 10), 0.0);
    assert_eq!(ndcg_contrib(Some(11), 10), 0.0);
    assert_eq!(recall_at_k(Some(10), 10), 1.0);
    assert_eq!(recall_at_k(None, 10), 0.0);
    assert!((ndcg_contrib(Some(10), 10) - 1.0 / 11f64.log2()).abs() < 1e-15);
}

proptest! {
    #[test]
    fn metric_orderings(ranks in prop::collection::vec(prop::option::of(1usize..30), 1..60)) {
        let r = report(&ranks);
        prop_assert!(r.recall(1) <= r.recall(5) && r.recall(5) <= r.recall(10));
        prop_assert!(r.ndcg_at_10 >= r.mrr_at_10 - 1e-15);
        prop_assert!(r.mrr_at_10 <= r.recall(10) + 1e-15);
        prop_assert!((0.0..=1.0).contains(&r.ndcg_at_10));
    }
}
