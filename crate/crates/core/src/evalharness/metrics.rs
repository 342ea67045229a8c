use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chartcore::{EvalReport, RankedList};
use crate::{CsemError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    pub k_list: Vec<usize>,
    /// Cutoff for MRR and NDCG.
    pub k_rank: usize,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig { k_list: vec![1, 5, 10], k_rank: 10 }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_list.is_empty() || self.k_list.contains(&0) || self.k_rank == 0 {
            return Err(CsemError::InvalidArgument("k values must be at least 1".into()));
        }
        if self.k_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CsemError::InvalidArgument("k_list must be strictly ascending".into()));
        }
        Ok(())
    }

    /// Retrieval depth needed to compute every metric.
    pub fn depth(&self) -> usize {
        self.k_list.iter().copied().max().unwrap_or(1).max(self.k_rank)
    }
}

/// 1-based position of the target, if retrieved.
pub fn rank_of_target(ranked: &RankedList, target_id: &str) -> Option<usize> {
    ranked.entries.iter().position(|e| e.chart_id == target_id).map(|p| p + 1)
}

pub fn recall_at_k(rank: Option<usize>, k: usize) -> f64 {
    match rank {
        Some(r) if r <= k => 1.0,
        _ => 0.0,
    }
}

pub fn mrr_contrib(rank: Option<usize>, k: usize) -> f64 {
    match rank {
        Some(r) if r <= k => 1.0 / r as f64,
        _ => 0.0,
    }
}

/// Binary relevance with one relevant item, so the ideal DCG is 1.
pub fn ndcg_contrib(rank: Option<usize>, k: usize) -> f64 {
    match rank {
        Some(r) if r <= k => 1.0 / (1.0 + r as f64).log2(),
        _ => 0.0,
    }
}

/// Aggregate per-query ranks. `overall` of a single report is the mean of
/// its R@10, MRR@10 and NDCG@10; see [`overall_of`] for the two-kind score.
pub fn report_from_ranks(ranks: BTreeMap<String, Option<usize>>, cfg: &MetricConfig, tag: &str) -> EvalReport {
    let n = ranks.len().max(1) as f64;
    let mean = |f: &dyn Fn(Option<usize>) -> f64| ranks.values().map(|r| f(*r)).sum::<f64>() / n;
    let r_at: BTreeMap<usize, f64> = cfg.k_list.iter().map(|&k| (k, mean(&|r| recall_at_k(r, k)))).collect();
    let mrr = mean(&|r| mrr_contrib(r, cfg.k_rank));
    let ndcg = mean(&|r| ndcg_contrib(r, cfg.k_rank));
    let r10 = mean(&|r| recall_at_k(r, 10));
    EvalReport {
        per_query_rank: ranks,
        r_at,
        mrr_at_10: mrr,
        ndcg_at_10: ndcg,
        overall: (r10 + mrr + ndcg) / 3.0,
        config_tag: tag.to_string(),
    }
}

/// Arithmetic mean of {R@10, MRR@10, NDCG@10} over precise and fuzzy.
pub fn overall_six(precise: [f64; 3], fuzzy: [f64; 3]) -> f64 {
    precise.iter().chain(&fuzzy).sum::<f64>() / 6.0
}

pub fn overall_of(precise: &EvalReport, fuzzy: &EvalReport) -> f64 {
    overall_six(triple(precise), triple(fuzzy))
}

/// (R@10, MRR@10, NDCG@10).
pub fn triple(r: &EvalReport) -> [f64; 3] {
    [r.recall(10), r.mrr_at_10, r.ndcg_at_10]
}

/// A published insight-ablation row (percent): six metrics and the
/// printed Overall, kept as a fixture for the Overall arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedAblationRow {
    pub visual: bool,
    pub statistics: bool,
    pub task: bool,
    pub precise: [f64; 3],
    pub fuzzy: [f64; 3],
    pub overall: f64,
}

const fn row(v: bool, s: bool, t: bool, p: [f64; 3], f: [f64; 3], overall: f64) -> PublishedAblationRow {
    PublishedAblationRow { visual: v, statistics: s, task: t, precise: p, fuzzy: f, overall }
}

/// Published ablation rows: R@10, MRR@10, NDCG@10 for precise then fuzzy
/// queries, and the printed Overall.
pub const PUBLISHED_ABLATION: [PublishedAblationRow; 8] = [
    row(false, false, false, [62.56, 37.99, 43.90], [51.91, 30.29, 35.33], 43.66),
    row(true, false, false, [69.64, 44.39, 48.69], [56.28, 27.27, 34.29], 46.67),
    row(false, true, false, [66.15, 45.18, 50.18], [57.25, 32.75, 38.60], 48.35),
    row(false, false, true, [65.64, 44.44, 49.52], [58.78, 32.24, 38.59], 48.20),
    row(true, false, true, [71.79, 44.96, 51.40], [60.31, 35.24, 41.17], 50.81),
    row(true, true, false, [66.15, 43.26, 48.74], [54.96, 32.20, 37.66], 47.16),
    row(false, true, true, [65.64, 43.53, 48.87], [54.96, 30.44, 36.23], 46.61),
    row(true, true, true, [70.26, 49.30, 61.30], [61.83, 38.96, 44.41], 54.34),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartcore::RankedEntry;

    #[test]
    fn rank_lookup() {
        let list = RankedList {
            query_id: "q".into(),
            entries: ["a", "b", "c"].iter().map(|c| RankedEntry { chart_id: c.to_string(), score: 0.0 }).collect(),
            k: 10,
        };
        assert_eq!(rank_of_target(&list, "a"), Some(1));
        assert_eq!(rank_of_target(&list, "c"), Some(3));
        assert_eq!(rank_of_target(&list, "z"), None);
    }

    #[test]
    fn contributions() {
        assert_eq!(mrr_contrib(Some(2), 10), 0.5);
        assert!((ndcg_contrib(Some(2), 10) - 1.0 / 3f64.log2()).abs() < 1e-15);
        assert_eq!(ndcg_contrib(Some(12), 10), 0.0);
        assert_eq!(recall_at_k(Some(12), 10), 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(MetricConfig::default().validate().is_ok());
        assert!(MetricConfig { k_list: vec![5, 1], k_rank: 10 }.validate().is_err());
        assert_eq!(MetricConfig::default().depth(), 10);
    }
}
