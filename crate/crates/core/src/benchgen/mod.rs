//! Benchmark construction: similarity grouping of a target chart with its
//! nearest distractors, query generation, and consensus filtering.

mod queries;

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use queries::{
    describe_for_prompt, fuzzy_purpose, gen_queries, query_violations, template_fuzzy, template_precise,
    QUERY_MAX_CHARS, QUERY_MAX_WORDS, QUERY_MIN_WORDS, QUERY_PROMPT,
};

use crate::chartcore::{BenchmarkGroup, EmbeddingVector, GroupStatus, TextQuery};
use crate::retrieval::score;
use crate::{seeds, CsemError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroupingConfig {
    pub threshold: f64,
    /// Target plus distractors.
    pub group_size: usize,
    /// Whether a chart may serve as distractor in several groups (and as
    /// an anchor after being used as a distractor).
    pub distractor_reuse: bool,
}

impl Default for GroupingConfig {
    fn default() -> Self {
        GroupingConfig { threshold: 0.90, group_size: 5, distractor_reuse: true }
    }
}

impl GroupingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(CsemError::InvalidArgument(format!("threshold must be in (0, 1], got {}", self.threshold)));
        }
        if self.group_size < 2 {
            return Err(CsemError::InvalidArgument(format!("group_size must be at least 2, got {}", self.group_size)));
        }
        Ok(())
    }
}

pub fn group_id_for(anchor: &str) -> String {
    format!("g-{anchor}")
}

/// The `n` most similar rows to `anchor` (similarity descending, then id
/// ascending), skipping `excluded` rows.
fn nearest(ids: &[&str], data: &[f64], dim: usize, anchor: usize, n: usize, excluded: &[bool]) -> Vec<(usize, f64)> {
    let a = &data[anchor * dim..(anchor + 1) * dim];
    let mut top: Vec<(f64, usize)> = Vec::with_capacity(n + 1);
    for (row, v) in data.chunks_exact(dim).enumerate() {
        if row == anchor || excluded[row] {
            continue;
        }
        let s = score(a, v);
        if top.len() == n && s <= top[n - 1].0 {
            continue;
        }
        let pos = top.partition_point(|&(t, r)| t > s || (t == s && ids[r] < ids[row]));
        top.insert(pos, (s, row));
        top.truncate(n);
    }
    top.into_iter().map(|(s, r)| (r, s)).collect()
}

/// Visit charts in id order; each anchors a group iff its `group_size - 1`
/// nearest others all reach the threshold. Groups come out in anchor order.
pub fn group_charts(vectors: &[(String, EmbeddingVector)], cfg: &GroupingConfig) -> Result<Vec<BenchmarkGroup>> {
    cfg.validate()?;
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&a, &b| vectors[a].0.cmp(&vectors[b].0));
    if let Some(w) = order.windows(2).find(|w| vectors[w[0]].0 == vectors[w[1]].0) {
        return Err(CsemError::DuplicateId(vectors[w[0]].0.clone()));
    }
    let need = cfg.group_size - 1;
    if vectors.len() < cfg.group_size {
        return Ok(Vec::new());
    }
    let dim = vectors[order[0]].1.dim();
    let ids: Vec<&str> = order.iter().map(|&i| vectors[i].0.as_str()).collect();
    let mut data = Vec::with_capacity(dim * vectors.len());
    for &i in &order {
        let v = &vectors[i].1;
        if v.dim() != dim {
            return Err(CsemError::DimMismatch { expected: dim, actual: v.dim() });
        }
        data.extend_from_slice(v.values());
    }

    let make = |anchor: usize, nn: Vec<(usize, f64)>| BenchmarkGroup {
        group_id: group_id_for(ids[anchor]),
        target_id: ids[anchor].to_string(),
        distractor_ids: nn.iter().map(|&(r, _)| ids[r].to_string()).collect(),
        anchor_similarities: nn.iter().map(|&(_, s)| s).collect(),
        precise_query: None,
        fuzzy_query: None,
        status: GroupStatus::Candidate,
    };
    let qualifies = |nn: &[(usize, f64)]| nn.len() == need && nn.iter().all(|&(_, s)| s >= cfg.threshold);

    if cfg.distractor_reuse {
        let none = vec![false; ids.len()];
        return Ok((0..ids.len())
            .into_par_iter()
            .filter_map(|a| {
                let nn = nearest(&ids, &data, dim, a, need, &none);
                qualifies(&nn).then(|| make(a, nn))
            })
            .collect());
    }
    let mut used = vec![false; ids.len()];
    let mut groups = Vec::new();
    for a in 0..ids.len() {
        if used[a] {
            continue;
        }
        let nn = nearest(&ids, &data, dim, a, need, &used);
        if qualifies(&nn) {
            used[a] = true;
            nn.iter().for_each(|&(r, _)| used[r] = true);
            groups.push(make(a, nn));
        }
    }
    Ok(groups)
}

/// Crowd-vote record for one query: did each rater pick the target?
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteRecord {
    pub query_id: String,
    pub votes: Vec<bool>,
    #[serde(default = "default_min_agree")]
    pub min_agree: usize,
}

fn default_min_agree() -> usize {
    5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accepted,
    Rejected,
}

impl VoteRecord {
    pub fn validate(&self) -> Result<()> {
        if self.min_agree < 1 || self.min_agree > self.votes.len() {
            return Err(CsemError::validation(
                &self.query_id,
                format!("min_agree {} outside 1..={}", self.min_agree, self.votes.len()),
            ));
        }
        Ok(())
    }
}

/// Accepted iff at least `min_agree` raters chose the target.
pub fn validate_consensus(record: &VoteRecord) -> Verdict {
    if record.votes.iter().filter(|v| **v).count() >= record.min_agree {
        Verdict::Accepted
    } else {
        Verdict::Rejected
    }
}

/// Stand-in for crowd validation: nine seeded raters, each choosing the
/// target with probability `p_true` for discriminative queries and
/// `p_false` otherwise. Test and pipeline scaffolding only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RaterModel {
    pub n_raters: usize,
    pub min_agree: usize,
    pub p_true: f64,
    pub p_false: f64,
}

impl Default for RaterModel {
    fn default() -> Self {
        RaterModel { n_raters: 9, min_agree: 5, p_true: 0.8, p_false: 0.3 }
    }
}

pub fn simulate_votes(queries: &[TextQuery], raters: &RaterModel, seed: u64) -> Vec<VoteRecord> {
    queries
        .iter()
        .map(|q| {
            let mut rng = seeds::rng(seeds::sub_seed(seed, &q.id));
            let p = if q.discriminative { raters.p_true } else { raters.p_false };
            VoteRecord {
                query_id: q.id.clone(),
                votes: (0..raters.n_raters).map(|_| rng.random_bool(p)).collect(),
                min_agree: raters.min_agree,
            }
        })
        .collect()
}

/// Keep accepted queries only. Each group records its accepted queries and
/// is `accepted` if it kept at least one, `rejected` otherwise.
pub fn assemble_benchmark(
    groups: &[BenchmarkGroup],
    queries: &[TextQuery],
    votes: &[VoteRecord],
) -> Result<(Vec<TextQuery>, Vec<BenchmarkGroup>)> {
    let mut verdicts: BTreeMap<&str, Verdict> = BTreeMap::new();
    for v in votes {
        v.validate()?;
        if verdicts.insert(&v.query_id, validate_consensus(v)).is_some() {
            return Err(CsemError::DuplicateId(v.query_id.clone()));
        }
    }
    let group_ids: BTreeSet<&str> = groups.iter().map(|g| g.group_id.as_str()).collect();
    let query_ids: BTreeSet<&str> = queries.iter().map(|q| q.id.as_str()).collect();
    if let Some(v) = votes.iter().find(|v| !query_ids.contains(v.query_id.as_str())) {
        return Err(CsemError::validation(&v.query_id, "vote record for an unknown query"));
    }
    let mut out_groups: Vec<BenchmarkGroup> = groups
        .iter()
        .map(|g| BenchmarkGroup { precise_query: None, fuzzy_query: None, status: GroupStatus::Rejected, ..g.clone() })
        .collect();
    let index: BTreeMap<&str, usize> = groups.iter().enumerate().map(|(i, g)| (g.group_id.as_str(), i)).collect();
    let mut accepted = Vec::new();
    for q in queries {
        if !group_ids.contains(q.group_id.as_str()) {
            return Err(CsemError::validation(&q.id, format!("references unknown group {}", q.group_id)));
        }
        let g = &mut out_groups[index[q.group_id.as_str()]];
        if q.target_chart_id != g.target_id {
            return Err(CsemError::validation(&q.id, "target differs from its group's target"));
        }
        let verdict =
            verdicts.get(q.id.as_str()).ok_or_else(|| CsemError::validation(&q.id, "query has no vote record"))?;
        if *verdict == Verdict::Accepted {
            match q.kind {
                crate::chartcore::QueryKind::Precise => g.precise_query = Some(q.clone()),
                crate::chartcore::QueryKind::Fuzzy => g.fuzzy_query = Some(q.clone()),
            }
            g.status = GroupStatus::Accepted;
            accepted.push(q.clone());
        }
    }
    Ok((accepted, out_groups))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(n_true: usize) -> VoteRecord {
        VoteRecord { query_id: "q".into(), votes: (0..9).map(|i| i < n_true).collect(), min_agree: 5 }
    }

    #[test]
    fn consensus_boundary() {
        assert_eq!(validate_consensus(&rec(4)), Verdict::Rejected);
        assert_eq!(validate_consensus(&rec(5)), Verdict::Accepted);
        assert_eq!(validate_consensus(&rec(6)), Verdict::Accepted);
    }

    #[test]
    fn orthogonal_vectors_make_no_groups() {
        let vs: Vec<(String, EmbeddingVector)> = (0..8)
            .map(|i| {
                let mut v = vec![0.0; 8];
                v[i] = 1.0;
                (format!("c{i}"), EmbeddingVector::normalized(v).unwrap())
            })
            .collect();
        assert!(group_charts(&vs, &GroupingConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn bad_config_rejected() {
        let cfg = GroupingConfig { threshold: 0.0, ..GroupingConfig::default() };
        assert!(group_charts(&[], &cfg).is_err());
    }
}
