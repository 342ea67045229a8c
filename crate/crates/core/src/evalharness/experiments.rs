use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::metrics::{overall_of, rank_of_target, report_from_ranks, MetricConfig};
use crate::chartcore::{ChartSpec, EmbeddingVector, EvalReport, InsightLevel, QueryKind, TextQuery};
use crate::chartsynth::rasterize;
use crate::encoder::{DualEncoderModel, PreprocessMode, SparseVec};
use crate::retrieval::VectorIndex;
use crate::trainer::{train_prepared, PreparedCorpus, TrainConfig};
use crate::{CsemError, Result};

/// Reports for precise queries, fuzzy queries and all queries together.
/// The combined report's `overall` is the six-metric mean over the two kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub precise: EvalReport,
    pub fuzzy: EvalReport,
    pub combined: EvalReport,
}

impl EvalResult {
    pub fn overall(&self) -> f64 {
        self.combined.overall
    }
}

/// Benchmark charts featurized once for a preprocessing mode, so every
/// model under evaluation only pays for the projection.
#[derive(Debug, Clone)]
pub struct EvalPool {
    pub mode: PreprocessMode,
    pub ids: Vec<String>,
    pub chart_x: Vec<SparseVec>,
}

impl EvalPool {
    pub fn new(charts: &[ChartSpec], mode: PreprocessMode, model: &DualEncoderModel) -> Self {
        EvalPool {
            mode,
            ids: charts.iter().map(|c| c.id.clone()).collect(),
            chart_x: charts.iter().map(|c| model.chart_features(c, mode).to_sparse()).collect(),
        }
    }

    pub fn index(&self, model: &DualEncoderModel) -> Result<VectorIndex> {
        VectorIndex::build(
            self.ids.iter().cloned().zip(self.chart_x.iter().map(|x| model.embed_chart_sparse(x))).collect(),
        )
    }
}

/// Rank every query against the index and aggregate by query kind.
pub fn evaluate_vectors(
    index: &VectorIndex,
    queries: &[TextQuery],
    query_vecs: Vec<EmbeddingVector>,
    cfg: &MetricConfig,
    tag: &str,
) -> Result<EvalResult> {
    cfg.validate()?;
    let known: BTreeSet<&str> = index.ids().iter().map(String::as_str).collect();
    let missing: Vec<&str> =
        queries.iter().filter(|q| !known.contains(q.target_chart_id.as_str())).map(|q| q.id.as_str()).collect();
    if !missing.is_empty() {
        return Err(CsemError::InvalidArgument(format!(
            "targets missing from the index for queries: {}",
            missing.join(", ")
        )));
    }
    let batch: Vec<(String, EmbeddingVector)> = queries.iter().map(|q| q.id.clone()).zip(query_vecs).collect();
    let lists = index.batch_search(&batch, cfg.depth())?;
    let mut by_kind: BTreeMap<QueryKind, BTreeMap<String, Option<usize>>> = BTreeMap::new();
    let mut all = BTreeMap::new();
    for (q, list) in queries.iter().zip(&lists) {
        let rank = rank_of_target(list, &q.target_chart_id);
        by_kind.entry(q.kind).or_default().insert(q.id.clone(), rank);
        all.insert(q.id.clone(), rank);
    }
    let precise =
        report_from_ranks(by_kind.remove(&QueryKind::Precise).unwrap_or_default(), cfg, &format!("{tag}/precise"));
    let fuzzy = report_from_ranks(by_kind.remove(&QueryKind::Fuzzy).unwrap_or_default(), cfg, &format!("{tag}/fuzzy"));
    let mut combined = report_from_ranks(all, cfg, tag);
    combined.overall = overall_of(&precise, &fuzzy);
    Ok(EvalResult { precise, fuzzy, combined })
}

pub fn evaluate(
    index: &VectorIndex,
    queries: &[TextQuery],
    model: &DualEncoderModel,
    cfg: &MetricConfig,
    tag: &str,
) -> Result<EvalResult> {
    let vecs = queries.iter().map(|q| model.embed_text(&q.text)).collect();
    evaluate_vectors(index, queries, vecs, cfg, tag)
}

/// Evaluate a model on a featurized pool.
pub fn evaluate_pool(
    pool: &EvalPool,
    queries: &[TextQuery],
    model: &DualEncoderModel,
    cfg: &MetricConfig,
    tag: &str,
) -> Result<EvalResult> {
    evaluate(&pool.index(model)?, queries, model, cfg, tag)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub levels: BTreeSet<InsightLevel>,
    pub result: EvalResult,
}

impl AblationRow {
    pub fn uses(&self, level: InsightLevel) -> bool {
        self.levels.contains(&level)
    }
}

/// The eight level subsets in table order: none, the singletons, the pairs,
/// then all three.
pub fn ablation_subsets() -> Vec<BTreeSet<InsightLevel>> {
    use InsightLevel::*;
    [
        &[][..],
        &[Visual],
        &[Statistics],
        &[Task],
        &[Visual, Task],
        &[Visual, Statistics],
        &[Statistics, Task],
        &[Visual, Statistics, Task],
    ]
    .iter()
    .map(|s| s.iter().copied().collect())
    .collect()
}

/// Train one model per non-empty level subset (same seed and config
/// otherwise) and evaluate all eight, the first being the untrained init.
pub fn run_ablation(
    train: &PreparedCorpus,
    pool: &EvalPool,
    queries: &[TextQuery],
    base: &TrainConfig,
    metrics: &MetricConfig,
) -> Result<Vec<AblationRow>> {
    ablation_subsets()
        .into_iter()
        .map(|levels| {
            let tag = if levels.is_empty() {
                "untrained".to_string()
            } else {
                levels.iter().map(|l| l.as_str()).collect::<Vec<_>>().join("+")
            };
            let model = if levels.is_empty() {
                base.initial_model()?
            } else {
                train_prepared(train, &TrainConfig { levels: levels.clone(), ..base.clone() }, None)?.0
            };
            log::info!("ablation row {tag} trained");
            Ok(AblationRow { result: evaluate_pool(pool, queries, &model, metrics, &tag)?, levels })
        })
        .collect()
}

/// Concatenated text of everything a chart renders, standing in for OCR.
pub fn ocr_text(spec: &ChartSpec) -> String {
    rasterize(spec).ocr_text()
}

/// Text-to-OCR baseline: charts are represented by their rendered text,
/// embedded with the text tower like the queries.
pub fn ocr_baseline(
    charts: &[ChartSpec],
    queries: &[TextQuery],
    model: &DualEncoderModel,
    cfg: &MetricConfig,
) -> Result<EvalResult> {
    let index = VectorIndex::build(charts.iter().map(|c| (c.id.clone(), model.embed_text(&ocr_text(c)))).collect())?;
    evaluate(&index, queries, model, cfg, "text_to_ocr")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDelta {
    pub metric: String,
    pub resize: f64,
    pub crop: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessComparison {
    pub resize: EvalResult,
    pub crop: EvalResult,
    pub deltas: Vec<MetricDelta>,
}

/// Train and evaluate two models that differ only in preprocessing. Each
/// side needs its own prepared training inputs and evaluation pool.
pub fn compare_preprocess(
    train_resize: &PreparedCorpus,
    train_crop: &PreparedCorpus,
    pool_resize: &EvalPool,
    pool_crop: &EvalPool,
    queries: &[TextQuery],
    base: &TrainConfig,
    metrics: &MetricConfig,
) -> Result<PreprocessComparison> {
    let run = |prep: &PreparedCorpus, pool: &EvalPool, tag: &str| -> Result<EvalResult> {
        let cfg = TrainConfig { preprocess: prep.mode, ..base.clone() };
        let (model, _) = train_prepared(prep, &cfg, None)?;
        evaluate_pool(pool, queries, &model, metrics, tag)
    };
    let resize = run(train_resize, pool_resize, "direct_resize")?;
    let crop = run(train_crop, pool_crop, "center_crop")?;
    let deltas = metric_rows(&resize.combined)
        .into_iter()
        .zip(metric_rows(&crop.combined))
        .map(|((name, a), (_, b))| MetricDelta { metric: name, resize: a, crop: b, delta: a - b })
        .collect();
    Ok(PreprocessComparison { resize, crop, deltas })
}

/// Named metric values of a report: every R@k, then MRR@10 and NDCG@10.
pub fn metric_rows(r: &EvalReport) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = r.r_at.iter().map(|(k, v)| (format!("R@{k}"), *v)).collect();
    out.push(("MRR@10".into(), r.mrr_at_10));
    out.push(("NDCG@10".into(), r.ndcg_at_10));
    out
}
