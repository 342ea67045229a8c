//! Seeded end-to-end orchestration: corpus synthesis, insights, benchmark
//! construction, training, indexing and evaluation.
//!
//! One master seed drives everything; each stage draws its own sub-seed
//! with [`seeds::sub_seed`] so stages can be re-run independently.

mod config;
mod stages;

use std::collections::BTreeSet;

pub use config::PipelineConfig;
pub use stages::*;

use crate::benchgen::{
    assemble_benchmark, gen_queries, group_charts, simulate_votes, GroupingConfig, RaterModel, VoteRecord,
};
use crate::chartcore::{BenchmarkGroup, ChartSpec, Corpus, GroupStatus, Insight, TextQuery};
use crate::chartsynth::{gen_table, recommend_charts, SchemaProfile};
use crate::encoder::{
    extract_chart_features, ChartFeatures, DualEncoderModel, GroupingEncoder, PreprocessMode, DEFAULT_CHART_FEATURES,
    GROUPING_DIM,
};
use crate::evalharness::EvalPool;
use crate::statinsight::{synthesize_all, EndpointConfig};
use crate::trainer::{PreparedCorpus, TrainConfig};
use crate::{seeds, Result};

/// Tables `0..n_tables` and their recommended charts.
pub fn synth_corpus(seed: u64, n_tables: usize, max_charts_per_table: usize) -> Result<Corpus> {
    let mut corpus = Corpus::default();
    for i in 0..n_tables as u64 {
        let profile = SchemaProfile::random(seeds::sub_seed_indexed(seed, "profile", i));
        let table = gen_table(seeds::sub_seed_indexed(seed, "table", i), &profile)?;
        corpus.charts.extend(recommend_charts(&table, max_charts_per_table));
        corpus.tables.push(table);
    }
    corpus.canonicalize();
    Ok(corpus)
}

/// Attach three insights per chart. Charts whose statistics cannot be
/// computed are dropped (with their ids returned) so the corpus keeps
/// exactly three insights per chart.
pub fn add_insights(corpus: &mut Corpus, backend: Option<&EndpointConfig>) -> Vec<String> {
    let synthesis = synthesize_all(&corpus.charts, backend);
    let dropped: BTreeSet<String> = synthesis.skipped.iter().map(|(id, _)| id.clone()).collect();
    for (id, why) in &synthesis.skipped {
        log::debug!("dropping chart {id}: {why}");
    }
    corpus.charts.retain(|c| !dropped.contains(&c.id));
    corpus.insights = synthesis.insights;
    corpus.canonicalize();
    dropped.into_iter().collect()
}

pub fn chart_features(charts: &[ChartSpec], mode: PreprocessMode) -> Vec<ChartFeatures> {
    use rayon::prelude::*;
    charts.par_iter().map(|c| extract_chart_features(c, mode)).collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Benchmark {
    /// Every group found, with its validation status.
    pub groups: Vec<BenchmarkGroup>,
    /// Accepted queries only.
    pub queries: Vec<TextQuery>,
    pub votes: Vec<VoteRecord>,
}

impl Benchmark {
    /// Charts of groups that kept at least one query: the retrieval pool.
    pub fn pool_ids(&self) -> BTreeSet<String> {
        self.groups
            .iter()
            .filter(|g| g.status == GroupStatus::Accepted)
            .flat_map(|g| std::iter::once(g.target_id.clone()).chain(g.distractor_ids.iter().cloned()))
            .collect()
    }

    pub fn accepted_groups(&self) -> usize {
        self.groups.iter().filter(|g| g.status == GroupStatus::Accepted).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSettings {
    pub grouping: GroupingConfig,
    pub ocr_weight: f64,
    pub raters: RaterModel,
    pub seed: u64,
}

impl BenchmarkSettings {
    pub fn from_config(cfg: &PipelineConfig) -> Self {
        BenchmarkSettings {
            grouping: cfg.grouping.clone(),
            ocr_weight: cfg.grouping_ocr_weight,
            raters: cfg.raters.clone(),
            seed: cfg.seed,
        }
    }
}

/// Group charts by visual similarity, write queries for every group and
/// keep those that pass simulated consensus voting. `features` are the
/// charts' direct-resize features, in chart order.
pub fn build_benchmark(
    charts: &[ChartSpec],
    features: &[ChartFeatures],
    settings: &BenchmarkSettings,
    backend: Option<&EndpointConfig>,
) -> Result<Benchmark> {
    let encoder = GroupingEncoder::new(
        DEFAULT_CHART_FEATURES,
        GROUPING_DIM,
        settings.ocr_weight,
        seeds::sub_seed(settings.seed, "grouping"),
    );
    let vectors: Vec<_> = charts.iter().map(|c| c.id.clone()).zip(encoder.embed_all(features)).collect();
    let groups = group_charts(&vectors, &settings.grouping)?;
    log::info!("{} candidate groups from {} charts", groups.len(), charts.len());
    let by_id = |id: &str| -> &ChartSpec {
        let i = charts.binary_search_by(|c| c.id.as_str().cmp(id)).expect("grouped ids come from the chart list");
        &charts[i]
    };
    let mut queries = Vec::with_capacity(groups.len() * 2);
    for g in &groups {
        let distractors: Vec<&ChartSpec> = g.distractor_ids.iter().map(|d| by_id(d)).collect();
        let (p, f) = gen_queries(&g.group_id, by_id(&g.target_id), &distractors, backend)?;
        queries.push(p);
        queries.push(f);
    }
    let votes = simulate_votes(&queries, &settings.raters, seeds::sub_seed(settings.seed, "votes"));
    let (accepted, groups) = assemble_benchmark(&groups, &queries, &votes)?;
    Ok(Benchmark { groups, queries: accepted, votes })
}

/// A corpus with insights, its benchmark, and the held-out split: charts
/// in accepted groups form the retrieval pool and never appear in training.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub charts: Vec<ChartSpec>,
    pub insights: Vec<Insight>,
    pub resize_features: Vec<ChartFeatures>,
    pub benchmark: Benchmark,
    pub pool: Vec<usize>,
    pub train: Vec<usize>,
}

impl Experiment {
    /// Synthesize tables until `n_charts` charts exist (truncating the
    /// last table's charts), then build insights and the benchmark.
    pub fn build(cfg: &PipelineConfig, n_charts: usize) -> Result<Experiment> {
        let mut corpus = Corpus::default();
        let mut i = 0u64;
        while corpus.charts.len() < n_charts {
            let profile = SchemaProfile::random(seeds::sub_seed_indexed(cfg.seed, "profile", i));
            let table = gen_table(seeds::sub_seed_indexed(cfg.seed, "table", i), &profile)?;
            let room = n_charts - corpus.charts.len();
            let charts = recommend_charts(&table, cfg.max_charts_per_table.min(room));
            // only charts with computable statistics count toward the total
            let mut probe = Corpus { tables: Vec::new(), charts, insights: Vec::new() };
            add_insights(&mut probe, None);
            corpus.charts.extend(probe.charts);
            corpus.insights.extend(probe.insights);
            corpus.tables.push(table);
            i += 1;
        }
        corpus.canonicalize();
        Self::from_corpus(cfg, corpus.charts, corpus.insights)
    }

    pub fn from_corpus(cfg: &PipelineConfig, charts: Vec<ChartSpec>, insights: Vec<Insight>) -> Result<Experiment> {
        let resize_features = chart_features(&charts, PreprocessMode::direct_resize());
        let benchmark = build_benchmark(&charts, &resize_features, &BenchmarkSettings::from_config(cfg), None)?;
        let pool_ids = benchmark.pool_ids();
        let (pool, train) = (0..charts.len()).partition(|&i| pool_ids.contains(&charts[i].id));
        Ok(Experiment { charts, insights, resize_features, benchmark, pool, train })
    }

    pub fn pool_charts(&self) -> Vec<ChartSpec> {
        self.pool.iter().map(|&i| self.charts[i].clone()).collect()
    }

    pub fn train_charts(&self) -> Vec<ChartSpec> {
        self.train.iter().map(|&i| self.charts[i].clone()).collect()
    }

    fn features(&self, idx: &[usize], mode: PreprocessMode) -> Vec<ChartFeatures> {
        if mode == PreprocessMode::direct_resize() {
            idx.iter().map(|&i| self.resize_features[i].clone()).collect()
        } else {
            let charts: Vec<ChartSpec> = idx.iter().map(|&i| self.charts[i].clone()).collect();
            chart_features(&charts, mode)
        }
    }

    /// Training inputs for a preprocessing mode (all insight levels).
    pub fn prepared(&self, cfg: &TrainConfig) -> Result<PreparedCorpus> {
        let x = self.features(&self.train, cfg.preprocess).iter().map(ChartFeatures::to_sparse).collect();
        let levels = crate::chartcore::InsightLevel::ALL.into_iter().collect();
        PreparedCorpus::from_parts(&self.train_charts(), &self.insights, &levels, cfg.preprocess, cfg.shape(), x)
    }

    pub fn eval_pool(&self, mode: PreprocessMode) -> EvalPool {
        EvalPool {
            mode,
            ids: self.pool.iter().map(|&i| self.charts[i].id.clone()).collect(),
            chart_x: self.features(&self.pool, mode).iter().map(ChartFeatures::to_sparse).collect(),
        }
    }
}

/// The untrained model a config starts from.
pub fn untrained(cfg: &TrainConfig) -> Result<DualEncoderModel> {
    cfg.initial_model()
}
