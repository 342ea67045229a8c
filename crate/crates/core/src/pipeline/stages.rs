use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{add_insights, chart_features, synth_corpus, Benchmark, BenchmarkSettings, PipelineConfig};
use crate::benchgen::{assemble_benchmark, gen_queries, simulate_votes, VoteRecord};
use crate::chartcore::{
    load_corpus, load_groups, load_jsonl, load_queries, save_corpus, save_groups, save_jsonl, save_queries,
    BenchmarkGroup, ChartSpec, Corpus, EmbeddingVector, GroupStatus, TextQuery, CHARTS_FILE, GROUPS_FILE, QUERIES_FILE,
};
use crate::chartsynth::render_svg;
use crate::encoder::{remote_embed, DualEncoderModel, EmbedEndpointConfig, PreprocessMode, RemoteInput};
use crate::evalharness::{
    compare_preprocess, evaluate, evaluate_vectors, ocr_baseline, render_ablation_csv, render_ablation_markdown,
    render_comparison_markdown, render_results_csv, render_results_markdown, run_ablation, EvalPool, EvalResult,
};
use crate::retrieval::VectorIndex;
use crate::trainer::{train_prepared, PreparedCorpus, TrainConfig, CHECKPOINT_FILE};
use crate::{CsemError, Result};

pub const VOTES_FILE: &str = "votes.jsonl";
pub const EMBEDDINGS_FILE: &str = "embeddings.bin";
pub const INDEX_FILE: &str = "index.json";
pub const TRAIN_LOG_FILE: &str = "train_log.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Synth,
    Insights,
    BenchBuild,
    Queries,
    Train,
    Embed,
    Index,
    Eval,
    Ablation,
    OcrEval,
    PreprocessCompare,
}

impl Stage {
    /// Stages run by `all`, in order.
    pub const MAIN_FLOW: [Stage; 8] = [
        Stage::Synth,
        Stage::Insights,
        Stage::BenchBuild,
        Stage::Queries,
        Stage::Train,
        Stage::Embed,
        Stage::Index,
        Stage::Eval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Synth => "synth",
            Stage::Insights => "insights",
            Stage::BenchBuild => "bench-build",
            Stage::Queries => "queries",
            Stage::Train => "train",
            Stage::Embed => "embed",
            Stage::Index => "index",
            Stage::Eval => "eval",
            Stage::Ablation => "ablation",
            Stage::OcrEval => "ocr-eval",
            Stage::PreprocessCompare => "preprocess-compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StageOptions {
    /// Validate inputs and configuration without computing or writing.
    pub dry_run: bool,
    /// Use the configured embedding service instead of the local model.
    pub remote: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StageOutcome {
    pub summary: Vec<String>,
    pub written: Vec<PathBuf>,
}

impl StageOutcome {
    fn note(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexManifest {
    pub dim: usize,
    pub count: usize,
    pub ids: Vec<String>,
}

pub fn run_stage(stage: Stage, cfg: &PipelineConfig, opts: StageOptions) -> Result<StageOutcome> {
    cfg.validate()?;
    let mut ctx = Ctx { cfg, out: &cfg.output, opts, outcome: StageOutcome::default() };
    match stage {
        Stage::Synth => ctx.synth()?,
        Stage::Insights => ctx.insights()?,
        Stage::BenchBuild => ctx.bench_build()?,
        Stage::Queries => ctx.queries()?,
        Stage::Train => ctx.train()?,
        Stage::Embed => ctx.embed()?,
        Stage::Index => ctx.index()?,
        Stage::Eval => ctx.eval()?,
        Stage::Ablation => ctx.ablation()?,
        Stage::OcrEval => ctx.ocr_eval()?,
        Stage::PreprocessCompare => ctx.preprocess_compare()?,
    }
    Ok(ctx.outcome)
}

/// Run the main flow from synthesis to evaluation.
pub fn run_all(cfg: &PipelineConfig, opts: StageOptions) -> Result<StageOutcome> {
    if opts.dry_run {
        // later stages would read files the dry run never writes
        cfg.validate()?;
        return Ok(StageOutcome {
            summary: vec![format!(
                "config valid; would run {} into {}",
                Stage::MAIN_FLOW.map(Stage::name).join(", "),
                cfg.output.display()
            )],
            written: Vec::new(),
        });
    }
    let mut all = StageOutcome::default();
    for stage in Stage::MAIN_FLOW {
        let o = run_stage(stage, cfg, opts)?;
        all.summary.extend(o.summary.into_iter().map(|l| format!("{}: {l}", stage.name())));
        all.written.extend(o.written);
    }
    Ok(all)
}

struct Ctx<'a> {
    cfg: &'a PipelineConfig,
    out: &'a Path,
    opts: StageOptions,
    outcome: StageOutcome,
}

fn require(path: &Path, made_by: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(CsemError::MissingDependency(format!("{} not found; run `{made_by}` first", path.display())))
    }
}

impl Ctx<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write(&mut self, name: &str, content: &str) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, content).map_err(|e| CsemError::io(&path, e))?;
        self.outcome.written.push(path);
        Ok(())
    }

    fn corpus(&self) -> Result<Corpus> {
        require(&self.path(CHARTS_FILE), "synth")?;
        load_corpus(self.out)
    }

    fn groups(&self) -> Result<Vec<BenchmarkGroup>> {
        require(&self.path(GROUPS_FILE), "bench-build")?;
        load_groups(&self.path(GROUPS_FILE))
    }

    fn benchmark(&self) -> Result<Benchmark> {
        let groups = self.groups()?;
        require(&self.path(QUERIES_FILE), "queries")?;
        let queries = load_queries(&self.path(QUERIES_FILE))?;
        Ok(Benchmark { groups, queries, votes: Vec::new() })
    }

    fn model(&self) -> Result<DualEncoderModel> {
        require(&self.path(CHECKPOINT_FILE), "train")?;
        DualEncoderModel::load_checkpoint(&self.path(CHECKPOINT_FILE))
    }

    fn ensure_out(&self) -> Result<()> {
        fs::create_dir_all(self.out).map_err(|e| CsemError::io(self.out, e))
    }

    fn synth(&mut self) -> Result<()> {
        let corpus = synth_corpus(self.cfg.seed, self.cfg.tables, self.cfg.max_charts_per_table)?;
        self.outcome.note(format!("{} tables, {} charts", corpus.tables.len(), corpus.charts.len()));
        if self.opts.dry_run {
            return Ok(());
        }
        self.ensure_out()?;
        save_corpus(&corpus, self.out)?;
        self.outcome.written.push(self.path(CHARTS_FILE));
        Ok(())
    }

    fn insights(&mut self) -> Result<()> {
        let mut corpus = self.corpus()?;
        if self.opts.dry_run {
            self.outcome.note(format!("would write insights for {} charts", corpus.charts.len()));
            return Ok(());
        }
        let dropped = add_insights(&mut corpus, self.cfg.llm_endpoint().as_ref());
        // dropped charts leave stale SVGs behind otherwise
        for id in &dropped {
            let _ = fs::remove_file(self.out.join(crate::chartcore::SVG_DIR).join(format!("{id}.svg")));
        }
        self.outcome.note(format!(
            "{} insights for {} charts ({} charts dropped)",
            corpus.insights.len(),
            corpus.charts.len(),
            dropped.len()
        ));
        save_corpus(&corpus, self.out)?;
        self.outcome.written.push(self.path(crate::chartcore::INSIGHTS_FILE));
        Ok(())
    }

    fn bench_build(&mut self) -> Result<()> {
        let corpus = self.corpus()?;
        if self.opts.dry_run {
            self.outcome.note(format!("would group {} charts", corpus.charts.len()));
            return Ok(());
        }
        let features = chart_features(&corpus.charts, PreprocessMode::direct_resize());
        let settings = BenchmarkSettings::from_config(self.cfg);
        let encoder = crate::encoder::GroupingEncoder::new(
            crate::encoder::DEFAULT_CHART_FEATURES,
            crate::encoder::GROUPING_DIM,
            settings.ocr_weight,
            crate::seeds::sub_seed(settings.seed, "grouping"),
        );
        let vectors: Vec<(String, EmbeddingVector)> =
            corpus.charts.iter().map(|c| c.id.clone()).zip(encoder.embed_all(&features)).collect();
        let groups = crate::benchgen::group_charts(&vectors, &settings.grouping)?;
        self.outcome.note(format!("{} candidate groups", groups.len()));
        save_groups(&self.path(GROUPS_FILE), &groups)?;
        self.outcome.written.push(self.path(GROUPS_FILE));
        Ok(())
    }

    fn queries(&mut self) -> Result<()> {
        let corpus = self.corpus()?;
        let groups: Vec<BenchmarkGroup> = self
            .groups()?
            .into_iter()
            .map(|g| BenchmarkGroup { precise_query: None, fuzzy_query: None, status: GroupStatus::Candidate, ..g })
            .collect();
        let threshold = self.cfg.grouping.threshold;
        let n_distractors = self.cfg.grouping.group_size - 1;
        for g in &groups {
            if let Some(v) = g.violations(threshold, n_distractors).into_iter().next() {
                return Err(CsemError::validation(&g.group_id, v));
            }
        }
        let find = |id: &str| -> Result<&ChartSpec> {
            corpus.chart(id).ok_or_else(|| CsemError::validation(id, "group member missing from charts.jsonl"))
        };
        let mut queries = Vec::new();
        for g in &groups {
            let target = find(&g.target_id)?;
            let distractors = g.distractor_ids.iter().map(|d| find(d)).collect::<Result<Vec<_>>>()?;
            if self.opts.dry_run {
                continue;
            }
            let (p, f) = gen_queries(&g.group_id, target, &distractors, self.cfg.llm_endpoint().as_ref())?;
            queries.push(p);
            queries.push(f);
        }
        if self.opts.dry_run {
            self.outcome.note(format!("{} groups resolve", groups.len()));
            return Ok(());
        }
        let votes: Vec<VoteRecord> = match &self.cfg.votes_input {
            Some(path) => load_jsonl(path)?,
            None => simulate_votes(&queries, &self.cfg.raters, crate::seeds::sub_seed(self.cfg.seed, "votes")),
        };
        let (accepted, groups) = assemble_benchmark(&groups, &queries, &votes)?;
        let n_ok = groups.iter().filter(|g| g.status == GroupStatus::Accepted).count();
        self.outcome.note(format!("{} of {} queries accepted; {n_ok} groups kept", accepted.len(), queries.len()));
        save_jsonl(&self.path(VOTES_FILE), &votes)?;
        save_queries(&self.path(QUERIES_FILE), &accepted)?;
        save_groups(&self.path(GROUPS_FILE), &groups)?;
        self.outcome.written.extend([VOTES_FILE, QUERIES_FILE, GROUPS_FILE].map(|f| self.path(f)));
        Ok(())
    }

    /// Accepted-group members, or every chart when no benchmark exists.
    fn pool_and_train(&self, corpus: &Corpus) -> Result<(Vec<ChartSpec>, Vec<ChartSpec>)> {
        if !self.path(GROUPS_FILE).exists() {
            return Ok((corpus.charts.clone(), corpus.charts.clone()));
        }
        let pool_ids: BTreeSet<String> = Benchmark { groups: self.groups()?, ..Benchmark::default() }.pool_ids();
        if pool_ids.is_empty() {
            return Ok((corpus.charts.clone(), corpus.charts.clone()));
        }
        Ok(corpus.charts.iter().cloned().partition(|c| pool_ids.contains(&c.id)))
    }

    fn train(&mut self) -> Result<()> {
        let corpus = self.corpus()?;
        let (pool, train) = self.pool_and_train(&corpus)?;
        let cfg = self.cfg.train_config();
        let held_out = if pool.len() == corpus.charts.len() { 0 } else { pool.len() };
        if self.opts.dry_run {
            self.outcome.note(format!("would train on {} charts ({held_out} held out)", train.len()));
            return Ok(());
        }
        let prepared = PreparedCorpus::new(&train, &corpus.insights, cfg.preprocess, cfg.shape())?;
        let (_, log) = train_prepared(&prepared, &cfg, Some(self.out))?;
        self.outcome.note(format!(
            "{} pairs from {} charts ({held_out} held out), final loss {:.4}",
            log.pairs,
            train.len(),
            log.epoch_loss.last().copied().unwrap_or(f64::NAN)
        ));
        self.outcome.written.push(self.path(CHECKPOINT_FILE));
        self.write(TRAIN_LOG_FILE, &log.to_csv())
    }

    fn remote_cfg(&self) -> Result<EmbedEndpointConfig> {
        self.cfg.embed_endpoint()?.ok_or_else(|| {
            CsemError::InvalidArgument(format!("--remote needs {} or embed_url", crate::encoder::ENV_EMBED_URL))
        })
    }

    fn embed(&mut self) -> Result<()> {
        let corpus = self.corpus()?;
        let (pool, _) = self.pool_and_train(&corpus)?;
        let vectors: Vec<EmbeddingVector> = if self.opts.remote {
            let remote = self.remote_cfg()?;
            if self.opts.dry_run {
                self.outcome.note(format!("would embed {} charts remotely", pool.len()));
                return Ok(());
            }
            let inputs: Vec<RemoteInput> = pool.iter().map(|c| RemoteInput::Svg(render_svg(c))).collect();
            remote_embed(&inputs, &remote)?
        } else {
            let model = self.model()?;
            if self.opts.dry_run {
                self.outcome.note(format!("would embed {} charts", pool.len()));
                return Ok(());
            }
            model.embed_charts(&pool, self.cfg.train.preprocess)
        };
        let index = VectorIndex::build(pool.iter().map(|c| c.id.clone()).zip(vectors).collect())?;
        index.save(&self.path(EMBEDDINGS_FILE))?;
        self.outcome.note(format!("{} chart embeddings of dim {}", index.len(), index.dim()));
        self.outcome.written.push(self.path(EMBEDDINGS_FILE));
        Ok(())
    }

    fn load_index(&self) -> Result<VectorIndex> {
        require(&self.path(EMBEDDINGS_FILE), "embed")?;
        let corpus_ids: Vec<String> =
            load_jsonl::<ChartSpec>(&self.path(CHARTS_FILE))?.into_iter().map(|c| c.id).collect();
        VectorIndex::load(&self.path(EMBEDDINGS_FILE), &corpus_ids)
    }

    fn index(&mut self) -> Result<()> {
        require(&self.path(CHARTS_FILE), "synth")?;
        let index = self.load_index()?;
        self.outcome.note(format!("index of {} vectors, dim {}", index.len(), index.dim()));
        if self.opts.dry_run {
            return Ok(());
        }
        let manifest = IndexManifest { dim: index.dim(), count: index.len(), ids: index.ids().to_vec() };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        self.write(INDEX_FILE, &text)
    }

    fn eval(&mut self) -> Result<()> {
        require(&self.path(INDEX_FILE), "index")?;
        let manifest: IndexManifest = {
            let p = self.path(INDEX_FILE);
            let text = fs::read_to_string(&p).map_err(|e| CsemError::io(&p, e))?;
            serde_json::from_str(&text).map_err(|e| CsemError::Format { path: p.clone(), message: e.to_string() })?
        };
        require(&self.path(EMBEDDINGS_FILE), "embed")?;
        let index = VectorIndex::load(&self.path(EMBEDDINGS_FILE), &manifest.ids)?;
        let bench = self.benchmark()?;
        let metrics = &self.cfg.metrics;
        let result = if self.opts.remote {
            let remote = self.remote_cfg()?;
            if self.opts.dry_run {
                self.outcome.note(format!("would evaluate {} queries remotely", bench.queries.len()));
                return Ok(());
            }
            let inputs: Vec<RemoteInput> = bench.queries.iter().map(|q| RemoteInput::Text(q.text.clone())).collect();
            evaluate_vectors(&index, &bench.queries, remote_embed(&inputs, &remote)?, metrics, "remote")?
        } else {
            let model = self.model()?;
            if self.opts.dry_run {
                self.outcome.note(format!("would evaluate {} queries", bench.queries.len()));
                return Ok(());
            }
            evaluate(&index, &bench.queries, &model, metrics, "dual_encoder")?
        };
        self.note_result(&result.combined.config_tag.clone(), &result);
        self.write_results("eval", &[(result.combined.config_tag.clone(), result)])
    }

    fn note_result(&mut self, name: &str, r: &EvalResult) {
        self.outcome.note(format!(
            "{name}: R@10 precise {:.4} fuzzy {:.4}; overall {:.4}",
            r.precise.recall(10),
            r.fuzzy.recall(10),
            r.overall()
        ));
    }

    fn write_results(&mut self, stem: &str, results: &[(String, EvalResult)]) -> Result<()> {
        let k = &self.cfg.metrics.k_list;
        self.write(&format!("{stem}.md"), &render_results_markdown(results, k))?;
        self.write(&format!("{stem}.csv"), &render_results_csv(results, k))?;
        let json = serde_json::to_string_pretty(results).expect("results serialize") + "\n";
        self.write(&format!("{stem}.json"), &json)
    }

    /// Training inputs and evaluation pool of the held-out split.
    fn experiment_inputs(&self, mode: PreprocessMode) -> Result<(PreparedCorpus, EvalPool, Vec<TextQuery>)> {
        let corpus = self.corpus()?;
        let bench = self.benchmark()?;
        let (pool, train) = self.pool_and_train(&corpus)?;
        let cfg = TrainConfig { preprocess: mode, ..self.cfg.train_config() };
        let prepared = PreparedCorpus::new(&train, &corpus.insights, mode, cfg.shape())?;
        let pool = EvalPool::new(&pool, mode, &DualEncoderModel::zeros(cfg.shape())?);
        Ok((prepared, pool, bench.queries))
    }

    fn ablation(&mut self) -> Result<()> {
        let cfg = self.cfg.train_config();
        if self.opts.dry_run {
            self.benchmark()?;
            self.corpus()?;
            self.outcome.note("would train 7 models and evaluate 8 rows");
            return Ok(());
        }
        let (prepared, pool, queries) = self.experiment_inputs(cfg.preprocess)?;
        let rows = run_ablation(&prepared, &pool, &queries, &cfg, &self.cfg.metrics)?;
        for r in &rows {
            self.note_result(&r.result.combined.config_tag.clone(), &r.result);
        }
        self.write("ablation.md", &render_ablation_markdown(&rows))?;
        self.write("ablation.csv", &render_ablation_csv(&rows))?;
        let json = serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n";
        self.write("ablation.json", &json)
    }

    fn ocr_eval(&mut self) -> Result<()> {
        let model = self.model()?;
        let corpus = self.corpus()?;
        let bench = self.benchmark()?;
        if self.opts.dry_run {
            self.outcome.note(format!("would evaluate {} queries two ways", bench.queries.len()));
            return Ok(());
        }
        let (pool, _) = self.pool_and_train(&corpus)?;
        let mode = self.cfg.train.preprocess;
        let t2c = evaluate(
            &EvalPool::new(&pool, mode, &model).index(&model)?,
            &bench.queries,
            &model,
            &self.cfg.metrics,
            "text_to_chart",
        )?;
        let t2o = ocr_baseline(&pool, &bench.queries, &model, &self.cfg.metrics)?;
        self.note_result("text_to_chart", &t2c);
        self.note_result("text_to_ocr", &t2o);
        self.write_results("ocr_eval", &[("text_to_chart".into(), t2c), ("text_to_ocr".into(), t2o)])
    }

    fn preprocess_compare(&mut self) -> Result<()> {
        if self.opts.dry_run {
            self.benchmark()?;
            self.corpus()?;
            self.outcome.note("would train direct_resize and center_crop models");
            return Ok(());
        }
        let side = self.cfg.train.preprocess.side;
        let resize = PreprocessMode { side, ..PreprocessMode::direct_resize() };
        let crop = PreprocessMode { side, ..PreprocessMode::center_crop() };
        let (prep_r, pool_r, queries) = self.experiment_inputs(resize)?;
        let (prep_c, pool_c, _) = self.experiment_inputs(crop)?;
        let cmp = compare_preprocess(
            &prep_r,
            &prep_c,
            &pool_r,
            &pool_c,
            &queries,
            &self.cfg.train_config(),
            &self.cfg.metrics,
        )?;
        self.note_result("direct_resize", &cmp.resize);
        self.note_result("center_crop", &cmp.crop);
        self.write("preprocess_compare.md", &render_comparison_markdown(&cmp))?;
        let json = serde_json::to_string_pretty(&cmp).expect("comparison serializes") + "\n";
        self.write("preprocess_compare.json", &json)
    }
}
