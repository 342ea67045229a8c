//! Python bindings. Structured records cross the boundary as JSON strings
//! in the same shape as the corpus files; vectors are lists of floats.

use std::collections::BTreeMap;
use std::path::PathBuf;

use csem_core::benchgen::{validate_consensus, Verdict, VoteRecord};
use csem_core::encoder::{DualEncoderModel, ModelShape, PreprocessMode};
use csem_core::evalharness::{report_from_ranks, MetricConfig};
use csem_core::pipeline::{run_all, run_stage, synth_corpus, PipelineConfig, Stage, StageOptions};
use csem_core::retrieval::VectorIndex as CoreIndex;
use csem_core::{ChartSpec, CsemError, EmbeddingVector};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

type Matrix = Vec<Vec<f64>>;

fn err(e: CsemError) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyIOError::new_err(e.to_string())
    }
}

fn chart(json: &str) -> PyResult<ChartSpec> {
    serde_json::from_str(json).map_err(|e| PyValueError::new_err(format!("bad chart JSON: {e}")))
}

fn mode(name: &str) -> PyResult<PreprocessMode> {
    match name {
        "direct_resize" => Ok(PreprocessMode::direct_resize()),
        "center_crop" => Ok(PreprocessMode::center_crop()),
        _ => Err(PyValueError::new_err(format!("unknown preprocess mode {name:?}"))),
    }
}

fn vector(values: Vec<f64>) -> PyResult<EmbeddingVector> {
    EmbeddingVector::normalized(values).map_err(err)
}

/// Synthesize `tables` tables and return their charts as JSON strings.
#[pyfunction]
#[pyo3(signature = (seed, tables, max_charts_per_table = 6))]
fn synth_charts(seed: u64, tables: usize, max_charts_per_table: usize) -> PyResult<Vec<String>> {
    let corpus = synth_corpus(seed, tables, max_charts_per_table).map_err(err)?;
    Ok(corpus.charts.iter().map(|c| serde_json::to_string(c).expect("chart serializes")).collect())
}

#[pyfunction]
fn render_svg(chart_json: &str) -> PyResult<String> {
    Ok(csem_core::chartsynth::render_svg(&chart(chart_json)?))
}

/// The three template insights of a chart as `(level, text)` pairs.
#[pyfunction]
fn insights(chart_json: &str) -> PyResult<Vec<(String, String)>> {
    let spec = chart(chart_json)?;
    let out = csem_core::statinsight::synthesize_chart(&spec, None).map_err(err)?;
    Ok(out.iter().map(|i| (i.level.as_str().to_string(), i.text.clone())).collect())
}

/// Symmetric InfoNCE: `(loss, grad_text, grad_chart)` for un-normalized rows.
#[pyfunction]
#[pyo3(signature = (text, chart, tau = 0.07))]
fn info_nce(text: Matrix, chart: Matrix, tau: f64) -> PyResult<(f64, Matrix, Matrix)> {
    let out = csem_core::trainer::info_nce(&text, &chart, tau).map_err(err)?;
    Ok((out.loss, out.grad_text, out.grad_chart))
}

/// Ranking metrics for 1-based target ranks (`None` = not retrieved).
#[pyfunction]
fn metrics(ranks: Vec<Option<usize>>) -> PyResult<BTreeMap<String, f64>> {
    let cfg = MetricConfig::default();
    let ranks = ranks.into_iter().enumerate().map(|(i, r)| (format!("q{i:06}"), r)).collect();
    let report = report_from_ranks(ranks, &cfg, "py");
    let mut out: BTreeMap<String, f64> = report.r_at.iter().map(|(k, v)| (format!("R@{k}"), *v)).collect();
    out.insert("MRR@10".into(), report.mrr_at_10);
    out.insert("NDCG@10".into(), report.ndcg_at_10);
    out.insert("overall".into(), report.overall);
    Ok(out)
}

/// True when at least `min_agree` of the votes approve.
#[pyfunction]
#[pyo3(signature = (votes, min_agree = 5))]
fn consensus(votes: Vec<bool>, min_agree: usize) -> bool {
    validate_consensus(&VoteRecord { query_id: String::new(), votes, min_agree }) == Verdict::Accepted
}

/// Run one pipeline stage (or `all`) and return its summary lines.
#[pyfunction]
#[pyo3(signature = (stage, output, seed = None, tables = None, config_toml = None, dry_run = false))]
fn run_pipeline(
    stage: &str,
    output: PathBuf,
    seed: Option<u64>,
    tables: Option<usize>,
    config_toml: Option<&str>,
    dry_run: bool,
) -> PyResult<Vec<String>> {
    let mut cfg = match config_toml {
        Some(text) => PipelineConfig::from_toml_str(text).map_err(err)?,
        None => PipelineConfig::default(),
    };
    cfg.output = output;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = tables {
        cfg.tables = t;
    }
    let opts = StageOptions { dry_run, remote: false };
    let stage = match stage {
        "all" => return run_all(&cfg, opts).map(|o| o.summary).map_err(err),
        "synth" => Stage::Synth,
        "insights" => Stage::Insights,
        "bench-build" => Stage::BenchBuild,
        "queries" => Stage::Queries,
        "train" => Stage::Train,
        "embed" => Stage::Embed,
        "index" => Stage::Index,
        "eval" => Stage::Eval,
        "ablation" => Stage::Ablation,
        "ocr-eval" => Stage::OcrEval,
        "preprocess-compare" => Stage::PreprocessCompare,
        other => return Err(PyValueError::new_err(format!("unknown stage {other:?}"))),
    };
    run_stage(stage, &cfg, opts).map(|o| o.summary).map_err(err)
}

/// Linear two-tower encoder over hashed text and chart features.
#[pyclass(name = "DualEncoder")]
struct PyDualEncoder {
    inner: DualEncoderModel,
}

#[pymethods]
impl PyDualEncoder {
    #[new]
    #[pyo3(signature = (seed = 0, dim = 128, temperature = 0.07))]
    fn new(seed: u64, dim: usize, temperature: f64) -> PyResult<Self> {
        let shape = ModelShape { dim, temperature, ..ModelShape::default() };
        Ok(PyDualEncoder { inner: DualEncoderModel::new(shape, seed).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyDualEncoder { inner: DualEncoderModel::load_checkpoint(&path).map_err(err)? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save_checkpoint(&path).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn embed_text(&self, text: &str) -> Vec<f64> {
        self.inner.embed_text(text).values().to_vec()
    }

    #[pyo3(signature = (chart_json, preprocess = "direct_resize"))]
    fn embed_chart(&self, chart_json: &str, preprocess: &str) -> PyResult<Vec<f64>> {
        Ok(self.inner.embed_chart(&chart(chart_json)?, mode(preprocess)?).values().to_vec())
    }
}

/// Exact cosine top-k index; ties rank by ascending id.
#[pyclass(name = "VectorIndex")]
struct PyVectorIndex {
    inner: CoreIndex,
}

#[pymethods]
impl PyVectorIndex {
    #[new]
    fn new(ids: Vec<String>, vectors: Vec<Vec<f64>>) -> PyResult<Self> {
        if ids.len() != vectors.len() {
            return Err(PyValueError::new_err("ids and vectors differ in length"));
        }
        let pairs = ids.into_iter().zip(vectors).map(|(id, v)| Ok((id, vector(v)?))).collect::<PyResult<Vec<_>>>()?;
        Ok(PyVectorIndex { inner: CoreIndex::build(pairs).map_err(err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[pyo3(signature = (query, k = 10))]
    fn search(&self, query: Vec<f64>, k: usize) -> PyResult<Vec<(String, f64)>> {
        let ranked = self.inner.search(&vector(query)?, k).map_err(err)?;
        Ok(ranked.entries.into_iter().map(|e| (e.chart_id, e.score)).collect())
    }
}

#[pymodule]
fn csem(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDualEncoder>()?;
    m.add_class::<PyVectorIndex>()?;
    m.add_function(wrap_pyfunction!(synth_charts, m)?)?;
    m.add_function(wrap_pyfunction!(render_svg, m)?)?;
    m.add_function(wrap_pyfunction!(insights, m)?)?;
    m.add_function(wrap_pyfunction!(info_nce, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    m.add_function(wrap_pyfunction!(consensus, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    Ok(())
}
