//! Contrastive training of the two-tower encoder on (chart, insight) pairs.

mod nce;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use serde::{Deserialize, Serialize};

pub use nce::{info_nce, info_nce_fd_check, relative_error, NceOutput};

use crate::chartcore::{ChartSpec, Insight, InsightLevel};
use crate::encoder::{DualEncoderModel, ModelShape, PreprocessMode, SparseVec, TextFeatures};
use crate::{seeds, CsemError, Result};

pub const CHECKPOINT_FILE: &str = "model.csde";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub levels: BTreeSet<InsightLevel>,
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub temperature: f64,
    pub dim: usize,
    pub seed: u64,
    pub preprocess: PreprocessMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            levels: InsightLevel::ALL.into_iter().collect(),
            batch_size: 64,
            epochs: 20,
            learning_rate: 1e-2,
            momentum: 0.9,
            temperature: crate::encoder::DEFAULT_TEMPERATURE,
            dim: crate::encoder::DEFAULT_DIM,
            seed: 0,
            preprocess: PreprocessMode::direct_resize(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CsemError::InvalidArgument(m));
        if self.levels.is_empty() {
            return bad("at least one insight level is required".into());
        }
        if self.batch_size < 2 {
            return bad(format!("batch_size must be at least 2, got {}", self.batch_size));
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if self.temperature.is_nan() || self.temperature <= 0.0 {
            return bad(format!("temperature must be positive, got {}", self.temperature));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad(format!("momentum must be in [0, 1), got {}", self.momentum));
        }
        if self.dim == 0 {
            return bad("dim must be positive".into());
        }
        Ok(())
    }

    pub fn shape(&self) -> ModelShape {
        ModelShape { dim: self.dim, temperature: self.temperature, ..ModelShape::default() }
    }

    /// The random-init model training starts from; also the untrained
    /// baseline of the ablation.
    pub fn initial_model(&self) -> Result<DualEncoderModel> {
        DualEncoderModel::new(self.shape(), seeds::sub_seed(self.seed, "init"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainPair {
    pub chart_id: String,
    pub text: String,
    pub level: InsightLevel,
}

/// One positive pair per (chart, insight) at a requested level. Returns the
/// pairs and the number of (chart, level) combinations with no insight.
pub fn build_pairs(
    charts: &[ChartSpec],
    insights: &[Insight],
    levels: &BTreeSet<InsightLevel>,
) -> Result<(Vec<TrainPair>, usize)> {
    if levels.is_empty() {
        return Err(CsemError::InvalidArgument("at least one insight level is required".into()));
    }
    let mut by_chart: BTreeMap<&str, Vec<&Insight>> = BTreeMap::new();
    for ins in insights {
        by_chart.entry(ins.chart_id.as_str()).or_default().push(ins);
    }
    let mut pairs = Vec::new();
    let mut missing = 0;
    for chart in charts {
        let own = by_chart.get(chart.id.as_str()).map(Vec::as_slice).unwrap_or(&[]);
        for &level in levels {
            let mut found = false;
            for ins in own.iter().filter(|i| i.level == level && !i.text.trim().is_empty()) {
                pairs.push(TrainPair { chart_id: chart.id.clone(), text: ins.text.clone(), level });
                found = true;
            }
            if !found {
                missing += 1;
            }
        }
    }
    if missing > 0 {
        log::warn!("{missing} requested (chart, level) insights are missing and were skipped");
    }
    Ok((pairs, missing))
}

/// Sparse inputs for every chart and pair, computed once and shared by
/// all training runs that use the same preprocessing.
#[derive(Debug, Clone)]
pub struct PreparedCorpus {
    pub mode: PreprocessMode,
    pub chart_ids: Vec<String>,
    pub chart_x: Vec<SparseVec>,
    pairs: Vec<PreparedPair>,
}

#[derive(Debug, Clone)]
struct PreparedPair {
    chart: usize,
    level: InsightLevel,
    text_x: SparseVec,
}

impl PreparedCorpus {
    pub fn new(charts: &[ChartSpec], insights: &[Insight], mode: PreprocessMode, shape: ModelShape) -> Result<Self> {
        let levels: BTreeSet<InsightLevel> = InsightLevel::ALL.into_iter().collect();
        let probe = DualEncoderModel::zeros(shape)?;
        let chart_x: Vec<SparseVec> = charts.iter().map(|c| probe.chart_features(c, mode).to_sparse()).collect();
        Self::from_parts(charts, insights, &levels, mode, shape, chart_x)
    }

    /// Reuse chart inputs computed elsewhere (one per chart, same order).
    pub fn from_parts(
        charts: &[ChartSpec],
        insights: &[Insight],
        levels: &BTreeSet<InsightLevel>,
        mode: PreprocessMode,
        shape: ModelShape,
        chart_x: Vec<SparseVec>,
    ) -> Result<Self> {
        if chart_x.len() != charts.len() {
            return Err(CsemError::DimMismatch { expected: charts.len(), actual: chart_x.len() });
        }
        let index: BTreeMap<&str, usize> = charts.iter().enumerate().map(|(i, c)| (c.id.as_str(), i)).collect();
        let (pairs, _) = build_pairs(charts, insights, levels)?;
        let pairs = pairs
            .into_iter()
            .map(|p| PreparedPair {
                chart: index[p.chart_id.as_str()],
                level: p.level,
                text_x: TextFeatures::extract(&p.text, shape.text_features).normalized(),
            })
            .collect();
        Ok(PreparedCorpus { mode, chart_ids: charts.iter().map(|c| c.id.clone()).collect(), chart_x, pairs })
    }

    pub fn pair_count(&self, levels: &BTreeSet<InsightLevel>) -> usize {
        self.pairs.iter().filter(|p| levels.contains(&p.level)).count()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainLog {
    /// Mean batch loss per epoch.
    pub epoch_loss: Vec<f64>,
    pub pairs: usize,
    pub steps: usize,
}

impl TrainLog {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,mean_loss\n");
        for (e, l) in self.epoch_loss.iter().enumerate() {
            let _ = writeln!(out, "{},{l}", e + 1);
        }
        out
    }
}

/// A training batch in sparse input form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseBatch {
    pub text_x: Vec<SparseVec>,
    pub chart_x: Vec<SparseVec>,
}

/// Loss and dense weight gradients of one batch. Gradients are accumulated
/// into `gw_text` / `gw_chart` (which must be zeroed by the caller).
fn batch_grad(model: &DualEncoderModel, batch: &SparseBatch, gw_text: &mut [f64], gw_chart: &mut [f64]) -> Result<f64> {
    let d = model.dim();
    let tu: Vec<Vec<f64>> = batch.text_x.iter().map(|x| model.project_text(x)).collect();
    let cu: Vec<Vec<f64>> = batch.chart_x.iter().map(|x| model.project_chart(x)).collect();
    let out = info_nce(&tu, &cu, model.temperature())?;
    for (x, g) in batch.text_x.iter().zip(&out.grad_text) {
        scatter(gw_text, d, x, g);
    }
    for (x, g) in batch.chart_x.iter().zip(&out.grad_chart) {
        scatter(gw_chart, d, x, g);
    }
    Ok(out.loss)
}

fn scatter(gw: &mut [f64], d: usize, x: &SparseVec, g: &[f64]) {
    for &(i, v) in x {
        let row = &mut gw[i as usize * d..(i as usize + 1) * d];
        row.iter_mut().zip(g).for_each(|(r, gk)| *r += v * gk);
    }
}

pub fn batch_loss(model: &DualEncoderModel, batch: &SparseBatch) -> Result<f64> {
    let tu: Vec<Vec<f64>> = batch.text_x.iter().map(|x| model.project_text(x)).collect();
    let cu: Vec<Vec<f64>> = batch.chart_x.iter().map(|x| model.project_chart(x)).collect();
    Ok(info_nce(&tu, &cu, model.temperature())?.loss)
}

/// Train from `cfg.initial_model()` over prepared inputs. Shuffling is
/// seeded per epoch and all sums run in a fixed order, so a config always
/// yields bit-identical weights. With `checkpoint_dir`, the model is
/// written there after every epoch.
pub fn train_prepared(
    prepared: &PreparedCorpus,
    cfg: &TrainConfig,
    checkpoint_dir: Option<&Path>,
) -> Result<(DualEncoderModel, TrainLog)> {
    cfg.validate()?;
    if prepared.mode != cfg.preprocess {
        return Err(CsemError::InvalidArgument(format!(
            "features were prepared with {} but the config asks for {}",
            prepared.mode.kind.as_str(),
            cfg.preprocess.kind.as_str()
        )));
    }
    let pair_idx: Vec<usize> =
        (0..prepared.pairs.len()).filter(|&i| cfg.levels.contains(&prepared.pairs[i].level)).collect();
    if pair_idx.len() < cfg.batch_size {
        return Err(CsemError::InvalidArgument(format!(
            "{} training pairs for levels {:?}, fewer than batch_size {}",
            pair_idx.len(),
            cfg.levels.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
            cfg.batch_size
        )));
    }
    let mut model = cfg.initial_model()?;
    let (nt, nc) = (model.w_text.len(), model.w_chart.len());
    let (mut gt, mut gc) = (vec![0.0; nt], vec![0.0; nc]);
    let (mut vt, mut vc) = (vec![0.0; nt], vec![0.0; nc]);
    let mut log = TrainLog { pairs: pair_idx.len(), ..TrainLog::default() };

    for epoch in 0..cfg.epochs {
        let mut order = pair_idx.clone();
        order.shuffle(&mut seeds::rng(seeds::sub_seed_indexed(cfg.seed, "epoch", epoch as u64)));
        let mut total = 0.0;
        let mut n_batches = 0;
        for chunk in order.chunks(cfg.batch_size).filter(|c| c.len() >= 2) {
            let batch = SparseBatch {
                text_x: chunk.iter().map(|&i| prepared.pairs[i].text_x.clone()).collect(),
                chart_x: chunk.iter().map(|&i| prepared.chart_x[prepared.pairs[i].chart].clone()).collect(),
            };
            total += batch_grad(&model, &batch, &mut gt, &mut gc)?;
            n_batches += 1;
            sgd_step(&mut model.w_text, &mut vt, &mut gt, cfg);
            sgd_step(&mut model.w_chart, &mut vc, &mut gc, cfg);
        }
        log.steps += n_batches;
        let mean = total / n_batches as f64;
        log::info!("epoch {}/{}: mean loss {mean:.5}", epoch + 1, cfg.epochs);
        log.epoch_loss.push(mean);
        if let Some(dir) = checkpoint_dir {
            model.save_checkpoint(&dir.join(CHECKPOINT_FILE))?;
        }
    }
    if model.w_text.iter().chain(&model.w_chart).any(|w| !w.is_finite()) {
        return Err(CsemError::InvalidArgument("training diverged to non-finite weights".into()));
    }
    Ok((model, log))
}

/// `v = momentum * v + g; w -= lr * v; g = 0`.
fn sgd_step(w: &mut [f64], v: &mut [f64], g: &mut [f64], cfg: &TrainConfig) {
    for ((wi, vi), gi) in w.iter_mut().zip(v.iter_mut()).zip(g.iter_mut()) {
        *vi = cfg.momentum * *vi + *gi;
        *wi -= cfg.learning_rate * *vi;
        *gi = 0.0;
    }
}

/// Featurize and train in one call.
pub fn train(
    charts: &[ChartSpec],
    insights: &[Insight],
    cfg: &TrainConfig,
    checkpoint_dir: Option<&Path>,
) -> Result<(DualEncoderModel, TrainLog)> {
    cfg.validate()?;
    let prepared = PreparedCorpus::new(charts, insights, cfg.preprocess, cfg.shape())?;
    train_prepared(&prepared, cfg, checkpoint_dir)
}

/// Central-difference check of the weight gradients on `n_coords` randomly
/// chosen coordinates in rows the batch actually touches (falling back to
/// any coordinate when it touches none). Returns the max relative error.
pub fn grad_check(model: &DualEncoderModel, batch: &SparseBatch, eps: f64, n_coords: usize, seed: u64) -> Result<f64> {
    let d = model.dim();
    let mut gt = vec![0.0; model.w_text.len()];
    let mut gc = vec![0.0; model.w_chart.len()];
    batch_grad(model, batch, &mut gt, &mut gc)?;

    let rows = |xs: &[SparseVec]| -> Vec<usize> {
        xs.iter().flatten().map(|&(i, _)| i as usize).collect::<BTreeSet<_>>().into_iter().collect()
    };
    let (rt, rc) = (rows(&batch.text_x), rows(&batch.chart_x));
    let mut rng = seeds::rng(seed);
    let mut coords = Vec::with_capacity(n_coords);
    for _ in 0..n_coords {
        let text_side = rand::Rng::random_bool(&mut rng, 0.5);
        let (touched, total) = if text_side { (&rt, gt.len() / d) } else { (&rc, gc.len() / d) };
        let row = touched.choose(&mut rng).copied().unwrap_or_else(|| rand::Rng::random_range(&mut rng, 0..total));
        coords.push((text_side, row * d + rand::Rng::random_range(&mut rng, 0..d)));
    }

    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (text_side, idx) in coords {
        let analytic = if text_side { gt[idx] } else { gc[idx] };
        let mut eval = |delta: f64| -> Result<f64> {
            let w = if text_side { &mut probe.w_text } else { &mut probe.w_chart };
            let orig = w[idx];
            w[idx] = orig + delta;
            let loss = batch_loss(&probe, batch);
            let w = if text_side { &mut probe.w_text } else { &mut probe.w_chart };
            w[idx] = orig;
            loss
        };
        let numeric = (eval(eps)? - eval(-eps)?) / (2.0 * eps);
        worst = worst.max(relative_error(analytic, numeric));
    }
    Ok(worst)
}

/// Make a batch of the first `n` pairs of a prepared corpus.
pub fn sample_batch(prepared: &PreparedCorpus, n: usize) -> SparseBatch {
    let take: Vec<&PreparedPair> = prepared.pairs.iter().take(n).collect();
    SparseBatch {
        text_x: take.iter().map(|p| p.text_x.clone()).collect(),
        chart_x: take.iter().map(|p| prepared.chart_x[p.chart].clone()).collect(),
    }
}
