use std::fs;
use std::io::Write;
use std::path::Path;

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chart::{extract_chart_features, features_from_grid, ChartFeatures, PreprocessMode, GRID_FEATURES};
use super::text::{SparseVec, TextFeatures, DEFAULT_TEXT_BUCKETS};
use crate::chartcore::{ChartSpec, EmbeddingVector};
use crate::chartsynth::PixelGrid;
use crate::{seeds, CsemError, Result};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"CSDE";
pub const DEFAULT_DIM: usize = 128;
pub const DEFAULT_TEMPERATURE: f64 = 0.07;

/// Shape and initialization of a two-tower model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelShape {
    pub text_features: usize,
    pub chart_features: usize,
    pub dim: usize,
    pub temperature: f64,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape {
            text_features: DEFAULT_TEXT_BUCKETS,
            chart_features: GRID_FEATURES + DEFAULT_TEXT_BUCKETS,
            dim: DEFAULT_DIM,
            temperature: DEFAULT_TEMPERATURE,
        }
    }
}

/// Two linear towers into a shared `dim`-dimensional space. Weight rows
/// are per input feature (`features x dim`, row-major), so projecting a
/// sparse input touches only the rows of its non-zero features.
#[derive(Debug, Clone, PartialEq)]
pub struct DualEncoderModel {
    shape: ModelShape,
    init_seed: u64,
    pub(crate) w_text: Vec<f64>,
    pub(crate) w_chart: Vec<f64>,
}

impl DualEncoderModel {
    /// Gaussian init with variance `1/dim`, so unit-norm inputs project to
    /// vectors of norm about one.
    pub fn new(shape: ModelShape, init_seed: u64) -> Result<Self> {
        validate_shape(&shape)?;
        let normal = Normal::new(0.0, 1.0 / (shape.dim as f64).sqrt()).expect("valid std");
        let mut rng = seeds::rng(seeds::sub_seed(init_seed, "w_text"));
        let w_text = (0..shape.text_features * shape.dim).map(|_| normal.sample(&mut rng)).collect();
        let mut rng = seeds::rng(seeds::sub_seed(init_seed, "w_chart"));
        let w_chart = (0..shape.chart_features * shape.dim).map(|_| normal.sample(&mut rng)).collect();
        Ok(DualEncoderModel { shape, init_seed, w_text, w_chart })
    }

    pub fn with_seed(init_seed: u64) -> Self {
        Self::new(ModelShape::default(), init_seed).expect("default shape is valid")
    }

    pub fn zeros(shape: ModelShape) -> Result<Self> {
        validate_shape(&shape)?;
        Ok(DualEncoderModel {
            shape,
            init_seed: 0,
            w_text: vec![0.0; shape.text_features * shape.dim],
            w_chart: vec![0.0; shape.chart_features * shape.dim],
        })
    }

    pub fn from_weights(shape: ModelShape, w_text: Vec<f64>, w_chart: Vec<f64>) -> Result<Self> {
        validate_shape(&shape)?;
        if w_text.len() != shape.text_features * shape.dim {
            return Err(CsemError::DimMismatch { expected: shape.text_features * shape.dim, actual: w_text.len() });
        }
        if w_chart.len() != shape.chart_features * shape.dim {
            return Err(CsemError::DimMismatch { expected: shape.chart_features * shape.dim, actual: w_chart.len() });
        }
        if w_text.iter().chain(&w_chart).any(|w| !w.is_finite()) {
            return Err(CsemError::InvalidArgument("non-finite model weight".into()));
        }
        Ok(DualEncoderModel { shape, init_seed: 0, w_text, w_chart })
    }

    pub fn shape(&self) -> ModelShape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim
    }

    pub fn temperature(&self) -> f64 {
        self.shape.temperature
    }

    pub fn init_seed(&self) -> u64 {
        self.init_seed
    }

    pub fn w_text(&self) -> &[f64] {
        &self.w_text
    }

    pub fn w_chart(&self) -> &[f64] {
        &self.w_chart
    }

    pub fn ocr_buckets(&self) -> usize {
        self.shape.chart_features - GRID_FEATURES
    }

    /// Pre-normalization text projection `W_text^T x`.
    pub fn project_text(&self, x: &SparseVec) -> Vec<f64> {
        project(&self.w_text, self.shape.dim, x)
    }

    pub fn project_chart(&self, x: &SparseVec) -> Vec<f64> {
        project(&self.w_chart, self.shape.dim, x)
    }

    pub fn text_features(&self, text: &str) -> TextFeatures {
        TextFeatures::extract(text, self.shape.text_features)
    }

    pub fn chart_features(&self, spec: &ChartSpec, mode: PreprocessMode) -> ChartFeatures {
        if self.ocr_buckets() == DEFAULT_TEXT_BUCKETS {
            extract_chart_features(spec, mode)
        } else {
            features_from_grid(&crate::chartsynth::rasterize(spec), mode, self.ocr_buckets())
        }
    }

    pub fn grid_features(&self, grid: &PixelGrid, mode: PreprocessMode) -> ChartFeatures {
        features_from_grid(grid, mode, self.ocr_buckets())
    }

    pub fn embed_text(&self, text: &str) -> EmbeddingVector {
        self.embed_text_sparse(&self.text_features(text).normalized())
    }

    pub fn embed_text_sparse(&self, x: &SparseVec) -> EmbeddingVector {
        normalize_or_uniform(self.project_text(x))
    }

    pub fn embed_chart(&self, spec: &ChartSpec, mode: PreprocessMode) -> EmbeddingVector {
        self.embed_chart_features(&self.chart_features(spec, mode))
    }

    pub fn embed_chart_features(&self, f: &ChartFeatures) -> EmbeddingVector {
        self.embed_chart_sparse(&f.to_sparse())
    }

    pub fn embed_chart_sparse(&self, x: &SparseVec) -> EmbeddingVector {
        normalize_or_uniform(self.project_chart(x))
    }

    pub fn embed_texts(&self, texts: &[String]) -> Vec<EmbeddingVector> {
        texts.par_iter().map(|t| self.embed_text(t)).collect()
    }

    pub fn embed_charts(&self, specs: &[ChartSpec], mode: PreprocessMode) -> Vec<EmbeddingVector> {
        specs.par_iter().map(|s| self.embed_chart(s, mode)).collect()
    }

    /// Header `CSDE`, u32 F_t, u32 F_c, u32 d, f32 tau, then both weight
    /// matrices as row-major little-endian f32.
    pub fn save_checkpoint(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(20 + 4 * (self.w_text.len() + self.w_chart.len()));
        buf.extend_from_slice(CHECKPOINT_MAGIC);
        for n in [self.shape.text_features, self.shape.chart_features, self.shape.dim] {
            buf.extend_from_slice(&(n as u32).to_le_bytes());
        }
        buf.extend_from_slice(&(self.shape.temperature as f32).to_le_bytes());
        for w in self.w_text.iter().chain(&self.w_chart) {
            buf.extend_from_slice(&(*w as f32).to_le_bytes());
        }
        let mut f = fs::File::create(path).map_err(|e| CsemError::io(path, e))?;
        f.write_all(&buf).map_err(|e| CsemError::io(path, e))
    }

    /// Weights come back as the f32 values that were written; the init
    /// seed is not part of the format and reads back as 0.
    pub fn load_checkpoint(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| CsemError::io(path, e))?;
        let bad = |message: &str| CsemError::Format { path: path.to_path_buf(), message: message.to_string() };
        if bytes.len() < 20 || &bytes[..4] != CHECKPOINT_MAGIC {
            return Err(bad("missing CSDE header"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes")) as usize;
        let shape = ModelShape {
            text_features: u32_at(4),
            chart_features: u32_at(8),
            dim: u32_at(12),
            temperature: f64::from(f32::from_le_bytes(bytes[16..20].try_into().expect("4 bytes"))),
        };
        let n_text = shape.text_features * shape.dim;
        let n_chart = shape.chart_features * shape.dim;
        if bytes.len() != 20 + 4 * (n_text + n_chart) {
            return Err(bad("weight block length disagrees with header"));
        }
        let mut weights =
            bytes[20..].chunks_exact(4).map(|c| f64::from(f32::from_le_bytes(c.try_into().expect("4 bytes"))));
        let w_text = weights.by_ref().take(n_text).collect();
        let w_chart = weights.collect();
        Self::from_weights(shape, w_text, w_chart).map_err(|e| bad(&e.to_string()))
    }
}

fn validate_shape(shape: &ModelShape) -> Result<()> {
    if shape.dim == 0 || shape.text_features == 0 {
        return Err(CsemError::InvalidArgument("model dimensions must be positive".into()));
    }
    if shape.chart_features <= GRID_FEATURES {
        return Err(CsemError::InvalidArgument(format!("chart features must exceed the {GRID_FEATURES} grid cells")));
    }
    if shape.temperature.is_nan() || shape.temperature <= 0.0 {
        return Err(CsemError::InvalidArgument(format!("temperature must be positive, got {}", shape.temperature)));
    }
    Ok(())
}

pub(crate) fn project(w: &[f64], dim: usize, x: &SparseVec) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for &(i, v) in x {
        let row = &w[i as usize * dim..(i as usize + 1) * dim];
        for (o, r) in out.iter_mut().zip(row) {
            *o += v * r;
        }
    }
    out
}

/// Normalize, falling back to the uniform sentinel for zero or
/// non-finite projections.
pub fn normalize_or_uniform(u: Vec<f64>) -> EmbeddingVector {
    let dim = u.len();
    EmbeddingVector::normalized(u).unwrap_or_else(|_| EmbeddingVector::uniform(dim))
}

/// Dot product of two unit vectors, clamped to [-1, 1].
pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(CsemError::DimMismatch { expected: a.dim(), actual: b.dim() });
    }
    Ok(dot(a.values(), b.values()).clamp(-1.0, 1.0))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ModelShape {
        ModelShape { text_features: 64, chart_features: GRID_FEATURES + 32, dim: 8, temperature: 0.07 }
    }

    #[test]
    fn embeddings_are_unit_norm_and_deterministic() {
        let m = DualEncoderModel::new(small(), 3).unwrap();
        let a = m.embed_text("hotel booking distribution");
        assert!((a.norm() - 1.0).abs() < 1e-9);
        assert_eq!(a, m.embed_text("hotel booking distribution"));
        let other = DualEncoderModel::new(small(), 4).unwrap();
        assert_ne!(a, other.embed_text("hotel booking distribution"));
    }

    #[test]
    fn empty_text_gives_sentinel() {
        let m = DualEncoderModel::new(small(), 3).unwrap();
        assert_eq!(m.embed_text(""), EmbeddingVector::uniform(8));
    }

    #[test]
    fn cosine_cases() {
        let e = |v: Vec<f64>| EmbeddingVector::normalized(v).unwrap();
        assert_eq!(cosine(&e(vec![1.0, 0.0]), &e(vec![0.0, 1.0])).unwrap(), 0.0);
        let c = cosine(&e(vec![1.0, 0.0]), &e(vec![1.0, 1.0])).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(cosine(&e(vec![1.0, 0.0]), &e(vec![1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn rejects_bad_temperature() {
        let mut s = small();
        s.temperature = 0.0;
        assert!(DualEncoderModel::new(s, 1).is_err());
    }

    #[test]
    fn checkpoint_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        let m = DualEncoderModel::new(small(), 9).unwrap();
        m.save_checkpoint(&path).unwrap();
        let back = DualEncoderModel::load_checkpoint(&path).unwrap();
        assert_eq!(back.shape().dim, 8);
        for (a, b) in m.w_text().iter().zip(back.w_text()) {
            assert_eq!(*a as f32, *b as f32);
        }
        back.save_checkpoint(&path).unwrap();
        let again = DualEncoderModel::load_checkpoint(&path).unwrap();
        assert_eq!(again, back);
    }
}
