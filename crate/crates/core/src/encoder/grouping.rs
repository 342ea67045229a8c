use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::chart::{ChartFeatures, GRID_FEATURES};
use super::model::{normalize_or_uniform, project};
use super::text::SparseVec;
use crate::chartcore::EmbeddingVector;
use crate::seeds;

pub const GROUPING_DIM: usize = 768;

/// Fixed, untrained visual-similarity encoder used to find distractors:
/// a seeded Gaussian projection of the pooled grid plus down-weighted
/// rendered-text n-grams.
#[derive(Debug, Clone)]
pub struct GroupingEncoder {
    pub dim: usize,
    pub ocr_weight: f64,
    input: usize,
    w: Vec<f64>,
}

impl GroupingEncoder {
    pub const DEFAULT_OCR_WEIGHT: f64 = 0.35;

    pub fn new(chart_features: usize, dim: usize, ocr_weight: f64, seed: u64) -> Self {
        let normal = Normal::new(0.0, 1.0 / (dim as f64).sqrt()).expect("valid std");
        let mut rng = seeds::rng(seeds::sub_seed(seed, "grouping"));
        let w = (0..chart_features * dim).map(|_| normal.sample(&mut rng)).collect();
        GroupingEncoder { dim, ocr_weight, input: chart_features, w }
    }

    pub fn input_len(&self) -> usize {
        self.input
    }

    pub fn weighted(&self, f: &ChartFeatures) -> SparseVec {
        f.to_sparse()
            .into_iter()
            .map(|(i, v)| if (i as usize) < GRID_FEATURES { (i, v) } else { (i, v * self.ocr_weight) })
            .collect()
    }

    pub fn embed(&self, f: &ChartFeatures) -> EmbeddingVector {
        normalize_or_uniform(project(&self.w, self.dim, &self.weighted(f)))
    }

    pub fn embed_all(&self, features: &[ChartFeatures]) -> Vec<EmbeddingVector> {
        features.par_iter().map(|f| self.embed(f)).collect()
    }
}
