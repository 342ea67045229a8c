use serde::{Deserialize, Serialize};

use super::text::{SparseVec, TextFeatures, DEFAULT_TEXT_BUCKETS};
use crate::chartcore::ChartSpec;
use crate::chartsynth::{rasterize, PixelGrid, TextAnchor};

pub const GRID_SIDE: usize = 32;
pub const GRID_FEATURES: usize = GRID_SIDE * GRID_SIDE;
pub const DEFAULT_CHART_FEATURES: usize = GRID_FEATURES + DEFAULT_TEXT_BUCKETS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreprocessKind {
    DirectResize,
    CenterCrop,
}

impl PreprocessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PreprocessKind::DirectResize => "direct_resize",
            PreprocessKind::CenterCrop => "center_crop",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PreprocessMode {
    pub kind: PreprocessKind,
    /// Output side length in cells.
    pub side: usize,
}

impl PreprocessMode {
    pub const DEFAULT_SIDE: usize = 512;

    pub fn direct_resize() -> Self {
        PreprocessMode { kind: PreprocessKind::DirectResize, side: Self::DEFAULT_SIDE }
    }

    pub fn center_crop() -> Self {
        PreprocessMode { kind: PreprocessKind::CenterCrop, side: Self::DEFAULT_SIDE }
    }

    /// Source window `(x0, y0, x1, y1)` taken from a `w x h` canvas.
    pub fn window(&self, w: usize, h: usize) -> (f64, f64, f64, f64) {
        match self.kind {
            PreprocessKind::DirectResize => (0.0, 0.0, w as f64, h as f64),
            PreprocessKind::CenterCrop => {
                let side = w.min(h) as f64;
                let x0 = (w as f64 - side) / 2.0;
                let y0 = (h as f64 - side) / 2.0;
                (x0, y0, x0 + side, y0 + side)
            }
        }
    }
}

impl Default for PreprocessMode {
    fn default() -> Self {
        PreprocessMode::direct_resize()
    }
}

/// Per-output-cell source spans with overlap weights, for one axis.
fn axis_weights(src0: f64, src1: f64, src_len: usize, dst: usize) -> Vec<Vec<(usize, f64)>> {
    let step = (src1 - src0) / dst as f64;
    (0..dst)
        .map(|i| {
            let a = src0 + step * i as f64;
            let b = a + step;
            let mut w = Vec::new();
            let lo = a.floor().max(0.0) as usize;
            let hi = (b.ceil() as usize).min(src_len);
            for s in lo..hi {
                let ov = b.min(s as f64 + 1.0) - a.max(s as f64);
                if ov > 0.0 {
                    w.push((s, ov / step));
                }
            }
            w
        })
        .collect()
}

/// Area-average the window of `grid` into a `dst_w x dst_h` array.
fn resample(grid: &PixelGrid, window: (f64, f64, f64, f64), dst_w: usize, dst_h: usize) -> Vec<f64> {
    let (x0, y0, x1, y1) = window;
    let wx = axis_weights(x0, x1, grid.w, dst_w);
    let wy = axis_weights(y0, y1, grid.h, dst_h);
    let mut out = vec![0.0; dst_w * dst_h];
    let mut row = vec![0.0; dst_w];
    for (oy, ys) in wy.iter().enumerate() {
        for &(sy, fy) in ys {
            let src = &grid.occupancy[sy * grid.w..(sy + 1) * grid.w];
            for (ox, xs) in wx.iter().enumerate() {
                row[ox] = xs.iter().map(|&(sx, fx)| f64::from(src[sx]) * fx).sum();
            }
            for ox in 0..dst_w {
                out[oy * dst_w + ox] += row[ox] * fy;
            }
        }
    }
    out
}

fn kept_anchors(grid: &PixelGrid, mode: PreprocessMode) -> Vec<TextAnchor> {
    let (x0, y0, x1, y1) = mode.window(grid.w, grid.h);
    let (sx, sy) = (mode.side as f64 / (x1 - x0), mode.side as f64 / (y1 - y0));
    grid.text_anchors
        .iter()
        .filter(|a| a.x >= x0 && a.x <= x1 && a.y >= y0 && a.y <= y1)
        .map(|a| TextAnchor { x: (a.x - x0) * sx, y: (a.y - y0) * sy, ..a.clone() })
        .collect()
}

/// Resize the whole canvas to `side x side`, or crop the largest centered
/// square first. Cropping drops anchors outside the square.
pub fn preprocess(grid: &PixelGrid, mode: PreprocessMode) -> PixelGrid {
    let window = mode.window(grid.w, grid.h);
    let occupancy =
        resample(grid, window, mode.side, mode.side).into_iter().map(|v| (v as f32).clamp(0.0, 1.0)).collect();
    PixelGrid { w: mode.side, h: mode.side, occupancy, text_anchors: kept_anchors(grid, mode) }
}

/// Image-side features: a 32x32 mean-pooled occupancy grid plus hashed
/// n-grams of every text anchor that survives preprocessing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartFeatures {
    pub grid: Vec<f64>,
    pub ocr: TextFeatures,
}

impl ChartFeatures {
    pub fn len(&self) -> usize {
        self.grid.len() + self.ocr.buckets
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sparse projection input: each block scaled to unit norm, grid block
    /// first, OCR buckets offset by the grid length.
    pub fn to_sparse(&self) -> SparseVec {
        let mut out = Vec::new();
        let gn = self.grid.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn > 0.0 {
            out.extend(self.grid.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i as u32, v / gn)));
        }
        let off = self.grid.len() as u32;
        out.extend(self.ocr.normalized().into_iter().map(|(i, v)| (off + i, v)));
        out
    }
}

pub fn features_from_grid(grid: &PixelGrid, mode: PreprocessMode, text_buckets: usize) -> ChartFeatures {
    // pooling the window straight to 32x32 equals preprocess-then-pool for
    // box filters, without materializing the side x side grid
    let pooled = resample(grid, mode.window(grid.w, grid.h), GRID_SIDE, GRID_SIDE)
        .into_iter()
        .map(|v| v.clamp(0.0, 1.0))
        .collect();
    let text: Vec<String> = kept_anchors(grid, mode).into_iter().map(|a| a.text).collect();
    ChartFeatures { grid: pooled, ocr: TextFeatures::extract(&text.join(" "), text_buckets) }
}

/// Render, rasterize, preprocess and featurize a chart. Only rendered
/// geometry and glyph strings reach the features.
pub fn extract_chart_features(spec: &ChartSpec, mode: PreprocessMode) -> ChartFeatures {
    features_from_grid(&rasterize(spec), mode, DEFAULT_TEXT_BUCKETS)
}

/// Mean-pool a square grid to 32x32.
pub fn pool_grid(grid: &PixelGrid) -> Vec<f64> {
    resample(grid, (0.0, 0.0, grid.w as f64, grid.h as f64), GRID_SIDE, GRID_SIDE)
}
