//! Analytic occupancy rasterization of a chart scene.
//!
//! Each cell holds the summed area fraction covered by primitives, clipped
//! to `[0, 1]`. Rectangles and text boxes are exact; stroked segments
//! deposit `length x width` along the path; circles and wedges use a fixed
//! 4x4 sample pattern per cell.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::scene::{layout, MarkClass, Scene, Shape, TextRole};
use crate::chartcore::ChartSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextAnchor {
    pub text: String,
    pub x: f64,
    pub y: f64,
    pub role: TextRole,
}

/// Row-major occupancy grid with the text found on the canvas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PixelGrid {
    pub w: usize,
    pub h: usize,
    pub occupancy: Vec<f32>,
    pub text_anchors: Vec<TextAnchor>,
}

impl PixelGrid {
    pub fn blank(w: usize, h: usize) -> Self {
        PixelGrid { w, h, occupancy: vec![0.0; w * h], text_anchors: Vec::new() }
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.occupancy[y * self.w + x]
    }

    /// The anchor text joined in canvas order, as an OCR pass would read it.
    pub fn ocr_text(&self) -> String {
        self.text_anchors.iter().map(|a| a.text.as_str()).collect::<Vec<_>>().join(" ")
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.occupancy.len() != self.w * self.h {
            out.push("occupancy size does not match w x h".into());
        }
        if self.occupancy.iter().any(|v| !(0.0..=1.0).contains(v)) {
            out.push("occupancy value outside [0, 1]".into());
        }
        for a in &self.text_anchors {
            if !(a.x >= 0.0 && a.x <= self.w as f64 && a.y >= 0.0 && a.y <= self.h as f64) {
                out.push(format!("anchor {:?} outside the canvas", a.text));
            }
        }
        out
    }

    fn add_rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, weight: f64) {
        let (x0, x1) = (x0.min(x1).max(0.0), x0.max(x1).min(self.w as f64));
        let (y0, y1) = (y0.min(y1).max(0.0), y0.max(y1).min(self.h as f64));
        if x1 <= x0 || y1 <= y0 {
            return;
        }
        for cy in y0.floor() as usize..(y1.ceil() as usize).min(self.h) {
            let oy = (y1.min(cy as f64 + 1.0) - y0.max(cy as f64)).max(0.0);
            if oy == 0.0 {
                continue;
            }
            let row = cy * self.w;
            for cx in x0.floor() as usize..(x1.ceil() as usize).min(self.w) {
                let ox = (x1.min(cx as f64 + 1.0) - x0.max(cx as f64)).max(0.0);
                self.occupancy[row + cx] += (ox * oy * weight) as f32;
            }
        }
    }

    fn add_segment(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, width: f64) {
        let len = ((x2 - x1).powi(2) + (y2 - y1).powi(2)).sqrt();
        if len == 0.0 {
            return;
        }
        // axis-aligned strokes are rectangles
        if x1 == x2 || y1 == y2 {
            let hw = width / 2.0;
            if x1 == x2 {
                self.add_rect(x1 - hw, y1.min(y2), x1 + hw, y1.max(y2), 1.0);
            } else {
                self.add_rect(x1.min(x2), y1 - hw, x1.max(x2), y1 + hw, 1.0);
            }
            return;
        }
        let steps = (len / 0.25).ceil() as usize;
        let dl = len / steps as f64;
        for i in 0..steps {
            let t = (i as f64 + 0.5) / steps as f64;
            let (x, y) = (x1 + t * (x2 - x1), y1 + t * (y2 - y1));
            if x >= 0.0 && y >= 0.0 && (x as usize) < self.w && (y as usize) < self.h {
                self.occupancy[y as usize * self.w + x as usize] += (dl * width) as f32;
            }
        }
    }

    fn add_sampled(&mut self, bbox: (f64, f64, f64, f64), inside: impl Fn(f64, f64) -> bool) {
        let (x0, y0, x1, y1) = bbox;
        let cx0 = x0.floor().max(0.0) as usize;
        let cy0 = y0.floor().max(0.0) as usize;
        let cx1 = (x1.ceil().max(0.0) as usize).min(self.w);
        let cy1 = (y1.ceil().max(0.0) as usize).min(self.h);
        for cy in cy0..cy1 {
            for cx in cx0..cx1 {
                let mut hits = 0u32;
                for sy in 0..4 {
                    for sx in 0..4 {
                        if inside(cx as f64 + (sx as f64 + 0.5) / 4.0, cy as f64 + (sy as f64 + 0.5) / 4.0) {
                            hits += 1;
                        }
                    }
                }
                self.occupancy[cy * self.w + cx] += hits as f32 / 16.0;
            }
        }
    }
}

/// Unit direction of an angle measured clockwise from 12 o'clock.
fn direction(a: f64) -> (f64, f64) {
    (a.sin(), -a.cos())
}

/// Membership test for offsets whose clockwise angle lies in `[a0, a1)`,
/// using cross products instead of per-sample trigonometry.
fn angle_test(a0: f64, a1: f64) -> impl Fn(f64, f64) -> bool {
    let span = a1 - a0;
    let (s, e) = (direction(a0), direction(a1));
    // cross(u, p) > 0 when p is clockwise of u by less than half a turn
    let cross = |u: (f64, f64), px: f64, py: f64| u.0 * py - u.1 * px;
    move |px, py| {
        if span >= TAU {
            true
        } else if span <= PI {
            cross(s, px, py) >= 0.0 && cross(e, px, py) < 0.0
        } else {
            !(cross(e, px, py) >= 0.0 && cross(s, px, py) < 0.0)
        }
    }
}

/// Bounding box of a wedge: its center, arc end points and any compass
/// extremes the arc passes.
fn wedge_bbox(cx: f64, cy: f64, r: f64, a0: f64, a1: f64) -> (f64, f64, f64, f64) {
    if a1 - a0 >= TAU {
        return (cx - r, cy - r, cx + r, cy + r);
    }
    let mut pts = vec![(cx, cy)];
    for a in [a0, a1] {
        let d = direction(a);
        pts.push((cx + r * d.0, cy + r * d.1));
    }
    for k in 0..8 {
        let a = k as f64 * FRAC_PI_2;
        if a > a0 && a < a1 {
            let d = direction(a);
            pts.push((cx + r * d.0, cy + r * d.1));
        }
    }
    let fold = |f: fn(f64, f64) -> f64, init: f64, sel: fn(&(f64, f64)) -> f64| pts.iter().map(sel).fold(init, f);
    (
        fold(f64::min, f64::INFINITY, |p| p.0) - 1.0,
        fold(f64::min, f64::INFINITY, |p| p.1) - 1.0,
        fold(f64::max, f64::NEG_INFINITY, |p| p.0) + 1.0,
        fold(f64::max, f64::NEG_INFINITY, |p| p.1) + 1.0,
    )
}

/// Rasterize `spec` at one cell per canvas pixel.
pub fn rasterize(spec: &ChartSpec) -> PixelGrid {
    rasterize_scene(&layout(spec))
}

pub fn rasterize_scene(scene: &Scene) -> PixelGrid {
    let mut g = PixelGrid::blank(scene.width as usize, scene.height as usize);
    for m in &scene.marks {
        if m.class == MarkClass::Hole {
            continue;
        }
        match &m.shape {
            Shape::Rect { x, y, w, h } => g.add_rect(*x, *y, x + w, y + h, 1.0),
            Shape::Segment { x1, y1, x2, y2, width } => g.add_segment(*x1, *y1, *x2, *y2, *width),
            Shape::Polyline { points, width } => {
                for pair in points.windows(2) {
                    g.add_segment(pair[0].0, pair[0].1, pair[1].0, pair[1].1, *width);
                }
            }
            Shape::Circle { cx, cy, r } => {
                let (cx, cy, r) = (*cx, *cy, *r);
                g.add_sampled((cx - r, cy - r, cx + r, cy + r), |x, y| (x - cx).powi(2) + (y - cy).powi(2) <= r * r);
            }
            Shape::Triangle { cx, cy, r } => {
                let (cx, cy, r) = (*cx, *cy, *r);
                // apex at top, base at cy + r
                g.add_sampled((cx - r, cy - r, cx + r, cy + r), |x, y| {
                    y <= cy + r && (x - cx).abs() <= (y - (cy - r)) / 2.0
                });
            }
            Shape::Wedge { cx, cy, r, r_inner, start, end } => {
                let (cx, cy, r, ri, a0, a1) = (*cx, *cy, *r, *r_inner, *start, *end);
                let inside_angle = angle_test(a0, a1);
                g.add_sampled(wedge_bbox(cx, cy, r, a0, a1), |x, y| {
                    let (dx, dy) = (x - cx, y - cy);
                    let d2 = dx * dx + dy * dy;
                    d2 <= r * r && d2 >= ri * ri && inside_angle(dx, dy)
                });
            }
            Shape::Hole { .. } => {}
        }
    }
    for t in &scene.texts {
        let (x0, y0, x1, y1) = t.bbox();
        g.add_rect(x0, y0, x1, y1, 1.0);
        g.text_anchors.push(TextAnchor {
            text: t.text.clone(),
            x: t.x.clamp(0.0, scene.width),
            y: t.y.clamp(0.0, scene.height),
            role: t.role,
        });
    }
    for v in &mut g.occupancy {
        *v = v.clamp(0.0, 1.0);
    }
    g
}
