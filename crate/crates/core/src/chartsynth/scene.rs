//! Chart layout as a flat list of primitives. Both the SVG writer and the
//! rasterizer consume the same scene, so they always agree on geometry.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::style::color;
use crate::chartcore::{format_sig, ChartSpec, ChartType, LineStyle, Marker, PieVariant, XValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextRole {
    Title,
    Subtitle,
    XLabel,
    YLabel,
    Tick,
    Legend,
}

impl TextRole {
    pub fn as_str(self) -> &'static str {
        match self {
            TextRole::Title => "title",
            TextRole::Subtitle => "subtitle",
            TextRole::XLabel => "x_label",
            TextRole::YLabel => "y_label",
            TextRole::Tick => "tick",
            TextRole::Legend => "legend",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextAlign {
    Start,
    Middle,
    End,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextNode {
    pub text: String,
    pub x: f64,
    pub y: f64,
    pub size: f64,
    pub role: TextRole,
    pub align: TextAlign,
    /// Rotated a quarter turn counter-clockwise around the anchor.
    pub rotated: bool,
}

impl TextNode {
    /// Approximate glyph box `(x0, y0, x1, y1)`.
    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        let len = 0.6 * self.size * self.text.chars().count() as f64;
        let (before, after) = match self.align {
            TextAlign::Start => (0.0, len),
            TextAlign::Middle => (len / 2.0, len / 2.0),
            TextAlign::End => (len, 0.0),
        };
        if self.rotated {
            // reading direction runs up the page
            (self.x - 0.8 * self.size, self.y - after, self.x + 0.2 * self.size, self.y + before)
        } else {
            (self.x - before, self.y - 0.8 * self.size, self.x + after, self.y + 0.2 * self.size)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Rect {
        x: f64,
        y: f64,
        w: f64,
        h: f64,
    },
    Segment {
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
        width: f64,
    },
    Polyline {
        points: Vec<(f64, f64)>,
        width: f64,
    },
    Circle {
        cx: f64,
        cy: f64,
        r: f64,
    },
    Triangle {
        cx: f64,
        cy: f64,
        r: f64,
    },
    /// Pie slice; angles clockwise from twelve o'clock. `r_inner > 0` for donuts.
    Wedge {
        cx: f64,
        cy: f64,
        r: f64,
        r_inner: f64,
        start: f64,
        end: f64,
    },
    /// Donut hole, painted in the background color.
    Hole {
        cx: f64,
        cy: f64,
        r: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkClass {
    Data,
    Axis,
    Legend,
    Hole,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mark {
    pub shape: Shape,
    pub color: &'static str,
    pub class: MarkClass,
    pub dash: LineStyle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotArea {
    pub left: f64,
    pub top: f64,
    pub right: f64,
    pub bottom: f64,
}

impl PlotArea {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        const EPS: f64 = 1e-6;
        x >= self.left - EPS && x <= self.right + EPS && y >= self.top - EPS && y <= self.bottom + EPS
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub width: f64,
    pub height: f64,
    pub plot: PlotArea,
    pub marks: Vec<Mark>,
    pub texts: Vec<TextNode>,
}

const AXIS_COLOR: &str = "#333333";
const TEXT_COLOR: &str = "#222222";
pub(crate) const BACKGROUND: &str = "#ffffff";
const MAX_X_TICKS: usize = 12;

pub(crate) fn text_color() -> &'static str {
    TEXT_COLOR
}

struct Linear {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl Linear {
    fn map(&self, v: f64) -> f64 {
        if self.d1 == self.d0 {
            return (self.r0 + self.r1) / 2.0;
        }
        self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
    }
}

fn nice_step(span: f64, target_ticks: f64) -> f64 {
    let raw = (span / target_ticks).max(f64::MIN_POSITIVE);
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

/// Domain `[lo, hi]` widened to nice tick boundaries.
fn nice_domain(lo: f64, hi: f64) -> (f64, f64, f64) {
    let (lo, hi) = if lo == hi { (lo - 1.0, hi + 1.0) } else { (lo, hi) };
    let step = nice_step(hi - lo, 5.0);
    ((lo / step).floor() * step, (hi / step).ceil() * step, step)
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a >= 1e6 {
        format!("{}M", format_sig(v / 1e6, 3).trim_end_matches('0').trim_end_matches('.'))
    } else if a >= 1e4 {
        format!("{}k", format_sig(v / 1e3, 3).trim_end_matches('0').trim_end_matches('.'))
    } else if v == v.round() {
        format!("{}", v as i64)
    } else {
        let s = format_sig(v, 3);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }
}

/// Lay out `spec` on its canvas.
pub fn layout(spec: &ChartSpec) -> Scene {
    let st = &spec.style;
    let (w, h) = (f64::from(st.canvas_w), f64::from(st.canvas_h));
    let band = st.title_band_frac * h;
    let (mx, my) = (st.margin_frac * w, st.margin_frac * h);
    let plot = PlotArea { left: mx, right: w - mx, top: band + 0.6 * my, bottom: h - my };
    let mut scene = Scene { width: w, height: h, plot, marks: Vec::new(), texts: Vec::new() };

    let text =
        |scene: &mut Scene, text: &str, x: f64, y: f64, size: f64, role: TextRole, align: TextAlign, rotated: bool| {
            if !text.is_empty() {
                scene.texts.push(TextNode { text: text.to_string(), x, y, size, role, align, rotated });
            }
        };

    let title_size = (0.55 * band).min(22.0);
    text(
        &mut scene,
        &spec.title,
        w / 2.0,
        0.5 * band + 0.3 * title_size,
        title_size,
        TextRole::Title,
        TextAlign::Middle,
        false,
    );
    text(
        &mut scene,
        &spec.subtitle,
        w / 2.0,
        band + 0.4 * my,
        (0.3 * my).min(12.0),
        TextRole::Subtitle,
        TextAlign::Middle,
        false,
    );
    let label_size = (0.26 * my).min(13.0);
    text(
        &mut scene,
        &spec.x_name,
        (plot.left + plot.right) / 2.0,
        h - 0.2 * my,
        label_size,
        TextRole::XLabel,
        TextAlign::Middle,
        false,
    );
    text(
        &mut scene,
        &spec.y_name,
        0.3 * mx,
        (plot.top + plot.bottom) / 2.0,
        label_size,
        TextRole::YLabel,
        TextAlign::Middle,
        true,
    );

    match spec.chart_type {
        ChartType::Pie => lay_out_pie(spec, &mut scene),
        _ => lay_out_xy(spec, &mut scene),
    }
    scene
}

fn legend(spec: &ChartSpec, scene: &mut Scene, labels: &[String]) {
    let p = scene.plot;
    let size = 10.0;
    for (i, label) in labels.iter().enumerate() {
        let y = p.top + 6.0 + 16.0 * i as f64;
        if y + size > scene.height {
            break;
        }
        scene.marks.push(Mark {
            shape: Shape::Rect { x: p.right + 8.0, y: y - 8.0, w: 8.0, h: 8.0 },
            color: color(&spec.style, i),
            class: MarkClass::Legend,
            dash: LineStyle::Solid,
        });
        scene.texts.push(TextNode {
            text: label.clone(),
            x: p.right + 20.0,
            y,
            size,
            role: TextRole::Legend,
            align: TextAlign::Start,
            rotated: false,
        });
    }
}

fn lay_out_pie(spec: &ChartSpec, scene: &mut Scene) {
    let p = scene.plot;
    let (cx, cy) = ((p.left + p.right) / 2.0, (p.top + p.bottom) / 2.0);
    let r = 0.45 * (p.right - p.left).min(p.bottom - p.top);
    let donut = spec.style.pie_variant == PieVariant::Donut;
    let r_inner = if donut { 0.5 * r } else { 0.0 };
    let pts = &spec.primary_series().points;
    let total: f64 = pts.iter().map(|pt| pt.y.max(0.0)).sum();
    let mut angle = 0.0;
    for (i, pt) in pts.iter().enumerate() {
        let frac = if total > 0.0 { pt.y.max(0.0) / total } else { 1.0 / pts.len() as f64 };
        let end = if i + 1 == pts.len() { TAU } else { angle + frac * TAU };
        if end > angle {
            scene.marks.push(Mark {
                shape: Shape::Wedge { cx, cy, r, r_inner, start: angle, end },
                color: color(&spec.style, i),
                class: MarkClass::Data,
                dash: LineStyle::Solid,
            });
        }
        angle = end;
    }
    if donut {
        scene.marks.push(Mark {
            shape: Shape::Hole { cx, cy, r: r_inner },
            color: BACKGROUND,
            class: MarkClass::Hole,
            dash: LineStyle::Solid,
        });
    }
    let labels: Vec<String> = pts.iter().map(|pt| pt.x.display()).collect();
    legend(spec, scene, &labels);
}

enum XAxis {
    Band { labels: Vec<String> },
    Continuous { scale: Linear, ticks: Vec<(f64, String)> },
}

fn lay_out_xy(spec: &ChartSpec, scene: &mut Scene) {
    let p = scene.plot;
    let stacked = spec.chart_type == ChartType::StackedBar;
    let bars = spec.chart_type.is_bar_family();

    // x axis
    let continuous = spec.series.iter().flat_map(|s| &s.points).all(|pt| pt.x.position().is_some()) && !bars;
    let x_axis = if continuous {
        let positions: Vec<f64> = spec.series.iter().flat_map(|s| &s.points).filter_map(|pt| pt.x.position()).collect();
        let lo = positions.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = positions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = if hi > lo { 0.03 * (hi - lo) } else { 1.0 };
        let scale = Linear { d0: lo - pad, d1: hi + pad, r0: p.left, r1: p.right };
        // tick at data x labels, thinned
        let mut xs: Vec<(f64, String)> = Vec::new();
        for pt in spec.series.iter().flat_map(|s| &s.points) {
            let pos = pt.x.position().unwrap();
            if !xs.iter().any(|(v, _)| *v == pos) {
                xs.push((pos, pt.x.display()));
            }
        }
        xs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if matches!(spec.primary_series().points[0].x, XValue::Num(_)) {
            let (d0, d1, step) = nice_domain(lo, hi);
            xs = std::iter::successors(Some(d0), |v| Some(v + step))
                .take_while(|v| *v <= d1 + step * 1e-9)
                .filter(|v| *v >= lo - pad && *v <= hi + pad)
                .map(|v| (v, tick_label(v)))
                .collect();
        }
        let stride = xs.len().div_ceil(MAX_X_TICKS).max(1);
        let ticks = xs.into_iter().step_by(stride).collect();
        XAxis::Continuous { scale, ticks }
    } else {
        let mut labels: Vec<String> = Vec::new();
        for pt in spec.series.iter().flat_map(|s| &s.points) {
            let l = pt.x.display();
            if !labels.contains(&l) {
                labels.push(l);
            }
        }
        XAxis::Band { labels }
    };

    // y domain
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    if stacked {
        if let XAxis::Band { labels } = &x_axis {
            for l in labels {
                let total: f64 = spec
                    .series
                    .iter()
                    .flat_map(|s| s.points.iter().filter(|pt| pt.x.display() == *l))
                    .map(|pt| pt.y)
                    .sum();
                hi = hi.max(total);
            }
        }
        lo = 0.0;
    } else {
        for pt in spec.series.iter().flat_map(|s| &s.points) {
            lo = lo.min(pt.y);
            hi = hi.max(pt.y);
        }
    }
    if bars {
        lo = lo.min(0.0);
        hi = hi.max(0.0);
    }
    let (y0, y1, ystep) = nice_domain(lo, hi);
    let ys = Linear { d0: y0, d1: y1, r0: p.bottom, r1: p.top };

    // axes
    let axis = |shape| Mark { shape, color: AXIS_COLOR, class: MarkClass::Axis, dash: LineStyle::Solid };
    scene.marks.push(axis(Shape::Segment { x1: p.left, y1: p.bottom, x2: p.right, y2: p.bottom, width: 1.5 }));
    scene.marks.push(axis(Shape::Segment { x1: p.left, y1: p.top, x2: p.left, y2: p.bottom, width: 1.5 }));
    let tick_size = 10.0;
    let mut v = y0;
    while v <= y1 + ystep * 1e-9 {
        let y = ys.map(v);
        scene.marks.push(axis(Shape::Segment { x1: p.left - 4.0, y1: y, x2: p.left, y2: y, width: 1.0 }));
        scene.texts.push(TextNode {
            text: tick_label(v),
            x: p.left - 6.0,
            y: y + 3.0,
            size: tick_size,
            role: TextRole::Tick,
            align: TextAlign::End,
            rotated: false,
        });
        v += ystep;
    }

    let x_tick = |scene: &mut Scene, x: f64, label: String| {
        scene.marks.push(axis(Shape::Segment { x1: x, y1: p.bottom, x2: x, y2: p.bottom + 4.0, width: 1.0 }));
        scene.texts.push(TextNode {
            text: label,
            x,
            y: p.bottom + 16.0,
            size: tick_size,
            role: TextRole::Tick,
            align: TextAlign::Middle,
            rotated: false,
        });
    };

    match &x_axis {
        XAxis::Band { labels } => {
            let n = labels.len().max(1) as f64;
            let band = (p.right - p.left) / n;
            let stride = labels.len().div_ceil(MAX_X_TICKS).max(1);
            for (i, l) in labels.iter().enumerate() {
                if i % stride == 0 {
                    x_tick(scene, p.left + band * (i as f64 + 0.5), l.clone());
                }
            }
            let base = ys.map(0.0f64.clamp(y0, y1));
            let n_series = spec.series.len().max(1);
            let mut stack_tops = vec![0.0f64; labels.len()];
            for (si, s) in spec.series.iter().enumerate() {
                for pt in &s.points {
                    let li = labels.iter().position(|l| *l == pt.x.display()).unwrap();
                    let band_x = p.left + band * li as f64;
                    let (x, bw, y_lo, y_hi) = match spec.chart_type {
                        ChartType::StackedBar => {
                            let y_lo = stack_tops[li];
                            stack_tops[li] += pt.y;
                            (band_x + 0.15 * band, 0.7 * band, y_lo, stack_tops[li])
                        }
                        ChartType::GroupedBar => {
                            let bw = 0.8 * band / n_series as f64;
                            (band_x + 0.1 * band + bw * si as f64, bw, 0.0, pt.y)
                        }
                        _ => (band_x + 0.15 * band, 0.7 * band, 0.0, pt.y),
                    };
                    let (a, b) = (ys.map(y_lo.max(y0)), ys.map(y_hi));
                    let (top, height) = if bars { (a.min(b), (a - b).abs()) } else { (base, 0.0) };
                    if bars {
                        scene.marks.push(Mark {
                            shape: Shape::Rect { x, y: top, w: bw, h: height },
                            color: color(&spec.style, if spec.series.len() > 1 { si } else { 0 }),
                            class: MarkClass::Data,
                            dash: LineStyle::Solid,
                        });
                    }
                }
            }
            // non-bar charts over categorical x (rare): draw lines through band centers
            if !bars {
                for (si, s) in spec.series.iter().enumerate() {
                    let pts: Vec<(f64, f64)> = s
                        .points
                        .iter()
                        .map(|pt| {
                            let li = labels.iter().position(|l| *l == pt.x.display()).unwrap();
                            (p.left + band * (li as f64 + 0.5), ys.map(pt.y))
                        })
                        .collect();
                    series_marks(spec, scene, si, pts);
                }
            }
        }
        XAxis::Continuous { scale, ticks } => {
            for (pos, label) in ticks {
                x_tick(scene, scale.map(*pos), label.clone());
            }
            for (si, s) in spec.series.iter().enumerate() {
                let mut pts: Vec<(f64, f64)> =
                    s.points.iter().map(|pt| (scale.map(pt.x.position().unwrap()), ys.map(pt.y))).collect();
                if spec.chart_type != ChartType::Scatter {
                    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                }
                series_marks(spec, scene, si, pts);
            }
        }
    }

    if spec.series.len() > 1 {
        let labels: Vec<String> = spec.series.iter().map(|s| s.category.clone()).collect();
        legend(spec, scene, &labels);
    }
}

fn series_marks(spec: &ChartSpec, scene: &mut Scene, si: usize, pts: Vec<(f64, f64)>) {
    let c = color(&spec.style, si);
    let scatter = spec.chart_type == ChartType::Scatter;
    if !scatter && pts.len() > 1 {
        scene.marks.push(Mark {
            shape: Shape::Polyline { points: pts.clone(), width: 2.0 },
            color: c,
            class: MarkClass::Data,
            dash: spec.style.line_style,
        });
    }
    let marker = if scatter && spec.style.marker == Marker::None { Marker::Circle } else { spec.style.marker };
    let r = if scatter { 3.5 } else { 3.0 };
    for (x, y) in pts {
        let shape = match marker {
            Marker::None => continue,
            Marker::Circle => Shape::Circle { cx: x, cy: y, r },
            Marker::Square => Shape::Rect { x: x - r, y: y - r, w: 2.0 * r, h: 2.0 * r },
            Marker::Triangle => Shape::Triangle { cx: x, cy: y, r },
        };
        scene.marks.push(Mark { shape, color: c, class: MarkClass::Data, dash: LineStyle::Solid });
    }
}
