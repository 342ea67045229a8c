use std::f64::consts::FRAC_PI_2;
use std::fmt::Write;

use super::scene::{layout, text_color, MarkClass, Scene, Shape, TextAlign, BACKGROUND};
use crate::chartcore::{ChartSpec, LineStyle};

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn dash_attr(d: LineStyle) -> &'static str {
    match d {
        LineStyle::Solid => "",
        LineStyle::Dashed => r#" stroke-dasharray="8 4""#,
        LineStyle::Dotted => r#" stroke-dasharray="2 3""#,
    }
}

fn polar(cx: f64, cy: f64, r: f64, a: f64) -> (f64, f64) {
    // clockwise from twelve o'clock
    (cx + r * (a - FRAC_PI_2).cos(), cy + r * (a - FRAC_PI_2).sin())
}

fn wedge_path(cx: f64, cy: f64, r: f64, start: f64, end: f64) -> String {
    let sweep = end - start;
    if sweep >= std::f64::consts::TAU - 1e-9 {
        // a full circle needs two arcs
        return format!(
            "M {:.2} {:.2} A {r:.2} {r:.2} 0 1 1 {:.2} {:.2} A {r:.2} {r:.2} 0 1 1 {:.2} {:.2} Z",
            cx,
            cy - r,
            cx,
            cy + r,
            cx,
            cy - r
        );
    }
    let (x0, y0) = polar(cx, cy, r, start);
    let (x1, y1) = polar(cx, cy, r, end);
    let large = u8::from(sweep > std::f64::consts::PI);
    format!("M {cx:.2} {cy:.2} L {x0:.2} {y0:.2} A {r:.2} {r:.2} 0 {large} 1 {x1:.2} {y1:.2} Z")
}

fn circle_path(cx: f64, cy: f64, r: f64) -> String {
    format!(
        "M {:.2} {cy:.2} A {r:.2} {r:.2} 0 1 0 {:.2} {cy:.2} A {r:.2} {r:.2} 0 1 0 {:.2} {cy:.2} Z",
        cx - r,
        cx + r,
        cx - r
    )
}

/// Render a chart as an SVG 1.1 document using only `rect`, `line`,
/// `circle`, `path` and `text` elements. Output is deterministic.
pub fn render_svg(spec: &ChartSpec) -> String {
    render_scene(&layout(spec))
}

pub fn render_scene(scene: &Scene) -> String {
    let mut s = String::with_capacity(8 * 1024);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = scene.width,
        h = scene.height
    );
    let mut open_group: Option<&'static str> = None;
    for m in &scene.marks {
        let group = match m.class {
            MarkClass::Data => "marks",
            MarkClass::Axis => "axes",
            MarkClass::Legend => "legend",
            MarkClass::Hole => "hole",
        };
        if open_group != Some(group) {
            if open_group.is_some() {
                s.push_str("</g>\n");
            }
            let _ = writeln!(s, r#"<g class="{group}">"#);
            open_group = Some(group);
        }
        let class = match m.class {
            MarkClass::Data => r#" class="mark""#,
            _ => "",
        };
        let c = m.color;
        let _ = match &m.shape {
            Shape::Rect { x, y, w, h } => {
                writeln!(s, r#"<rect{class} x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{c}"/>"#)
            }
            Shape::Segment { x1, y1, x2, y2, width } => writeln!(
                s,
                r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{c}" stroke-width="{width}"/>"#
            ),
            Shape::Polyline { points, width } => {
                let mut d = String::new();
                for (i, (x, y)) in points.iter().enumerate() {
                    let _ = write!(d, "{}{x:.2} {y:.2}", if i == 0 { "M " } else { " L " });
                }
                writeln!(
                    s,
                    r#"<path{class} d="{d}" fill="none" stroke="{c}" stroke-width="{width}"{}/>"#,
                    dash_attr(m.dash)
                )
            }
            Shape::Circle { cx, cy, r } => {
                writeln!(s, r#"<circle{class} cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{c}"/>"#)
            }
            Shape::Triangle { cx, cy, r } => writeln!(
                s,
                r#"<path{class} d="M {:.2} {:.2} L {:.2} {:.2} L {:.2} {:.2} Z" fill="{c}"/>"#,
                cx,
                cy - r,
                cx + r,
                cy + r,
                cx - r,
                cy + r
            ),
            Shape::Wedge { cx, cy, r, start, end, .. } => {
                writeln!(
                    s,
                    r#"<path{class} d="{}" fill="{c}" stroke="{BACKGROUND}" stroke-width="1"/>"#,
                    wedge_path(*cx, *cy, *r, *start, *end)
                )
            }
            Shape::Hole { cx, cy, r } => {
                writeln!(s, r#"<path d="{}" fill="{c}"/>"#, circle_path(*cx, *cy, *r))
            }
        };
    }
    if open_group.is_some() {
        s.push_str("</g>\n");
    }
    s.push_str("<g class=\"text\">\n");
    for t in &scene.texts {
        let anchor = match t.align {
            TextAlign::Start => "start",
            TextAlign::Middle => "middle",
            TextAlign::End => "end",
        };
        let rotate =
            if t.rotated { format!(r#" transform="rotate(-90 {:.2} {:.2})""#, t.x, t.y) } else { String::new() };
        let _ = writeln!(
            s,
            r#"<text data-role="{}" x="{:.2}" y="{:.2}" font-size="{:.1}" font-family="sans-serif" text-anchor="{anchor}" fill="{}"{rotate}>{}</text>"#,
            t.role.as_str(),
            t.x,
            t.y,
            t.size,
            text_color(),
            esc(&t.text)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
