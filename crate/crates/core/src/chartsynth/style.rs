use rand::seq::IndexedRandom;
use rand::Rng;

use crate::chartcore::{ChartType, LineStyle, Marker, PieVariant, StyleParams};
use crate::seeds;

pub const PALETTES: [[&str; 6]; 8] = [
    ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948"],
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"],
    ["#003f5c", "#58508d", "#bc5090", "#ff6361", "#ffa600", "#2f4b7c"],
    ["#264653", "#2a9d8f", "#e9c46a", "#f4a261", "#e76f51", "#8ab17d"],
    ["#5b8e7d", "#bc4b51", "#f4e285", "#f4a259", "#8cb369", "#3d5a80"],
    ["#6929c4", "#1192e8", "#005d5d", "#9f1853", "#fa4d56", "#570408"],
    ["#7fc97f", "#beaed4", "#fdc086", "#386cb0", "#f0027f", "#bf5b17"],
    ["#222222", "#555555", "#888888", "#aaaaaa", "#cccccc", "#444444"],
];

/// Draw visual parameters for one chart. Line style and marker only vary
/// for line and scatter charts; the pie/donut switch only for pies.
pub fn randomize_style(seed: u64, chart_type: ChartType) -> StyleParams {
    let mut rng = seeds::rng(seed);
    let palette_id = rng.random_range(0..PALETTES.len()) as u8;
    let (line_style, marker) = match chart_type {
        ChartType::Line | ChartType::GroupedLine => (
            *[LineStyle::Solid, LineStyle::Dashed, LineStyle::Dotted].choose(&mut rng).unwrap(),
            *[Marker::Circle, Marker::Square, Marker::Triangle, Marker::None].choose(&mut rng).unwrap(),
        ),
        ChartType::Scatter => {
            (LineStyle::Solid, *[Marker::Circle, Marker::Square, Marker::Triangle].choose(&mut rng).unwrap())
        }
        _ => (LineStyle::Solid, Marker::None),
    };
    let pie_variant =
        if chart_type == ChartType::Pie && rng.random_bool(0.5) { PieVariant::Donut } else { PieVariant::Pie };
    StyleParams { palette_id, line_style, marker, pie_variant, seed, ..StyleParams::default() }
}

pub(crate) fn color(style: &StyleParams, i: usize) -> &'static str {
    PALETTES[style.palette_id as usize % PALETTES.len()][i % 6]
}
