//! Rule-based chart recommendation over a table schema.
//!
//! | columns                          | charts                    |
//! |----------------------------------|---------------------------|
//! | temporal + numeric               | line                      |
//! | categorical + numeric            | bar, pie (<= 10 slices, all >= 0) |
//! | categorical + temporal + numeric | grouped_line              |
//! | 2 categorical + numeric          | grouped_bar, stacked_bar  |
//! | numeric + numeric                | scatter                   |

use rand::seq::IndexedRandom;

use super::style::randomize_style;
use super::vocab;
use crate::chartcore::{temporal_ordinal, Cell, ChartSpec, ChartType, ColumnKind, Point, Series, Table, XValue};
use crate::seeds;

pub const MAX_PIE_SLICES: usize = 10;
const MAX_SERIES: usize = 6;

struct Candidate {
    chart_type: ChartType,
    x: usize,
    y: usize,
    group: Option<usize>,
}

/// Recommend up to `max_charts` chart specs for `table`. Returns an empty
/// list when no column pairing matches a rule.
pub fn recommend_charts(table: &Table, max_charts: usize) -> Vec<ChartSpec> {
    let of_kind = |k: ColumnKind| -> Vec<usize> {
        table.columns.iter().enumerate().filter(|(_, c)| c.kind == k).map(|(i, _)| i).collect()
    };
    let cats = of_kind(ColumnKind::Categorical);
    let nums = of_kind(ColumnKind::Numeric);
    let temps = of_kind(ColumnKind::Temporal);

    // one bucket per rule family, drained round-robin for variety
    let mut buckets: Vec<Vec<Candidate>> = (0..5).map(|_| Vec::new()).collect();
    for &y in &nums {
        for &t in &temps {
            buckets[0].push(Candidate { chart_type: ChartType::Line, x: t, y, group: None });
        }
        for &c in &cats {
            buckets[1].push(Candidate { chart_type: ChartType::Bar, x: c, y, group: None });
            buckets[1].push(Candidate { chart_type: ChartType::Pie, x: c, y, group: None });
        }
        for &c in &cats {
            for &t in &temps {
                buckets[2].push(Candidate { chart_type: ChartType::GroupedLine, x: t, y, group: Some(c) });
            }
        }
        for (i, &c1) in cats.iter().enumerate() {
            for &c2 in &cats[i + 1..] {
                buckets[3].push(Candidate { chart_type: ChartType::GroupedBar, x: c1, y, group: Some(c2) });
                buckets[3].push(Candidate { chart_type: ChartType::StackedBar, x: c1, y, group: Some(c2) });
            }
        }
    }
    for (i, &a) in nums.iter().enumerate() {
        for &b in &nums[i + 1..] {
            buckets[4].push(Candidate { chart_type: ChartType::Scatter, x: a, y: b, group: None });
        }
    }

    let table_seed = seeds::fnv1a64(format!("{}|{}", table.id, table.entity).as_bytes());
    let mut out = Vec::new();
    let mut cursors = vec![0usize; buckets.len()];
    while out.len() < max_charts {
        let mut progressed = false;
        for (b, bucket) in buckets.iter().enumerate() {
            if out.len() >= max_charts {
                break;
            }
            while cursors[b] < bucket.len() {
                let cand = &bucket[cursors[b]];
                cursors[b] += 1;
                let idx = out.len();
                if let Some(spec) = build(table, cand, idx, seeds::sub_seed_indexed(table_seed, "chart", idx as u64)) {
                    out.push(spec);
                    progressed = true;
                    break;
                }
            }
        }
        if !progressed {
            break;
        }
    }
    out
}

fn aggregate(table: &Table, key_col: usize, y: usize, filter: impl Fn(&[Cell]) -> bool) -> Vec<(String, f64)> {
    let additive = vocab::numeric_vocab(table.theme, &table.columns[y].name).is_none_or(|v| v.additive);
    let mut keys: Vec<String> = Vec::new();
    let mut sums: Vec<(f64, usize)> = Vec::new();
    for row in table.rows.iter().filter(|r| filter(r)) {
        let key = match &row[key_col] {
            Cell::Text(s) => s.clone(),
            Cell::Num(v) => v.to_string(),
        };
        let val = row[y].as_f64().unwrap_or(0.0);
        match keys.iter().position(|k| *k == key) {
            Some(i) => {
                sums[i].0 += val;
                sums[i].1 += 1;
            }
            None => {
                keys.push(key);
                sums.push((val, 1));
            }
        }
    }
    let mut out: Vec<(String, f64)> = keys
        .into_iter()
        .zip(sums)
        .map(|(k, (s, n))| {
            let v = if additive { s } else { s / n as f64 };
            (k, (v * 1e6).round() / 1e6)
        })
        .collect();
    if table.columns[key_col].kind == ColumnKind::Temporal {
        out.sort_by(|a, b| temporal_ordinal(&a.0).partial_cmp(&temporal_ordinal(&b.0)).unwrap());
    }
    out
}

fn distinct_in_order(table: &Table, col: usize) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for c in table.column_values(col) {
        if let Some(s) = c.as_str() {
            if !out.iter().any(|o| o == s) {
                out.push(s.to_string());
            }
        }
    }
    out
}

fn points(pairs: Vec<(String, f64)>) -> Vec<Point> {
    pairs.into_iter().map(|(x, y)| Point { x: XValue::Label(x), y }).collect()
}

fn build(table: &Table, cand: &Candidate, idx: usize, seed: u64) -> Option<ChartSpec> {
    let x_name = table.columns[cand.x].name.clone();
    let y_name = table.columns[cand.y].name.clone();
    let (categories, series) = match cand.chart_type {
        ChartType::Line | ChartType::Bar | ChartType::Pie => {
            let pts = aggregate(table, cand.x, cand.y, |_| true);
            if cand.chart_type == ChartType::Pie
                && (pts.len() > MAX_PIE_SLICES
                    || pts.iter().any(|(_, v)| *v < 0.0)
                    || pts.iter().all(|(_, v)| *v == 0.0))
            {
                return None;
            }
            if pts.len() < 2 {
                return None;
            }
            (Vec::new(), vec![Series { category: String::new(), points: points(pts) }])
        }
        ChartType::Scatter => {
            let mut seen = std::collections::BTreeSet::new();
            let mut pts = Vec::new();
            for row in &table.rows {
                let (Some(x), Some(y)) = (row[cand.x].as_f64(), row[cand.y].as_f64()) else {
                    continue;
                };
                if seen.insert(x.to_bits()) {
                    pts.push(Point { x: XValue::Num(x), y });
                }
            }
            if pts.len() < 3 {
                return None;
            }
            (Vec::new(), vec![Series { category: String::new(), points: pts }])
        }
        ChartType::GroupedLine | ChartType::GroupedBar | ChartType::StackedBar => {
            let g = cand.group?;
            let groups: Vec<String> = distinct_in_order(table, g).into_iter().take(MAX_SERIES).collect();
            let mut series = Vec::new();
            for name in &groups {
                let pts = aggregate(table, cand.x, cand.y, |r| r[g].as_str() == Some(name.as_str()));
                // a one-point series carries no shape and no statistics
                if pts.len() >= 2 {
                    series.push(Series { category: name.clone(), points: points(pts) });
                }
            }
            if series.len() < 2 {
                return None;
            }
            if cand.chart_type == ChartType::StackedBar && series.iter().flat_map(|s| &s.points).any(|p| p.y < 0.0) {
                return None;
            }
            (series.iter().map(|s| s.category.clone()).collect(), series)
        }
    };

    let mut rng = seeds::rng(seed);
    let group_name = cand.group.map(|g| table.columns[g].name.clone());
    let title = chart_title(cand.chart_type, &x_name, &y_name, group_name.as_deref(), &table.entity, &series, &mut rng);
    let subtitle = chart_subtitle(table, &series, &mut rng);
    let id = format!("{}-c{idx}", table.id);
    Some(ChartSpec {
        svg_path: format!("svg/{id}.svg"),
        id,
        chart_type: cand.chart_type,
        title,
        subtitle,
        x_name,
        y_name,
        categories,
        series,
        style: randomize_style(seeds::sub_seed(seed, "style"), cand.chart_type),
        source_table_id: table.id.clone(),
        theme: table.theme,
    })
}

pub(crate) fn title_case(s: &str) -> String {
    s.split(' ')
        .map(|w| {
            let mut c = w.chars();
            match c.next() {
                Some(f) => f.to_uppercase().chain(c).collect(),
                None => String::new(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn x_span(series: &[Series]) -> Option<(String, String)> {
    let pts = &series.first()?.points;
    let first = pts.first()?.x.display();
    let last = pts.last()?.x.display();
    temporal_ordinal(&first).and(Some((first, last)))
}

fn chart_title(
    t: ChartType,
    x: &str,
    y: &str,
    group: Option<&str>,
    entity: &str,
    series: &[Series],
    rng: &mut impl rand::Rng,
) -> String {
    let (xc, yc) = (title_case(x), title_case(y));
    let g = group.map(title_case).unwrap_or_default();
    let span = x_span(series).map(|(a, b)| format!("{a} to {b}"));
    let options: Vec<String> = match t {
        ChartType::Line => vec![
            format!("{yc} Over Time at {entity}"),
            format!("{entity} {yc} Trend"),
            format!("{yc} by {xc} for {entity} {}", span.clone().unwrap_or_default()),
        ],
        ChartType::Bar => vec![
            format!("{yc} by {xc} at {entity}"),
            format!("{entity} {yc} Across {xc} Groups"),
            format!("Comparing {yc} per {xc} at {entity}"),
        ],
        ChartType::Pie => vec![
            format!("Share of {yc} by {xc} at {entity}"),
            format!("{entity} {yc} Breakdown by {xc}"),
            format!("How {yc} Splits Across {xc} at {entity}"),
        ],
        ChartType::Scatter => {
            vec![format!("{yc} Versus {xc} at {entity}"), format!("Relationship Between {xc} and {yc} for {entity}")]
        }
        ChartType::GroupedLine => {
            vec![format!("{yc} Over Time by {g} at {entity}"), format!("{entity} {yc} Trends per {g}")]
        }
        ChartType::GroupedBar => {
            vec![format!("{yc} by {xc} and {g} at {entity}"), format!("{entity} {yc} per {xc} Split by {g}")]
        }
        ChartType::StackedBar => {
            vec![format!("{yc} by {xc} Stacked by {g} at {entity}"), format!("{entity} {yc} Composition per {xc}")]
        }
    };
    options.choose(rng).unwrap().trim().to_string()
}

fn chart_subtitle(table: &Table, series: &[Series], rng: &mut impl rand::Rng) -> String {
    match rng.random_range(0..3) {
        0 => String::new(),
        1 => format!("Source: {} {} records", table.entity, table.theme),
        _ => match x_span(series) {
            Some((a, b)) => format!("Period {a} to {b}"),
            None => format!("{} figures", title_case(table.theme.as_str())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartcore::{Column, Theme};

    fn table(columns: Vec<(&str, ColumnKind)>, rows: Vec<Vec<Cell>>) -> Table {
        Table {
            id: "t1".into(),
            theme: Theme::Sales,
            entity: "Acme Retail".into(),
            columns: columns.into_iter().map(|(n, k)| Column { name: n.into(), kind: k }).collect(),
            rows,
        }
    }

    #[test]
    fn temporal_numeric_gives_line() {
        let rows = (0..6).map(|i| vec![Cell::Text(format!("2020-{:02}", i + 1)), Cell::Num(10.0 + i as f64)]).collect();
        let t = table(vec![("month", ColumnKind::Temporal), ("revenue", ColumnKind::Numeric)], rows);
        let charts = recommend_charts(&t, 8);
        let line = charts.iter().find(|c| c.chart_type == ChartType::Line).expect("line chart");
        assert_eq!(line.x_name, "month");
        assert_eq!(line.y_name, "revenue");
        assert!(line.violations().is_empty());
    }

    #[test]
    fn pie_capped_at_ten_slices() {
        let rows = (0..15).map(|i| vec![Cell::Text(format!("R{i}")), Cell::Num(5.0 + i as f64)]).collect();
        let t = table(vec![("region", ColumnKind::Categorical), ("count", ColumnKind::Numeric)], rows);
        let charts = recommend_charts(&t, 8);
        assert!(charts.iter().any(|c| c.chart_type == ChartType::Bar));
        assert!(!charts.iter().any(|c| c.chart_type == ChartType::Pie));
    }

    #[test]
    fn pie_requires_nonnegative() {
        let rows = (0..4).map(|i| vec![Cell::Text(format!("R{i}")), Cell::Num(i as f64 - 1.5)]).collect();
        let t = table(vec![("region", ColumnKind::Categorical), ("net change", ColumnKind::Numeric)], rows);
        assert!(!recommend_charts(&t, 8).iter().any(|c| c.chart_type == ChartType::Pie));
    }

    #[test]
    fn no_valid_pairing_is_empty() {
        let rows = (0..5).map(|i| vec![Cell::Text(format!("R{i}"))]).collect();
        let t = table(vec![("region", ColumnKind::Categorical)], rows);
        assert!(recommend_charts(&t, 8).is_empty());
    }

    #[test]
    fn two_categoricals_give_grouped_and_stacked() {
        let mut rows = Vec::new();
        for a in ["North", "South", "East"] {
            for b in ["Online", "Outlet"] {
                rows.push(vec![Cell::Text(a.into()), Cell::Text(b.into()), Cell::Num(3.0)]);
            }
        }
        let t = table(
            vec![
                ("region", ColumnKind::Categorical),
                ("sale method", ColumnKind::Categorical),
                ("revenue", ColumnKind::Numeric),
            ],
            rows,
        );
        let charts = recommend_charts(&t, 10);
        let grouped = charts.iter().find(|c| c.chart_type == ChartType::GroupedBar).unwrap();
        assert_eq!(grouped.categories, vec!["Online", "Outlet"]);
        assert!(charts.iter().any(|c| c.chart_type == ChartType::StackedBar));
    }

    #[test]
    fn respects_max_charts() {
        let mut rows = Vec::new();
        for (i, a) in ["North", "South", "East"].iter().enumerate() {
            for y in 0..4 {
                rows.push(vec![
                    Cell::Text(a.to_string()),
                    Cell::Text(format!("{}", 2000 + y)),
                    Cell::Num(1.0 + i as f64 + y as f64),
                    Cell::Num(2.0 * y as f64 + i as f64),
                ]);
            }
        }
        let t = table(
            vec![
                ("region", ColumnKind::Categorical),
                ("year", ColumnKind::Temporal),
                ("revenue", ColumnKind::Numeric),
                ("units sold", ColumnKind::Numeric),
            ],
            rows,
        );
        for max in 1..=8 {
            let charts = recommend_charts(&t, max);
            assert!(!charts.is_empty() && charts.len() <= max);
        }
    }
}
