use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{CsemError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Categorical,
    Numeric,
    Temporal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

/// One table cell. Categorical and temporal cells are text; temporal text
/// is `YYYY` or `YYYY-MM`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            Cell::Num(_) => None,
        }
    }

    fn matches(&self, kind: ColumnKind) -> bool {
        match (kind, self) {
            (ColumnKind::Numeric, Cell::Num(v)) => v.is_finite(),
            (ColumnKind::Categorical, Cell::Text(s)) => !s.trim().is_empty(),
            (ColumnKind::Temporal, Cell::Text(s)) => temporal_ordinal(s).is_some(),
            _ => false,
        }
    }
}

/// Position of a `YYYY` or `YYYY-MM` label on a continuous year axis.
pub fn temporal_ordinal(label: &str) -> Option<f64> {
    let (year, month) = match label.split_once('-') {
        Some((y, m)) => (y, Some(m)),
        None => (label, None),
    };
    if year.len() != 4 || !year.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let y: f64 = year.parse().ok()?;
    match month {
        None => Some(y),
        Some(m) => {
            if m.len() != 2 {
                return None;
            }
            let m: u32 = m.parse().ok()?;
            (1..=12).contains(&m).then(|| y + f64::from(m - 1) / 12.0)
        }
    }
}

/// Vocabulary theme of a synthetic table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theme {
    Sales,
    Population,
    Temperature,
    Bookings,
    Income,
    Energy,
    Traffic,
    Ratings,
    Inventory,
    Budget,
    Enrollment,
    Emissions,
}

impl Theme {
    pub const ALL: [Theme; 12] = [
        Theme::Sales,
        Theme::Population,
        Theme::Temperature,
        Theme::Bookings,
        Theme::Income,
        Theme::Energy,
        Theme::Traffic,
        Theme::Ratings,
        Theme::Inventory,
        Theme::Budget,
        Theme::Enrollment,
        Theme::Emissions,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Theme::Sales => "sales",
            Theme::Population => "population",
            Theme::Temperature => "temperature",
            Theme::Bookings => "bookings",
            Theme::Income => "income",
            Theme::Energy => "energy",
            Theme::Traffic => "traffic",
            Theme::Ratings => "ratings",
            Theme::Inventory => "inventory",
            Theme::Budget => "budget",
            Theme::Enrollment => "enrollment",
            Theme::Emissions => "emissions",
        }
    }

    pub fn parse(s: &str) -> Option<Theme> {
        Theme::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for Theme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub id: String,
    pub theme: Theme,
    /// Organization the data is attributed to, used in chart titles.
    pub entity: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column_values(&self, idx: usize) -> impl Iterator<Item = &Cell> + '_ {
        self.rows.iter().map(move |r| &r[idx])
    }

    /// All invariant violations, as human-readable messages.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut names = std::collections::BTreeSet::new();
        for c in &self.columns {
            if c.name.trim().is_empty() {
                out.push("column with empty name".to_string());
            }
            if !names.insert(c.name.as_str()) {
                out.push(format!("duplicate column name {:?}", c.name));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                out.push(format!("row {i} has {} cells but the table has {} columns", row.len(), self.columns.len()));
                continue;
            }
            for (cell, col) in row.iter().zip(&self.columns) {
                if !cell.matches(col.kind) {
                    out.push(format!("row {i}: cell {cell:?} does not parse as {:?} column {:?}", col.kind, col.name));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartType {
    Bar,
    Pie,
    Line,
    Scatter,
    GroupedLine,
    StackedBar,
    GroupedBar,
}

impl ChartType {
    pub const ALL: [ChartType; 7] = [
        ChartType::Bar,
        ChartType::Pie,
        ChartType::Line,
        ChartType::Scatter,
        ChartType::GroupedLine,
        ChartType::StackedBar,
        ChartType::GroupedBar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChartType::Bar => "bar",
            ChartType::Pie => "pie",
            ChartType::Line => "line",
            ChartType::Scatter => "scatter",
            ChartType::GroupedLine => "grouped_line",
            ChartType::StackedBar => "stacked_bar",
            ChartType::GroupedBar => "grouped_bar",
        }
    }

    /// Reader-facing name, e.g. "grouped line".
    pub fn label(self) -> &'static str {
        match self {
            ChartType::GroupedLine => "grouped line",
            ChartType::StackedBar => "stacked bar",
            ChartType::GroupedBar => "grouped bar",
            other => other.as_str(),
        }
    }

    pub fn parse(s: &str) -> Option<ChartType> {
        ChartType::ALL.into_iter().find(|t| t.as_str() == s)
    }

    pub fn is_line_family(self) -> bool {
        matches!(self, ChartType::Line | ChartType::GroupedLine | ChartType::Scatter)
    }

    pub fn is_bar_family(self) -> bool {
        matches!(self, ChartType::Bar | ChartType::StackedBar | ChartType::GroupedBar)
    }
}

impl fmt::Display for ChartType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineStyle {
    Solid,
    Dashed,
    Dotted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Marker {
    Circle,
    Square,
    Triangle,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieVariant {
    Pie,
    Donut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyleParams {
    pub palette_id: u8,
    pub line_style: LineStyle,
    pub marker: Marker,
    pub pie_variant: PieVariant,
    pub canvas_w: u32,
    pub canvas_h: u32,
    pub title_band_frac: f64,
    pub margin_frac: f64,
    pub seed: u64,
}

impl Default for StyleParams {
    fn default() -> Self {
        StyleParams {
            palette_id: 0,
            line_style: LineStyle::Solid,
            marker: Marker::None,
            pie_variant: PieVariant::Pie,
            canvas_w: 800,
            canvas_h: 500,
            title_band_frac: 0.08,
            margin_frac: 0.10,
            seed: 0,
        }
    }
}

impl StyleParams {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.title_band_frac > 0.0 && self.title_band_frac < 0.25) {
            out.push(format!("title_band_frac {} outside (0, 0.25)", self.title_band_frac));
        }
        if !(self.margin_frac > 0.0 && self.margin_frac < 0.25) {
            out.push(format!("margin_frac {} outside (0, 0.25)", self.margin_frac));
        }
        if self.canvas_w < 64 || self.canvas_h < 64 {
            out.push(format!("canvas {}x{} smaller than 64", self.canvas_w, self.canvas_h));
        }
        out
    }
}

/// An x coordinate: a number for numeric axes, a label for categorical and
/// temporal axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum XValue {
    Num(f64),
    Label(String),
}

impl XValue {
    /// Numeric position, if the value has one (numbers and temporal labels).
    pub fn position(&self) -> Option<f64> {
        match self {
            XValue::Num(v) => Some(*v),
            XValue::Label(s) => temporal_ordinal(s),
        }
    }

    pub fn display(&self) -> String {
        match self {
            XValue::Num(v) => format_sig(*v, 4),
            XValue::Label(s) => s.clone(),
        }
    }

    fn key(&self) -> String {
        match self {
            XValue::Num(v) => format!("n:{}", v.to_bits()),
            XValue::Label(s) => format!("s:{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: XValue,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    /// Series label; empty for single-series charts.
    pub category: String,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub id: String,
    pub chart_type: ChartType,
    pub title: String,
    pub subtitle: String,
    pub x_name: String,
    pub y_name: String,
    pub categories: Vec<String>,
    pub series: Vec<Series>,
    pub style: StyleParams,
    pub source_table_id: String,
    pub theme: Theme,
    pub svg_path: String,
}

impl ChartSpec {
    pub fn violations(&self) -> Vec<String> {
        let mut out = self.style.violations();
        if self.series.is_empty() {
            out.push("chart has no series".to_string());
        }
        for s in &self.series {
            if s.points.is_empty() {
                out.push(format!("series {:?} is empty", s.category));
            }
            let mut seen = std::collections::BTreeSet::new();
            for p in &s.points {
                if !p.y.is_finite() {
                    out.push(format!("series {:?} has non-finite y", s.category));
                }
                if let XValue::Num(v) = p.x {
                    if !v.is_finite() {
                        out.push(format!("series {:?} has non-finite x", s.category));
                    }
                }
                if !seen.insert(p.x.key()) {
                    out.push(format!("series {:?} repeats x value {}", s.category, p.x.display()));
                }
            }
        }
        if self.chart_type == ChartType::Pie {
            if self.series.len() != 1 {
                out.push(format!("pie chart has {} series, expected 1", self.series.len()));
            }
            if self.series.iter().flat_map(|s| &s.points).any(|p| p.y < 0.0) {
                out.push("pie chart has a negative slice".to_string());
            }
        }
        if !self.categories.is_empty() && self.categories.len() != self.series.len() {
            out.push(format!("{} categories declared for {} series", self.categories.len(), self.series.len()));
        }
        out
    }

    /// The series used by single-series statistics.
    pub fn primary_series(&self) -> &Series {
        &self.series[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InsightLevel {
    Visual,
    Statistics,
    Task,
}

impl InsightLevel {
    pub const ALL: [InsightLevel; 3] = [InsightLevel::Visual, InsightLevel::Statistics, InsightLevel::Task];

    pub fn as_str(self) -> &'static str {
        match self {
            InsightLevel::Visual => "visual",
            InsightLevel::Statistics => "statistics",
            InsightLevel::Task => "task",
        }
    }

    pub fn parse(s: &str) -> Option<InsightLevel> {
        InsightLevel::ALL.into_iter().find(|l| l.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Template,
    GenerativeService,
}

pub const TEMPLATE_MIN_WORDS: usize = 30;
pub const TEMPLATE_MAX_WORDS: usize = 160;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Insight {
    pub chart_id: String,
    pub level: InsightLevel,
    pub text: String,
    pub provenance: Provenance,
}

impl Insight {
    pub fn word_count(&self) -> usize {
        self.text.split_whitespace().count()
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.text.trim().is_empty() {
            out.push("insight text is empty".to_string());
        } else if self.provenance == Provenance::Template {
            let n = self.word_count();
            if !(TEMPLATE_MIN_WORDS..=TEMPLATE_MAX_WORDS).contains(&n) {
                out.push(format!(
                    "{} insight has {n} words, outside [{TEMPLATE_MIN_WORDS}, {TEMPLATE_MAX_WORDS}]",
                    self.level.as_str()
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    Precise,
    Fuzzy,
}

impl QueryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QueryKind::Precise => "precise",
            QueryKind::Fuzzy => "fuzzy",
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextQuery {
    pub id: String,
    pub text: String,
    pub kind: QueryKind,
    pub target_chart_id: String,
    pub group_id: String,
    /// False when no field separates the target from every distractor.
    #[serde(default = "default_true")]
    pub discriminative: bool,
}

/// A unit-norm embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmbeddingVector {
    values: Vec<f64>,
}

impl EmbeddingVector {
    /// Normalize `values` to unit length.
    pub fn normalized(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(CsemError::InvalidArgument("embedding with zero dimensions".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CsemError::InvalidArgument("embedding has non-finite values".into()));
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(CsemError::InvalidArgument("cannot normalize a zero vector".into()));
        }
        values.iter_mut().for_each(|v| *v /= norm);
        Ok(EmbeddingVector { values })
    }

    /// The uniform `1/sqrt(dim)` vector, used for inputs with no signal.
    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0);
        EmbeddingVector { values: vec![1.0 / (dim as f64).sqrt(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupStatus {
    Candidate,
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkGroup {
    pub group_id: String,
    pub target_id: String,
    pub distractor_ids: Vec<String>,
    pub anchor_similarities: Vec<f64>,
    pub precise_query: Option<TextQuery>,
    pub fuzzy_query: Option<TextQuery>,
    pub status: GroupStatus,
}

impl BenchmarkGroup {
    pub fn violations(&self, threshold: f64, n_distractors: usize) -> Vec<String> {
        let mut out = Vec::new();
        if self.distractor_ids.len() != n_distractors {
            out.push(format!("{} distractors, expected {n_distractors}", self.distractor_ids.len()));
        }
        let mut ids: std::collections::BTreeSet<&str> = std::collections::BTreeSet::new();
        ids.insert(&self.target_id);
        for d in &self.distractor_ids {
            if !ids.insert(d) {
                out.push(format!("distractor {d} repeats the target or another distractor"));
            }
        }
        if self.anchor_similarities.len() != self.distractor_ids.len() {
            out.push("anchor_similarities length differs from distractor count".into());
        }
        for s in &self.anchor_similarities {
            if *s < threshold {
                out.push(format!("similarity {s} below threshold {threshold}"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub chart_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub query_id: String,
    pub entries: Vec<RankedEntry>,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_query_rank: BTreeMap<String, Option<usize>>,
    pub r_at: BTreeMap<usize, f64>,
    pub mrr_at_10: f64,
    pub ndcg_at_10: f64,
    pub overall: f64,
    pub config_tag: String,
}

impl EvalReport {
    pub fn recall(&self, k: usize) -> f64 {
        self.r_at.get(&k).copied().unwrap_or(0.0)
    }
}

/// Format with `sig` significant digits, keeping trailing zeros after the
/// point (120 -> "120.0", 0.5 -> "0.5000", 12345.6 -> "12350").
pub fn format_sig(v: f64, sig: usize) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return format!("{:.*}", sig.saturating_sub(1), 0.0);
    }
    let mut mag = v.abs().log10().floor() as i32;
    // rounding can carry into the next decade (9.99996 -> 10.00)
    let scale = 10f64.powi(sig as i32 - 1 - mag);
    if ((v.abs() * scale).round() / scale).log10().floor() as i32 > mag {
        mag += 1;
    }
    let decimals = sig as i32 - 1 - mag;
    if decimals >= 0 {
        format!("{:.*}", decimals as usize, v)
    } else {
        let unit = 10f64.powi(-decimals);
        format!("{:.0}", (v / unit).round() * unit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn temporal_labels() {
        assert_eq!(temporal_ordinal("2019"), Some(2019.0));
        assert_eq!(temporal_ordinal("2019-01"), Some(2019.0));
        assert_eq!(temporal_ordinal("2019-07"), Some(2019.5));
        assert_eq!(temporal_ordinal("2019-13"), None);
        assert_eq!(temporal_ordinal("19"), None);
        assert_eq!(temporal_ordinal("north"), None);
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(120.0, 4), "120.0");
        assert_eq!(format_sig(0.5, 4), "0.5000");
        assert_eq!(format_sig(1234.5678, 4), "1235");
        assert_eq!(format_sig(12345.6, 4), "12350");
        assert_eq!(format_sig(9.99996, 4), "10.00");
        assert_eq!(format_sig(999.96, 4), "1000");
        assert_eq!(format_sig(-2.5, 4), "-2.500");
        assert_eq!(format_sig(0.0, 4), "0.000");
    }

    #[test]
    fn table_row_width_violation() {
        let t = Table {
            id: "t".into(),
            theme: Theme::Sales,
            entity: "Acme".into(),
            columns: vec![
                Column { name: "region".into(), kind: ColumnKind::Categorical },
                Column { name: "revenue".into(), kind: ColumnKind::Numeric },
            ],
            rows: vec![vec![Cell::Text("north".into()), Cell::Num(1.0), Cell::Num(2.0)]],
        };
        let v = t.violations();
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("3 cells"));
    }

    #[test]
    fn embedding_normalization() {
        let e = EmbeddingVector::normalized(vec![3.0, 4.0]).unwrap();
        assert_eq!(e.values(), &[0.6, 0.8]);
        assert!(EmbeddingVector::normalized(vec![0.0, 0.0]).is_err());
        assert!(EmbeddingVector::normalized(vec![f64::NAN]).is_err());
        assert!((EmbeddingVector::uniform(16).norm() - 1.0).abs() < 1e-12);
    }
}
