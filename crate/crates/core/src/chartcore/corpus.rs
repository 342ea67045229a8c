use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::types::{BenchmarkGroup, ChartSpec, Insight, Table, TextQuery};
use crate::{chartsynth, CsemError, Result};

pub const CHARTS_FILE: &str = "charts.jsonl";
pub const INSIGHTS_FILE: &str = "insights.jsonl";
pub const TABLES_FILE: &str = "tables.jsonl";
pub const QUERIES_FILE: &str = "queries.jsonl";
pub const GROUPS_FILE: &str = "groups.jsonl";
pub const SVG_DIR: &str = "svg";

/// Records of one corpus directory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub tables: Vec<Table>,
    pub charts: Vec<ChartSpec>,
    pub insights: Vec<Insight>,
}

impl Corpus {
    pub fn chart(&self, id: &str) -> Option<&ChartSpec> {
        self.charts.binary_search_by(|c| c.id.as_str().cmp(id)).ok().map(|i| &self.charts[i])
    }

    /// Sort every record list into its canonical order.
    pub fn canonicalize(&mut self) {
        self.tables.sort_by(|a, b| a.id.cmp(&b.id));
        self.charts.sort_by(|a, b| a.id.cmp(&b.id));
        self.insights.sort_by(|a, b| (&a.chart_id, a.level).cmp(&(&b.chart_id, b.level)));
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub record_id: String,
    pub message: String,
}

/// Every invariant violation across charts and insights, plus dangling
/// insight references. Empty means the corpus is valid.
pub fn validate_corpus(charts: &[ChartSpec], insights: &[Insight]) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for c in charts {
        if !ids.insert(c.id.as_str()) {
            out.push(Violation { record_id: c.id.clone(), message: "duplicate chart id".into() });
        }
        for message in c.violations() {
            out.push(Violation { record_id: c.id.clone(), message });
        }
    }
    let mut seen_levels = BTreeSet::new();
    for ins in insights {
        let rid = format!("{}/{}", ins.chart_id, ins.level.as_str());
        if !ids.contains(ins.chart_id.as_str()) {
            out.push(Violation { record_id: rid.clone(), message: "insight references unknown chart".into() });
        }
        if !seen_levels.insert((ins.chart_id.as_str(), ins.level)) {
            out.push(Violation { record_id: rid.clone(), message: "duplicate insight level".into() });
        }
        for message in ins.violations() {
            out.push(Violation { record_id: rid.clone(), message });
        }
    }
    out
}

fn validate_tables(tables: &[Table], charts: &[ChartSpec]) -> Result<()> {
    let mut by_id = BTreeMap::new();
    for t in tables {
        if by_id.insert(t.id.as_str(), t).is_some() {
            return Err(CsemError::DuplicateId(t.id.clone()));
        }
    }
    for c in charts {
        if let Some(t) = by_id.get(c.source_table_id.as_str()) {
            if let Some(msg) = t.violations().into_iter().next() {
                return Err(CsemError::validation(&c.id, format!("source table {}: {msg}", t.id)));
            }
        }
    }
    for t in tables {
        if let Some(msg) = t.violations().into_iter().next() {
            return Err(CsemError::validation(&t.id, msg));
        }
    }
    Ok(())
}

/// Write one JSON record per line.
pub fn save_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| CsemError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line =
            serde_json::to_string(r).map_err(|e| CsemError::validation(path.display().to_string(), e.to_string()))?;
        w.write_all(line.as_bytes()).and_then(|_| w.write_all(b"\n")).map_err(|e| CsemError::io(path, e))?;
    }
    w.flush().map_err(|e| CsemError::io(path, e))
}

pub fn load_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = fs::File::open(path).map_err(|e| CsemError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CsemError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| CsemError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// Validate and write a corpus: `tables.jsonl`, `charts.jsonl`,
/// `insights.jsonl` and one SVG per chart under `svg/`.
///
/// Records are written in canonical id order, so equal corpora produce
/// identical bytes.
pub fn save_corpus(corpus: &Corpus, dir: &Path) -> Result<()> {
    let mut corpus = corpus.clone();
    corpus.canonicalize();
    validate_tables(&corpus.tables, &corpus.charts)?;
    if let Some(v) = validate_corpus(&corpus.charts, &corpus.insights).into_iter().next() {
        return Err(CsemError::validation(v.record_id, v.message));
    }
    let svg_dir = dir.join(SVG_DIR);
    fs::create_dir_all(&svg_dir).map_err(|e| CsemError::io(&svg_dir, e))?;
    save_jsonl(&dir.join(TABLES_FILE), &corpus.tables)?;
    save_jsonl(&dir.join(CHARTS_FILE), &corpus.charts)?;
    save_jsonl(&dir.join(INSIGHTS_FILE), &corpus.insights)?;
    for c in &corpus.charts {
        let path = dir.join(&c.svg_path);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CsemError::io(parent, e))?;
        }
        fs::write(&path, chartsynth::render_svg(c)).map_err(|e| CsemError::io(&path, e))?;
    }
    Ok(())
}

/// Read a corpus written by [`save_corpus`], re-validating every record.
/// `tables.jsonl` and `insights.jsonl` are optional.
pub fn load_corpus(dir: &Path) -> Result<Corpus> {
    let charts_path = dir.join(CHARTS_FILE);
    let mut charts: Vec<ChartSpec> = load_jsonl(&charts_path)?;
    let insights_path = dir.join(INSIGHTS_FILE);
    let mut insights: Vec<Insight> = if insights_path.exists() { load_jsonl(&insights_path)? } else { Vec::new() };
    let tables_path = dir.join(TABLES_FILE);
    let mut tables: Vec<Table> = if tables_path.exists() { load_jsonl(&tables_path)? } else { Vec::new() };

    charts.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = charts.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(CsemError::DuplicateId(w[0].id.clone()));
    }
    tables.sort_by(|a, b| a.id.cmp(&b.id));
    insights.sort_by(|a, b| (&a.chart_id, a.level).cmp(&(&b.chart_id, b.level)));
    validate_tables(&tables, &charts)?;
    if let Some(v) = validate_corpus(&charts, &insights).into_iter().next() {
        return Err(CsemError::validation(v.record_id, v.message));
    }
    Ok(Corpus { tables, charts, insights })
}

pub fn save_queries(path: &Path, queries: &[TextQuery]) -> Result<()> {
    save_jsonl(path, queries)
}

pub fn load_queries(path: &Path) -> Result<Vec<TextQuery>> {
    let qs: Vec<TextQuery> = load_jsonl(path)?;
    let mut ids = BTreeSet::new();
    for q in &qs {
        if !ids.insert(q.id.as_str()) {
            return Err(CsemError::DuplicateId(q.id.clone()));
        }
        if q.text.trim().is_empty() {
            return Err(CsemError::validation(&q.id, "empty query text"));
        }
    }
    Ok(qs)
}

pub fn save_groups(path: &Path, groups: &[BenchmarkGroup]) -> Result<()> {
    save_jsonl(path, groups)
}

pub fn load_groups(path: &Path) -> Result<Vec<BenchmarkGroup>> {
    let gs: Vec<BenchmarkGroup> = load_jsonl(path)?;
    let mut ids = BTreeSet::new();
    for g in &gs {
        if !ids.insert(g.group_id.as_str()) {
            return Err(CsemError::DuplicateId(g.group_id.clone()));
        }
    }
    Ok(gs)
}
