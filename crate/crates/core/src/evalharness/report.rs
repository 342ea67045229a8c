use std::fmt::Write as _;

use super::experiments::{AblationRow, EvalResult, PreprocessComparison};
use super::metrics::triple;
use crate::chartcore::{EvalReport, InsightLevel};

/// A fraction as a percentage with two decimals: 0.4444 -> "44.44".
pub fn pct(v: f64) -> String {
    format!("{:.2}", v * 100.0)
}

fn check(b: bool) -> &'static str {
    if b {
        "✓"
    } else {
        ""
    }
}

fn kind_cells(r: &EvalReport, with_recall: bool) -> Vec<String> {
    let mut out = Vec::new();
    if with_recall {
        out.extend(r.r_at.values().map(|v| pct(*v)));
    }
    out.push(pct(r.mrr_at_10));
    out.push(pct(r.ndcg_at_10));
    out
}

/// Model comparison table: every R@k, MRR@10 and NDCG@10 for precise and
/// fuzzy queries, one row per named result.
pub fn render_results_markdown(results: &[(String, EvalResult)], k_list: &[usize]) -> String {
    let mut heads: Vec<String> = vec!["Model".into()];
    for kind in ["Precise", "Fuzzy"] {
        heads.extend(k_list.iter().map(|k| format!("{kind} R@{k}")));
        heads.push(format!("{kind} MRR@10"));
        heads.push(format!("{kind} NDCG@10"));
    }
    heads.push("Overall".into());
    let mut out = markdown_header(&heads);
    for (name, r) in results {
        let mut cells = vec![name.clone()];
        cells.extend(kind_cells(&r.precise, true));
        cells.extend(kind_cells(&r.fuzzy, true));
        cells.push(pct(r.overall()));
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    out
}

pub fn render_results_csv(results: &[(String, EvalResult)], k_list: &[usize]) -> String {
    let mut heads: Vec<String> = vec!["model".into()];
    for kind in ["precise", "fuzzy"] {
        heads.extend(k_list.iter().map(|k| format!("{kind}_r@{k}")));
        heads.push(format!("{kind}_mrr@10"));
        heads.push(format!("{kind}_ndcg@10"));
    }
    heads.push("overall".into());
    let mut out = heads.join(",") + "\n";
    for (name, r) in results {
        let mut cells = vec![name.clone()];
        cells.extend(kind_cells(&r.precise, true));
        cells.extend(kind_cells(&r.fuzzy, true));
        cells.push(pct(r.overall()));
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

const ABLATION_HEADS: [&str; 10] = [
    "Visual-o",
    "Statistics-o",
    "Task-o",
    "Precise R@10",
    "Precise MRR@10",
    "Precise NDCG@10",
    "Fuzzy R@10",
    "Fuzzy MRR@10",
    "Fuzzy NDCG@10",
    "Overall",
];

fn ablation_cells(row: &AblationRow) -> Vec<String> {
    let mut cells: Vec<String> = InsightLevel::ALL.iter().map(|l| check(row.uses(*l)).to_string()).collect();
    cells.extend(triple(&row.result.precise).iter().chain(&triple(&row.result.fuzzy)).map(|v| pct(*v)));
    cells.push(pct(row.result.overall()));
    cells
}

/// Insight ablation table with a checkmark column per level.
pub fn render_ablation_markdown(rows: &[AblationRow]) -> String {
    let mut out = markdown_header(&ABLATION_HEADS.map(String::from));
    for row in rows {
        let _ = writeln!(out, "| {} |", ablation_cells(row).join(" | "));
    }
    out
}

pub fn render_ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = "visual,statistics,task,precise_r@10,precise_mrr@10,precise_ndcg@10,fuzzy_r@10,fuzzy_mrr@10,fuzzy_ndcg@10,overall\n".to_string();
    for row in rows {
        let mut cells = ablation_cells(row);
        for c in cells.iter_mut().take(3) {
            *c = if c.is_empty() { "0".into() } else { "1".into() };
        }
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn render_comparison_markdown(cmp: &PreprocessComparison) -> String {
    let mut out = markdown_header(&["Metric", "Direct resize", "Center crop", "Delta"].map(String::from));
    for d in &cmp.deltas {
        let _ = writeln!(out, "| {} | {} | {} | {} |", d.metric, pct(d.resize), pct(d.crop), pct(d.delta));
    }
    out
}

fn markdown_header(heads: &[String]) -> String {
    format!("| {} |\n|{}\n", heads.join(" | "), "---|".repeat(heads.len()))
}
