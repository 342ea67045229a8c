//! Precise and fuzzy query generation for a target chart among distractors.

use std::collections::BTreeSet;

use serde_json::Value;

use crate::chartcore::{temporal_ordinal, ChartSpec, ChartType, QueryKind, TextQuery};
use crate::chartsynth::month_name;
use crate::statinsight::{generative_complete, EndpointConfig};
use crate::Result;

pub const QUERY_MIN_WORDS: usize = 10;
pub const QUERY_MAX_WORDS: usize = 15;
pub const QUERY_MAX_CHARS: usize = 120;

/// The query-generation prompt, verbatim; the five charts are appended as
/// text descriptions because the backend is text-only.
pub const QUERY_PROMPT: &str = r#"You are a user searching for visualizations in a database. You will see 5 visualizations, but you should ONLY focus on the FIRST image when generating queries.
The other four images are very similar to the first one, make sure your queries CAN NOT match any of the other four images.
Generate two meaningful queries (10-15 words each):

1. Precise Query:
Generate a query about specific content in the FIRST visualization that includes:

- Meaningful combination of axis labels/categories
- Important data values or time ranges
- Key categories or measurements

- If the image contains time, include the time range in the query.
- When covering the time range, do not directly use the initial time range in the chart.
- The time range must be within the original chart time span.
- Do not use commas in your query.
- Do not directly copy text from the image. Use similar wording instead.

Example (good):
global temperature change 1990-2020 in the United States

Bad example:
global temperature change

2. Fuzzy Query:
Generate a query about the visualization purpose that includes:

- Line charts: trend analysis or comparison over time
- Bar charts: value comparison or ranking
- Pie/stacked charts: distribution or proportion comparison
- Scatter plots: correlation or pattern analysis

Example (good):
annual economic growth comparison between countries

Bad example:
growth comparison

Format your response as:
{
  "Precise query": "10-15 word query about content",
  "Fuzzy query": "10-15 word query about purpose"
}

Remember:
- ONLY consider the FIRST image
- Include relevant context
- Be specific and meaningful
- Articles and prepositions count as words"#;

/// Problems with a query's surface form; empty when it is acceptable.
pub fn query_violations(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let n = text.split_whitespace().count();
    if !(QUERY_MIN_WORDS..=QUERY_MAX_WORDS).contains(&n) {
        out.push(format!("{n} words, expected {QUERY_MIN_WORDS}-{QUERY_MAX_WORDS}"));
    }
    if text.contains(',') {
        out.push("contains a comma".into());
    }
    if text.chars().count() > QUERY_MAX_CHARS {
        out.push(format!("longer than {QUERY_MAX_CHARS} characters"));
    }
    out
}

/// Analytical purpose of a chart type as phrased in the prompt.
pub fn fuzzy_purpose(t: ChartType) -> &'static str {
    match t {
        ChartType::Line | ChartType::GroupedLine => "trend analysis or comparison over time",
        ChartType::Bar | ChartType::GroupedBar => "value comparison or ranking",
        ChartType::Pie | ChartType::StackedBar => "distribution or proportion comparison",
        ChartType::Scatter => "correlation or pattern analysis",
    }
}

fn lower(s: &str) -> String {
    s.replace(',', " ").split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// "2019" stays as is; "2019-03" reads "March 2019".
fn time_words(label: &str) -> String {
    match label.split_once('-') {
        Some((y, m)) => match m.parse::<u32>() {
            Ok(m) if (1..=12).contains(&m) => format!("{} {y}", month_name(m)),
            _ => label.to_string(),
        },
        None => label.to_string(),
    }
}

/// Temporal x labels of the primary series, in order.
fn time_axis(spec: &ChartSpec) -> Vec<(String, f64)> {
    let Some(s) = spec.series.first() else {
        return Vec::new();
    };
    let labels: Vec<(String, f64)> = s
        .points
        .iter()
        .filter_map(|p| {
            let d = p.x.display();
            temporal_ordinal(&d).map(|o| (d, o))
        })
        .collect();
    if labels.len() == s.points.len() {
        labels
    } else {
        Vec::new()
    }
}

/// Labels a reader sees as categories: legend entries for multi-series
/// charts, otherwise the x labels of bar and pie charts.
fn label_set(spec: &ChartSpec) -> BTreeSet<String> {
    if !spec.categories.is_empty() {
        return spec.categories.iter().map(|c| lower(c)).collect();
    }
    if matches!(spec.chart_type, ChartType::Bar | ChartType::Pie) {
        if let Some(s) = spec.series.first() {
            return s.points.iter().map(|p| lower(&p.x.display())).collect();
        }
    }
    BTreeSet::new()
}

struct Facet {
    words: String,
    separates: Vec<bool>,
}

/// Sub-range strictly inside the target's time span: drop the first point
/// and end one before the last (keeping at least two points).
fn range_facet(target: &ChartSpec, distractors: &[&ChartSpec]) -> Option<Facet> {
    let axis = time_axis(target);
    if axis.len() < 4 {
        return None;
    }
    let (a, b) = (&axis[1], &axis[axis.len() - 2]);
    let words = format!("from {} to {}", time_words(&a.0), time_words(&b.0));
    let separates = distractors
        .iter()
        .map(|d| {
            let t = time_axis(d);
            let covers = t.first().is_some_and(|f| f.1 <= a.1) && t.last().is_some_and(|l| l.1 >= b.1);
            !covers || lower(&d.y_name) != lower(&target.y_name)
        })
        .collect();
    Some(Facet { words, separates })
}

fn category_facet(target: &ChartSpec, distractors: &[&ChartSpec]) -> Option<Facet> {
    let own = label_set(target);
    let others: Vec<BTreeSet<String>> = distractors.iter().map(|d| label_set(d)).collect();
    // labels missing from the most distractors first, ties alphabetical
    let mut ranked: Vec<(usize, &String)> =
        own.iter().map(|l| (others.iter().filter(|o| !o.contains(l)).count(), l)).collect();
    ranked.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(y.1)));
    let chosen: Vec<&String> = ranked.iter().filter(|(n, _)| *n > 0).take(2).map(|(_, l)| *l).collect();
    if chosen.is_empty() {
        return None;
    }
    let words = chosen.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" and ");
    let separates = others.iter().map(|o| chosen.iter().any(|l| !o.contains(*l))).collect();
    Some(Facet { words: format!("for {words}"), separates })
}

fn axis_separates(target: &ChartSpec, d: &ChartSpec) -> bool {
    (lower(&target.x_name), lower(&target.y_name)) != (lower(&d.x_name), lower(&d.y_name))
}

fn fit_words(parts: &[String], padding: &[String]) -> String {
    let mut words: Vec<String> = parts.iter().flat_map(|p| p.split_whitespace().map(str::to_string)).collect();
    for pad in padding {
        if words.len() >= QUERY_MIN_WORDS {
            break;
        }
        let extra: Vec<String> = pad.split_whitespace().map(str::to_string).collect();
        if words.len() + extra.len() <= QUERY_MAX_WORDS {
            words.extend(extra);
        }
    }
    words.truncate(QUERY_MAX_WORDS);
    let mut text = words.join(" ");
    while text.chars().count() > QUERY_MAX_CHARS && words.len() > QUERY_MIN_WORDS {
        words.pop();
        text = words.join(" ");
    }
    text
}

/// Template precise query: the measure and axis pair, then whichever of a
/// time sub-range and a category difference are needed to separate the
/// target from every distractor. Returns the text and whether every
/// distractor is separated.
pub fn template_precise(target: &ChartSpec, distractors: &[&ChartSpec]) -> (String, bool) {
    let mut separated: Vec<bool> = distractors.iter().map(|d| axis_separates(target, d)).collect();
    let mut parts = vec![format!("{} by {}", lower(&target.y_name), lower(&target.x_name))];
    if let Some(f) = range_facet(target, distractors) {
        // the prompt asks for a time range whenever the chart has time
        separated.iter_mut().zip(&f.separates).for_each(|(s, n)| *s |= n);
        parts.push(f.words);
    }
    if separated.iter().any(|s| !s) {
        if let Some(f) = category_facet(target, distractors) {
            separated.iter_mut().zip(&f.separates).for_each(|(s, n)| *s |= n);
            parts.insert(1, f.words);
        }
    }
    let discriminative = separated.iter().all(|s| *s);
    let mut padding = vec![
        format!("shown as a {} chart", target.chart_type.label()),
        format!("in {} data", target.theme.as_str()),
        "across all reported periods".to_string(),
        "with exact values".to_string(),
    ];
    if !discriminative {
        // full conjunction: add the title words as well
        padding.insert(0, format!("titled {}", lower(&target.title)));
    }
    (fit_words(&parts, &padding), discriminative)
}

/// Template fuzzy query built from the chart type's analytical purpose.
pub fn template_fuzzy(target: &ChartSpec) -> String {
    let y = lower(&target.y_name);
    let x = lower(&target.x_name);
    let head = match target.chart_type {
        ChartType::Line | ChartType::GroupedLine => {
            format!("{} of {y} over {x}", fuzzy_purpose(target.chart_type))
        }
        ChartType::Bar | ChartType::GroupedBar => {
            format!("{} of {y} across {x} groups", fuzzy_purpose(target.chart_type))
        }
        ChartType::Pie | ChartType::StackedBar => {
            format!("{} of {y} among {x} groups", fuzzy_purpose(target.chart_type))
        }
        ChartType::Scatter => format!("{} between {x} and {y}", fuzzy_purpose(target.chart_type)),
    };
    let padding = [
        format!("in {} data", target.theme.as_str()),
        "for business reporting".to_string(),
        "to support planning decisions".to_string(),
        "at a glance".to_string(),
    ];
    fit_words(&[head], &padding)
}

/// Compact text rendering of a chart for the text-only prompt.
pub fn describe_for_prompt(spec: &ChartSpec) -> String {
    let mut s = format!(
        "{} chart titled \"{}\"; x axis: {}; y axis: {}",
        spec.chart_type.label(),
        spec.title,
        spec.x_name,
        spec.y_name
    );
    if !spec.subtitle.is_empty() {
        s.push_str(&format!("; subtitle: {}", spec.subtitle));
    }
    if !spec.categories.is_empty() {
        s.push_str(&format!("; series: {}", spec.categories.join(" / ")));
    }
    if let Some(ser) = spec.series.first() {
        let xs: Vec<String> = ser.points.iter().take(12).map(|p| p.x.display()).collect();
        s.push_str(&format!("; x values: {}", xs.join(" / ")));
    }
    s
}

fn parse_generated(text: &str) -> Option<(String, String)> {
    let start = text.find('{')?;
    let end = text.rfind('}')?;
    let v: Value = serde_json::from_str(&text[start..=end]).ok()?;
    let get = |k: &str| v.get(k).and_then(Value::as_str).map(|s| s.trim().to_string());
    Some((get("Precise query")?, get("Fuzzy query")?))
}

/// Precise and fuzzy queries for a group. With a backend, generated
/// queries that fail the surface constraints fall back to the templates.
pub fn gen_queries(
    group_id: &str,
    target: &ChartSpec,
    distractors: &[&ChartSpec],
    backend: Option<&EndpointConfig>,
) -> Result<(TextQuery, TextQuery)> {
    let (mut precise, discriminative) = template_precise(target, distractors);
    let mut fuzzy = template_fuzzy(target);
    if let Some(cfg) = backend {
        let mut user = String::from("Visualizations:\n");
        for (i, spec) in std::iter::once(target).chain(distractors.iter().copied()).enumerate() {
            user.push_str(&format!("{}. {}\n", i + 1, describe_for_prompt(spec)));
        }
        match generative_complete(QUERY_PROMPT, &user, cfg).map(|t| parse_generated(&t)) {
            Ok(Some((p, f))) => {
                if query_violations(&p).is_empty() {
                    precise = p;
                }
                if query_violations(&f).is_empty() {
                    fuzzy = f;
                }
            }
            Ok(None) => log::warn!("unparseable query response for {group_id}; using templates"),
            Err(e) => log::warn!("query generation failed for {group_id}: {e}; using templates"),
        }
    }
    let make = |suffix: &str, text: String, kind: QueryKind, discriminative: bool| TextQuery {
        id: format!("{group_id}-{suffix}"),
        text,
        kind,
        target_chart_id: target.id.clone(),
        group_id: group_id.to_string(),
        discriminative,
    };
    Ok((make("p", precise, QueryKind::Precise, discriminative), make("f", fuzzy, QueryKind::Fuzzy, true)))
}
