//! Optional chat-completion backend for insight text.

use std::time::Duration;

use serde_json::{json, Value};

use super::stats::StatReport;
use crate::chartcore::{format_sig, ChartSpec};
use crate::{http, CsemError, Result};

pub const ENV_LLM_URL: &str = "CSEM_LLM_URL";
pub const ENV_LLM_MODEL: &str = "CSEM_LLM_MODEL";

#[derive(Debug, Clone, PartialEq)]
pub struct EndpointConfig {
    pub url: String,
    pub model: String,
    pub timeout: Duration,
    pub max_attempts: u32,
    pub temperature: f64,
    /// Requests allowed in flight at once.
    pub concurrency: usize,
}

impl EndpointConfig {
    pub fn new(url: impl Into<String>, model: impl Into<String>) -> Self {
        EndpointConfig {
            url: url.into(),
            model: model.into(),
            timeout: Duration::from_secs(60),
            max_attempts: 3,
            temperature: 0.7,
            concurrency: 4,
        }
    }

    /// `CSEM_LLM_URL` / `CSEM_LLM_MODEL`; `None` when no URL is set.
    pub fn from_env() -> Option<Self> {
        let url = std::env::var(ENV_LLM_URL).ok().filter(|u| !u.is_empty())?;
        let model = std::env::var(ENV_LLM_MODEL).unwrap_or_else(|_| "llama-3.1-8b-instruct".to_string());
        Some(EndpointConfig::new(url, model))
    }
}

/// Extract generated text from a chat-completion style response.
fn response_text(v: &Value) -> Option<String> {
    let candidates = [
        v.pointer("/choices/0/message/content"),
        v.pointer("/choices/0/text"),
        v.get("text"),
        v.get("content"),
        v.pointer("/message/content"),
        v.get("response"),
    ];
    candidates.into_iter().flatten().find_map(|c| c.as_str().map(str::to_string))
}

/// Send one system + user prompt pair, retrying up to `max_attempts` times.
pub fn generative_complete(system_prompt: &str, user_prompt: &str, cfg: &EndpointConfig) -> Result<String> {
    let body = json!({
        "model": cfg.model,
        "messages": [
            {"role": "system", "content": system_prompt},
            {"role": "user", "content": user_prompt},
        ],
        "temperature": cfg.temperature,
    });
    let mut last = CsemError::Service("no attempts made".into());
    for attempt in 1..=cfg.max_attempts.max(1) {
        match http::post_json(&cfg.url, &body, cfg.timeout) {
            Ok(v) => match response_text(&v) {
                Some(t) if !t.trim().is_empty() => return Ok(t.trim().to_string()),
                _ => last = CsemError::Service(format!("response from {} has no text field", cfg.url)),
            },
            Err(e) => last = e,
        }
        log::debug!("generative attempt {attempt} failed: {last}");
    }
    Err(last)
}

fn categories_or(spec: &ChartSpec, empty: &str) -> String {
    if spec.categories.is_empty() {
        empty.to_string()
    } else {
        spec.categories.join(", ")
    }
}

pub fn visual_prompt(spec: &ChartSpec) -> (String, String) {
    let system = "You are an expert data visualization analyst who excels at crafting clear, engaging narratives.\n\
Your task is to write a fluid, well-structured paragraph that describes a data visualization.\n\
Write as if explaining the visualization to a professional audience.";
    let user = format!(
        "Based on the following chart information, write a single cohesive paragraph explaining the visualization:\n\n\
Title: {}\nSubtitle: {}\nChart Type: {}\nX-axis: {}\nY-axis: {}\nCategories: {}\n\n\
Requirements:\n- Begin with \"This {} chart\"\n- Naturally describe relationships between variables\n\
- Use professional yet accessible language\n- Approximately 100 words\n",
        spec.title,
        spec.subtitle,
        spec.chart_type,
        spec.x_name,
        spec.y_name,
        categories_or(spec, "Single category"),
        spec.chart_type
    );
    (system.to_string(), user)
}

pub fn task_prompt(spec: &ChartSpec) -> (String, String) {
    let system = "You are a professional data analyst. Describe the chart's purpose and practical applications.\n\n\
Format strictly:\n\nMain Purpose:\n[Single paragraph of 50-100 words describing the visualization's core objective and data presentation approach. Avoid introductory phrases.]\n";
    let user = format!(
        "Chart information:\nTitle: {}\nSubtitle: {}\nChart Type: {}\nX-axis Label: {}\nY-axis Label: {}\nData Categories: {}\n",
        spec.title,
        spec.subtitle,
        spec.chart_type,
        spec.x_name,
        spec.y_name,
        categories_or(spec, "None")
    );
    (system.to_string(), user)
}

pub fn stats_prompt(spec: &ChartSpec, report: &StatReport) -> (String, String) {
    let system = "You are an expert data analyst. Based on key statistical metrics, provide analysis.\n\n\
Format strictly:\n\nStatistical Analysis:\n[Single paragraph of 50-100 words analyzing ordering, relationships, ranges, and correlations. Avoid introductory phrases.]\n";
    let f = |v: f64| format_sig(v, 4);
    let mut stats = vec![
        format!("- Trend: {:?} (slope {})", report.trend.direction, f(report.trend.slope)),
        format!("- Maximum: {} at {}", f(report.extremum.max), report.extremum.argmax),
        format!("- Minimum: {} at {}", f(report.extremum.min), report.extremum.argmin),
        format!("- Mean: {}, Median: {}", f(report.mean), f(report.median)),
        format!("- Standard deviation: {}", f(report.distribution.stddev)),
        format!("- Top entries: {}", report.top_categories.join(", ")),
        format!("- Sum: {}, Top share: {}", f(report.derived.sum), f(report.derived.share_of_top)),
    ];
    if let Some(r) = report.correlation {
        stats.push(format!("- Correlation: {}", f(r)));
    }
    if !report.anomalies.is_empty() {
        stats.push(format!(
            "- Anomalies: {}",
            report.anomalies.iter().map(|a| a.label.as_str()).collect::<Vec<_>>().join(", ")
        ));
    }
    let user = format!(
        "Chart Information:\nTitle: {}\nChart Type: {}\nX-axis: {}\nY-axis: {}\n\nKey Statistics:\n{}\n",
        spec.title,
        spec.chart_type,
        spec.x_name,
        spec.y_name,
        stats.join("\n")
    );
    (system.to_string(), user)
}
