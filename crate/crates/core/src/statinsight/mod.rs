//! Statistical task battery and three-level insight synthesis.

mod generative;
mod stats;
mod templates;

pub use generative::{
    generative_complete, stats_prompt, task_prompt, visual_prompt, EndpointConfig, ENV_LLM_MODEL, ENV_LLM_URL,
};
pub use stats::{
    ls_slope, pearson, run_stat_tasks, Anomaly, Derived, Distribution, Extremum, StatReport, Trend, TrendDirection,
    ANOMALY_Z, DOMINANCE_SHARE,
};
pub use templates::{gen_stats_insight, gen_task_insight, gen_visual_insight};

use crate::chartcore::{ChartSpec, Insight, Provenance};
use crate::Result;

/// Insights for a corpus plus the charts that could not be analyzed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Synthesis {
    pub insights: Vec<Insight>,
    pub skipped: Vec<(String, String)>,
}

fn via_service(template: Insight, prompt: (String, String), backend: Option<&EndpointConfig>) -> Insight {
    let Some(cfg) = backend else { return template };
    match generative_complete(&prompt.0, &prompt.1, cfg) {
        Ok(text) => Insight { text, provenance: Provenance::GenerativeService, ..template },
        Err(e) => {
            log::warn!("falling back to template insight for {}: {e}", template.chart_id);
            template
        }
    }
}

/// Visual, statistics and task insights for one chart, in that order.
pub fn synthesize_chart(spec: &ChartSpec, backend: Option<&EndpointConfig>) -> Result<[Insight; 3]> {
    let report = run_stat_tasks(spec)?;
    let visual = via_service(gen_visual_insight(spec), visual_prompt(spec), backend);
    let stats = via_service(gen_stats_insight(spec, &report), stats_prompt(spec, &report), backend);
    let task = via_service(gen_task_insight(spec, Some(&visual))?, task_prompt(spec), backend);
    Ok([visual, stats, task])
}

/// Three insights per chart. Charts whose statistics fail are skipped and
/// reported rather than aborting the run.
pub fn synthesize_all(charts: &[ChartSpec], backend: Option<&EndpointConfig>) -> Synthesis {
    let results: Vec<Result<[Insight; 3]>> = match backend {
        None => charts.iter().map(|c| synthesize_chart(c, None)).collect(),
        Some(cfg) => {
            let workers = cfg.concurrency.max(1);
            let chunk = charts.len().div_ceil(workers).max(1);
            std::thread::scope(|scope| {
                let handles: Vec<_> = charts
                    .chunks(chunk)
                    .map(|part| {
                        scope.spawn(move || part.iter().map(|c| synthesize_chart(c, Some(cfg))).collect::<Vec<_>>())
                    })
                    .collect();
                handles.into_iter().flat_map(|h| h.join().expect("insight worker panicked")).collect()
            })
        }
    };
    let mut out = Synthesis::default();
    for (chart, r) in charts.iter().zip(results) {
        match r {
            Ok(triple) => out.insights.extend(triple),
            Err(e) => out.skipped.push((chart.id.clone(), e.to_string())),
        }
    }
    out
}
