//! Ranking metrics and the evaluation experiments: model comparison, the
//! insight-level ablation, crop-versus-resize preprocessing and the
//! text-to-OCR baseline.

mod experiments;
mod metrics;
mod report;

pub use experiments::{
    ablation_subsets, compare_preprocess, evaluate, evaluate_pool, evaluate_vectors, metric_rows, ocr_baseline,
    ocr_text, run_ablation, AblationRow, EvalPool, EvalResult, MetricDelta, PreprocessComparison,
};
pub use metrics::{
    mrr_contrib, ndcg_contrib, overall_of, overall_six, rank_of_target, recall_at_k, report_from_ranks, triple,
    MetricConfig, PublishedAblationRow, PUBLISHED_ABLATION,
};
pub use report::{
    pct, render_ablation_csv, render_ablation_markdown, render_comparison_markdown, render_results_csv,
    render_results_markdown,
};
