//! Acceptance criteria 1-10. Runs without the libtest harness so every
//! criterion prints exactly one `criterion N: PASS|FAIL ...` line, even when
//! an earlier one fails; exits non-zero if any failed.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::*;
use csem_core::benchgen::{group_charts, query_violations, validate_consensus, GroupingConfig, Verdict, VoteRecord};
use csem_core::chartcore::{load_corpus, load_groups, load_queries};
use csem_core::chartsynth::{rasterize, TextRole};
use csem_core::encoder::{preprocess, PreprocessMode};
use csem_core::evalharness::{
    evaluate_pool, overall_six, report_from_ranks, run_ablation, AblationRow, MetricConfig, PUBLISHED_ABLATION,
};
use csem_core::pipeline::{run_all, Experiment, PipelineConfig, StageOptions};
use csem_core::retrieval::VectorIndex;
use csem_core::trainer::{info_nce, info_nce_fd_check, train_prepared, TrainConfig};
use csem_core::{EmbeddingVector, InsightLevel};
use rand::Rng;

fn report(n: u32, pass: bool, detail: String, elapsed: Duration) -> bool {
    println!("criterion {n}: {} {detail} ({:.2}s)", if pass { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    pass
}

fn main() {
    let criteria: [(u32, fn() -> bool); 10] = [
        (1, criterion_01_metric_oracle),
        (2, criterion_02_overall_column_fixture),
        (3, criterion_03_grouping_oracle),
        (4, criterion_04_search_oracle_and_speed),
        (5, criterion_05_gradient_check),
        (6, criterion_06_training_efficacy),
        (7, criterion_07_insight_combination_direction),
        (8, criterion_08_preprocessing_direction),
        (9, criterion_09_pipeline_invariants),
        (10, criterion_10_consensus_rule),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let failed: Vec<u32> = criteria
        .iter()
        .filter(|(n, f)| match std::panic::catch_unwind(f) {
            Ok(pass) => !pass,
            Err(payload) => {
                // an unexpected error before the criterion could report
                let msg = payload
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {n}: FAIL panicked: {msg}");
                true
            }
        })
        .map(|(n, _)| *n)
        .collect();
    println!("acceptance: {}/10 criteria passed; failed: {failed:?}", 10 - failed.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}

fn criterion_01_metric_oracle() -> bool {
    let t = Instant::now();
    let cfg = MetricConfig::default();
    let ranks = |rs: &[Option<usize>]| -> BTreeMap<String, Option<usize>> {
        rs.iter().enumerate().map(|(i, r)| (format!("q{i:05}"), *r)).collect()
    };
    let mut failures = Vec::new();

    let r = report_from_ranks(ranks(&[Some(1), Some(3), None]), &cfg, "fixture");
    let closed = [
        ("MRR@10", r.mrr_at_10, (1.0 + 1.0 / 3.0) / 3.0),
        ("NDCG@10", r.ndcg_at_10, (1.0 + 1.0 / 4f64.log2()) / 3.0),
        ("R@1", r.recall(1), 1.0 / 3.0),
        ("R@5", r.recall(5), 2.0 / 3.0),
        ("R@10", r.recall(10), 2.0 / 3.0),
    ];
    for (name, got, want) in closed {
        if (got - want).abs() > 1e-12 {
            failures.push(format!("{name} {got} != {want}"));
        }
    }
    // a second closed form: rank 10 and rank 11 straddle the cutoff
    let r = report_from_ranks(ranks(&[Some(2), Some(10), Some(11), Some(7)]), &cfg, "fixture");
    let mrr = (0.5 + 0.1 + 0.0 + 1.0 / 7.0) / 4.0;
    let ndcg = (1.0 / 3f64.log2() + 1.0 / 11f64.log2() + 0.0 + 1.0 / 8f64.log2()) / 4.0;
    if (r.mrr_at_10 - mrr).abs() > 1e-12 || (r.ndcg_at_10 - ndcg).abs() > 1e-12 || (r.recall(10) - 0.75).abs() > 1e-12 {
        failures.push("cutoff fixture".into());
    }

    let mut g = rng(1);
    for i in 0..1000 {
        let n = g.random_range(1..50);
        let rs: Vec<Option<usize>> = (0..n).map(|_| g.random_bool(0.8).then(|| g.random_range(1..40))).collect();
        let r = report_from_ranks(ranks(&rs), &cfg, "random");
        if !(r.recall(1) <= r.recall(5) && r.recall(5) <= r.recall(10) && r.ndcg_at_10 >= r.mrr_at_10) {
            failures.push(format!("ordering violated on fixture {i}"));
        }
    }
    let elapsed = t.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(5);
    report(1, pass, format!("closed forms to 1e-12, 1000 random orderings; failures: {failures:?}"), elapsed)
}

fn criterion_02_overall_column_fixture() -> bool {
    let t = Instant::now();
    let mut bad = Vec::new();
    for (i, row) in PUBLISHED_ABLATION.iter().enumerate() {
        let got = overall_six(row.precise, row.fuzzy);
        if (got - row.overall).abs() > 0.01 + 1e-9 {
            bad.push(format!("row {} computes {got:.4}, printed {:.2}", i + 1, row.overall));
        }
    }
    let (first, last) = (
        overall_six(PUBLISHED_ABLATION[0].precise, PUBLISHED_ABLATION[0].fuzzy),
        overall_six(PUBLISHED_ABLATION[7].precise, PUBLISHED_ABLATION[7].fuzzy),
    );
    let elapsed = t.elapsed();
    let pass = bad.is_empty() && elapsed < Duration::from_secs(1);
    report(
        2,
        pass,
        format!("baseline {first:.2}, full {last:.2}; {}/8 rows within 0.01; mismatches: {bad:?}", 8 - bad.len()),
        elapsed,
    )
}

fn criterion_03_grouping_oracle() -> bool {
    let t = Instant::now();
    let mut g = rng(3);
    let mut failures = Vec::new();
    let mut exact_boundary_groups = 0;
    for case in 0..50 {
        let n = match case % 10 {
            0 => 2000,
            1..=3 => g.random_range(500..1500),
            _ => g.random_range(5..400),
        };
        let dim = 16;
        let spread = g.random_range(0.05..0.2);
        let mut v = clustered(&mut g, n, dim, 1 + n / 10, spread);
        if case % 5 == 0 {
            v.extend(boundary_star(&format!("b{case}"), dim, 4, false));
        }
        if case % 5 == 1 {
            v.extend(boundary_star(&format!("m{case}"), dim, 4, true));
        }
        let cfg = GroupingConfig { distractor_reuse: case % 2 == 0, ..GroupingConfig::default() };
        let got = group_charts(&v, &cfg).unwrap();
        if let Err(e) = same_groups(&got, &brute_group(&v, &cfg), 1e-9) {
            failures.push(format!("case {case}: {e}"));
        }
        exact_boundary_groups += got.iter().filter(|gr| gr.anchor_similarities.contains(&0.9)).count();
    }
    let elapsed = t.elapsed();
    let pass = failures.is_empty() && exact_boundary_groups > 0 && elapsed < Duration::from_secs(60);
    report(
        3,
        pass,
        format!(
            "50 instances up to 2000 vectors, {exact_boundary_groups} groups at exactly 0.90; failures: {failures:?}"
        ),
        elapsed,
    )
}

fn criterion_04_search_oracle_and_speed() -> bool {
    let t = Instant::now();
    let mut g = rng(4);
    let mut failures = Vec::new();
    for case in 0..100 {
        let n = if case % 20 == 0 { 5000 } else { g.random_range(1..1500) };
        let dim = [4, 16, 64][case % 3];
        let entries = tied_index(&mut g, n, dim);
        let index = VectorIndex::build(entries.clone()).unwrap();
        for _ in 0..3 {
            let q =
                if g.random_bool(0.5) { entries[g.random_range(0..n)].1.clone() } else { unit(gaussian(&mut g, dim)) };
            let k = [1, 10, 100][g.random_range(0..3)];
            let got: Vec<(String, f64)> =
                index.search(&q, k).unwrap().entries.into_iter().map(|e| (e.chart_id, e.score)).collect();
            if got != brute_search(&entries, q.values(), k) {
                failures.push(format!("case {case} (n={n}, k={k})"));
            }
        }
    }
    let oracle_time = t.elapsed();

    let big: Vec<(String, EmbeddingVector)> =
        (0..22_000).map(|i| (format!("c{i:05}"), unit(gaussian(&mut g, 128)))).collect();
    let index = VectorIndex::build(big).unwrap();
    let queries: Vec<(String, EmbeddingVector)> =
        (0..326).map(|i| (format!("q{i}"), unit(gaussian(&mut g, 128)))).collect();
    let tb = Instant::now();
    let lists = index.batch_search(&queries, 10).unwrap();
    let batch = tb.elapsed();
    let pass = failures.is_empty() && lists.len() == 326 && batch < Duration::from_secs(2);
    report(
        4,
        pass,
        format!(
            "100 indexes match full sort ({:.1}s); 326 queries x 22000x128 in {:.3}s; failures: {failures:?}",
            oracle_time.as_secs_f64(),
            batch.as_secs_f64()
        ),
        t.elapsed(),
    )
}

fn criterion_05_gradient_check() -> bool {
    let t = Instant::now();
    let mut g = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a: Vec<Vec<f64>> = (0..8).map(|_| gaussian(&mut g, 16)).collect();
        let b: Vec<Vec<f64>> = (0..8).map(|_| gaussian(&mut g, 16)).collect();
        worst = worst.max(info_nce_fd_check(&a, &b, 0.07, 1e-6).unwrap());
    }
    let row = gaussian(&mut g, 16);
    let same = vec![row; 8];
    let loss = info_nce(&same, &same, 0.07).unwrap().loss;
    let ln_err = (loss - 8f64.ln()).abs();
    let elapsed = t.elapsed();
    let pass = worst <= 1e-4 && ln_err <= 1e-9 && elapsed < Duration::from_secs(30);
    report(5, pass, format!("max relative error {worst:.2e}; |loss - ln 8| = {ln_err:.1e}"), elapsed)
}

const SEEDS: [u64; 3] = [1, 2, 3];

/// Everything criteria 6-8 need from one seed's 2000-chart experiment.
struct SeedRun {
    seed: u64,
    groups: usize,
    untrained_r10: f64,
    trained_r10: f64,
    rows: Vec<AblationRow>,
    crop_r10: f64,
    efficacy_time: Duration,
    ablation_time: Duration,
}

fn seed_runs() -> &'static [SeedRun] {
    static RUNS: OnceLock<Vec<SeedRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        SEEDS
            .iter()
            .map(|&seed| {
                let t = Instant::now();
                let cfg = PipelineConfig { seed, ..PipelineConfig::default() };
                let exp = Experiment::build(&cfg, 2000).unwrap();
                let metrics = MetricConfig::default();
                let tc: TrainConfig = cfg.train_config();
                assert_eq!(tc.preprocess, PreprocessMode::direct_resize());
                assert_eq!(tc.epochs, 20);
                let prep = exp.prepared(&tc).unwrap();
                let pool = exp.eval_pool(tc.preprocess);
                let queries = &exp.benchmark.queries;
                let untrained =
                    evaluate_pool(&pool, queries, &tc.initial_model().unwrap(), &metrics, "untrained").unwrap();
                let (model, _) = train_prepared(&prep, &tc, None).unwrap();
                let trained = evaluate_pool(&pool, queries, &model, &metrics, "trained").unwrap();
                let efficacy_time = t.elapsed();

                let ta = Instant::now();
                let rows = run_ablation(&prep, &pool, queries, &tc, &metrics).unwrap();
                // the ablation's full row retrains the same model
                assert_eq!(rows[7].result.combined.per_query_rank, trained.combined.per_query_rank);
                let ablation_time = ta.elapsed();

                let crop_tc = TrainConfig { preprocess: PreprocessMode::center_crop(), ..tc.clone() };
                let prep_c = exp.prepared(&crop_tc).unwrap();
                let pool_c = exp.eval_pool(crop_tc.preprocess);
                let (crop_model, _) = train_prepared(&prep_c, &crop_tc, None).unwrap();
                let crop = evaluate_pool(&pool_c, queries, &crop_model, &metrics, "crop").unwrap();
                println!(
                    "  seed {seed}: {} accepted groups, untrained R@10 {:.4}, trained R@10 {:.4}, crop R@10 {:.4}",
                    exp.benchmark.accepted_groups(),
                    untrained.combined.recall(10),
                    trained.combined.recall(10),
                    crop.combined.recall(10)
                );
                SeedRun {
                    seed,
                    groups: exp.benchmark.accepted_groups(),
                    untrained_r10: untrained.combined.recall(10),
                    trained_r10: trained.combined.recall(10),
                    rows,
                    crop_r10: crop.combined.recall(10),
                    efficacy_time,
                    ablation_time,
                }
            })
            .collect()
    })
}

fn criterion_06_training_efficacy() -> bool {
    let runs = seed_runs();
    let elapsed: Duration = runs.iter().map(|r| r.efficacy_time).sum();
    let per_seed: Vec<String> = runs
        .iter()
        .map(|r| format!("seed {}: {} groups, +{:.1} pts", r.seed, r.groups, 100.0 * (r.trained_r10 - r.untrained_r10)))
        .collect();
    let ok = runs.iter().filter(|r| r.groups >= 150 && r.trained_r10 - r.untrained_r10 >= 0.30).count();
    let pass = ok == runs.len() && elapsed <= Duration::from_secs(600);
    report(6, pass, format!("{ok}/3 seeds gain >= 30 R@10 points [{}]", per_seed.join("; ")), elapsed)
}

fn criterion_07_insight_combination_direction() -> bool {
    let runs = seed_runs();
    let elapsed: Duration = runs.iter().map(|r| r.efficacy_time + r.ablation_time).sum();
    let mut detail = Vec::new();
    let mut ok = 0;
    for r in runs {
        let full = r.rows.iter().find(|row| row.levels.len() == 3).unwrap().result.overall();
        let singles: Vec<(InsightLevel, f64)> = r
            .rows
            .iter()
            .filter(|row| row.levels.len() == 1)
            .map(|row| (*row.levels.iter().next().unwrap(), row.result.overall()))
            .collect();
        if singles.iter().all(|(_, o)| full >= *o) {
            ok += 1;
        }
        let s: Vec<String> = singles.iter().map(|(l, o)| format!("{} {:.2}", l.as_str(), 100.0 * o)).collect();
        detail.push(format!("seed {}: full {:.2} vs {}", r.seed, 100.0 * full, s.join(", ")));
    }
    let pass = ok >= 2 && elapsed <= Duration::from_secs(1800);
    report(7, pass, format!("{ok}/3 seeds full >= every single level [{}]", detail.join("; ")), elapsed)
}

fn criterion_08_preprocessing_direction() -> bool {
    let t = Instant::now();
    // (a) deterministic: every chart of the first seed's corpus
    let corpus = Experiment::build(&PipelineConfig { seed: SEEDS[0], ..PipelineConfig::default() }, 2000).unwrap();
    let mut crop_ok = 0;
    let mut resize_ok = 0;
    for chart in &corpus.charts {
        let grid = rasterize(chart);
        let has_y = grid.text_anchors.iter().any(|a| a.role == TextRole::YLabel);
        let crop = preprocess(&grid, PreprocessMode::center_crop());
        if has_y && !crop.text_anchors.iter().any(|a| a.role == TextRole::YLabel) {
            crop_ok += 1;
        }
        if preprocess(&grid, PreprocessMode::direct_resize()).text_anchors.len() == grid.text_anchors.len() {
            resize_ok += 1;
        }
    }
    let n = corpus.charts.len();
    let a_pass = crop_ok == n && resize_ok == n;
    let a_time = t.elapsed();

    // (b) directional
    let runs = seed_runs();
    let b_ok = runs.iter().filter(|r| r.trained_r10 >= r.crop_r10).count();
    let per_seed: Vec<String> =
        runs.iter().map(|r| format!("seed {}: {:.4} vs {:.4}", r.seed, r.trained_r10, r.crop_r10)).collect();
    report(
        8,
        a_pass && b_ok >= 2,
        format!(
            "(a) crop drops the y-name on {crop_ok}/{n}, resize keeps all anchors on {resize_ok}/{n} ({:.1}s); (b) resize R@10 >= crop R@10 on {b_ok}/3 seeds [{}]",
            a_time.as_secs_f64(),
            per_seed.join("; ")
        ),
        t.elapsed(),
    )
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn criterion_09_pipeline_invariants() -> bool {
    let t = Instant::now();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let cfg = PipelineConfig { seed: 7, tables: 200, output: d.path().to_path_buf(), ..PipelineConfig::default() };
        run_all(&cfg, StageOptions::default()).unwrap();
    }
    let out = dirs[0].path();
    let corpus = load_corpus(out).unwrap();
    let groups = load_groups(&out.join("groups.jsonl")).unwrap();
    let queries = load_queries(&out.join("queries.jsonl")).unwrap();
    let mut problems = Vec::new();
    if corpus.insights.len() != 3 * corpus.charts.len() {
        problems.push(format!("{} insights for {} charts", corpus.insights.len(), corpus.charts.len()));
    }
    if let Some(g) =
        groups.iter().find(|g| g.distractor_ids.len() != 4 || g.anchor_similarities.iter().any(|&s| s < 0.9))
    {
        problems.push(format!("group {} breaks the distractor rule", g.group_id));
    }
    let embedded = groups.iter().flat_map(|g| g.precise_query.iter().chain(&g.fuzzy_query));
    if let Some(q) = queries.iter().chain(embedded).find(|q| !query_violations(&q.text).is_empty()) {
        problems.push(format!("query {} malformed: {:?}", q.id, q.text));
    }
    let (a, b) = (tree(dirs[0].path()), tree(dirs[1].path()));
    let identical = a == b;
    if !identical {
        problems.push("output trees differ".into());
    }
    let elapsed = t.elapsed();
    let pass = problems.is_empty() && !groups.is_empty() && elapsed <= Duration::from_secs(300);
    report(
        9,
        pass,
        format!(
            "{} charts, {} insights, {} groups, {} queries, {} files byte-identical: {identical}; problems: {problems:?}",
            corpus.charts.len(),
            corpus.insights.len(),
            groups.len(),
            queries.len(),
            a.len()
        ),
        elapsed,
    )
}

fn criterion_10_consensus_rule() -> bool {
    let t = Instant::now();
    let verdict = |yes: usize| {
        validate_consensus(&VoteRecord { query_id: "q".into(), votes: (0..9).map(|i| i < yes).collect(), min_agree: 5 })
    };
    let got = [verdict(4), verdict(5), verdict(6)];
    let pass = got == [Verdict::Rejected, Verdict::Accepted, Verdict::Accepted];
    report(10, pass, format!("4/9, 5/9, 6/9 -> {got:?}"), t.elapsed())
}
