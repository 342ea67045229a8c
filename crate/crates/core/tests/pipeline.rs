use std::fs;
use std::path::Path;

use csem_core::pipeline::{run_all, run_stage, PipelineConfig, Stage, StageOptions};
use csem_core::CsemError;

fn small(out: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig { seed: 3, tables: 40, output: out.to_path_buf(), ..PipelineConfig::default() };
    cfg.train.epochs = 2;
    cfg
}

const RUN: StageOptions = StageOptions { dry_run: false, remote: false };

#[test]
fn main_flow_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    run_all(&cfg, RUN).unwrap();
    for f in [
        "tables.jsonl",
        "charts.jsonl",
        "insights.jsonl",
        "groups.jsonl",
        "queries.jsonl",
        "votes.jsonl",
        "model.csde",
        "train_log.csv",
        "embeddings.bin",
        "index.json",
        "eval.md",
        "eval.csv",
        "eval.json",
    ] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let log = fs::read_to_string(dir.path().join("train_log.csv")).unwrap();
    assert_eq!(log.lines().count(), 3);

    // re-running a stage over the same inputs reproduces its outputs
    let queries = fs::read(dir.path().join("queries.jsonl")).unwrap();
    let groups = fs::read(dir.path().join("groups.jsonl")).unwrap();
    run_stage(Stage::Queries, &cfg, RUN).unwrap();
    assert_eq!(fs::read(dir.path().join("queries.jsonl")).unwrap(), queries);
    assert_eq!(fs::read(dir.path().join("groups.jsonl")).unwrap(), groups);

    run_stage(Stage::Ablation, &cfg, RUN).unwrap();
    let table = fs::read_to_string(dir.path().join("ablation.md")).unwrap();
    assert_eq!(table.lines().count(), 2 + 8);
}

#[test]
fn eval_without_index_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let err = run_stage(Stage::Eval, &small(dir.path()), RUN).unwrap_err();
    assert!(matches!(err, CsemError::MissingDependency(_)));
    assert!(err.is_validation());
    assert!(err.to_string().contains("index.json"), "{err}");
}

#[test]
fn dry_run_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = small(&out);
    run_stage(Stage::Synth, &cfg, StageOptions { dry_run: true, remote: false }).unwrap();
    run_all(&cfg, StageOptions { dry_run: true, remote: false }).unwrap();
    assert!(!out.exists());
}

#[test]
fn remote_embed_needs_an_endpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    run_stage(Stage::Synth, &cfg, RUN).unwrap();
    if std::env::var(csem_core::encoder::ENV_EMBED_URL).is_err() {
        let err = run_stage(Stage::Embed, &cfg, StageOptions { dry_run: false, remote: true }).unwrap_err();
        assert!(matches!(err, CsemError::InvalidArgument(_)));
    }
}
