use std::path::Path;
use std::process::{Command, Output};

fn csem(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csem"))
        .args(args)
        .current_dir(dir)
        .env_remove("CSEM_EMBED_URL")
        .env_remove("CSEM_LLM_URL")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unknown_flag_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = csem(&["all", "--frobnicate"], dir.path());
    assert_eq!(o.status.code(), Some(64));
    assert!(stderr(&o).contains("Usage"), "{}", stderr(&o));
    assert_eq!(csem(&["nonsense"], dir.path()).status.code(), Some(64));
}

#[test]
fn help_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = csem(&["--help"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("preprocess-compare"));
}

#[test]
fn eval_without_index_names_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = csem(&["eval", "--output", "out"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("index.json"), "{}", stderr(&o));
}

#[test]
fn unreadable_config_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = csem(&["synth", "--config", "missing.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_config_is_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "seed = 1\nno_such_key = 2\n").unwrap();
    assert_eq!(csem(&["synth", "--config", "bad.toml"], dir.path()).status.code(), Some(1));
    std::fs::write(dir.path().join("zero.toml"), "[grouping]\ngroup_size = 1\n").unwrap();
    assert_eq!(csem(&["synth", "--config", "zero.toml"], dir.path()).status.code(), Some(1));
}

#[test]
fn dry_run_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let o = csem(&["synth", "--dry-run", "--tables", "5", "--output", "out"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn seed_flag_overrides_config_and_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "seed = 99\ntables = 30\n[train]\nepochs = 2\n").unwrap();
    for out in ["a", "b"] {
        let o = csem(&["all", "--config", "c.toml", "--seed", "4", "--jobs", "1", "--output", out], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let o = csem(&["synth", "--config", "c.toml", "--output", "c"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    for f in ["charts.jsonl", "queries.jsonl", "model.csde", "embeddings.bin", "eval.json"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        assert_eq!(a, std::fs::read(dir.path().join("b").join(f)).unwrap(), "{f} differs");
    }
    let seeded = std::fs::read(dir.path().join("a/charts.jsonl")).unwrap();
    assert_ne!(seeded, std::fs::read(dir.path().join("c/charts.jsonl")).unwrap());
}
