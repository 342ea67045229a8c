use csem_core::chartcore::{load_corpus, save_corpus, validate_corpus};
use csem_core::pipeline::{add_insights, synth_corpus};

#[test]
fn save_load_round_trip() {
    let mut corpus = synth_corpus(12, 6, 4).unwrap();
    let dropped = add_insights(&mut corpus, None);
    assert!(dropped.is_empty());
    assert_eq!(corpus.insights.len(), 3 * corpus.charts.len());
    assert!(validate_corpus(&corpus.charts, &corpus.insights).is_empty());

    let dir = tempfile::tempdir().unwrap();
    save_corpus(&corpus, dir.path()).unwrap();
    let back = load_corpus(dir.path()).unwrap();
    assert_eq!(back.charts, corpus.charts);
    assert_eq!(back.insights, corpus.insights);
    assert_eq!(back.tables, corpus.tables);
    for c in &corpus.charts {
        assert!(dir.path().join(&c.svg_path).exists());
    }
}

#[test]
fn synthesis_is_seeded() {
    let a = synth_corpus(3, 5, 6).unwrap();
    let b = synth_corpus(3, 5, 6).unwrap();
    let c = synth_corpus(4, 5, 6).unwrap();
    assert_eq!(a.charts, b.charts);
    assert_ne!(a.charts, c.charts);
}

#[test]
fn truncated_jsonl_names_the_line() {
    let corpus = synth_corpus(1, 2, 2).unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_corpus(&corpus, dir.path()).unwrap();
    let path = dir.path().join("charts.jsonl");
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, format!("{text}{{\"id\": \n")).unwrap();
    let err = load_corpus(dir.path()).unwrap_err().to_string();
    assert!(err.contains("charts.jsonl"), "{err}");
}
