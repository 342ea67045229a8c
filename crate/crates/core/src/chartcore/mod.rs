//! Shared domain types, corpus files and the embeddings binary format.

mod corpus;
mod embfile;
mod types;

pub use corpus::{
    load_corpus, load_groups, load_jsonl, load_queries, save_corpus, save_groups, save_jsonl, save_queries,
    validate_corpus, Corpus, Violation, CHARTS_FILE, GROUPS_FILE, INSIGHTS_FILE, QUERIES_FILE, SVG_DIR, TABLES_FILE,
};
pub use embfile::{id_hash, read_embeddings, resolve_records, write_embeddings, EmbeddingRecord, EMBEDDINGS_MAGIC};
pub use types::*;
