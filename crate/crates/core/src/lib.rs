//! Text-to-chart retrieval at desk scale.
//!
//! The crate covers three pipelines that share one set of domain types:
//!
//! - chart synthesis: themed tables, rule-based chart recommendation, SVG
//!   rendering and occupancy rasterization ([`chartsynth`]), followed by
//!   three levels of semantic insights per chart ([`statinsight`]);
//! - benchmark construction: similarity grouping of a target with four
//!   distractors, precise and fuzzy query generation and consensus voting
//!   ([`benchgen`]);
//! - a two-tower contrastive encoder ([`encoder`], [`trainer`]), exact
//!   cosine search ([`retrieval`]) and ranking metrics plus the ablation,
//!   preprocessing and text-to-OCR experiments ([`evalharness`]).
//!
//! [`pipeline`] wires the stages together behind a single seeded config.

pub mod benchgen;
pub mod chartcore;
pub mod chartsynth;
pub mod encoder;
mod error;
pub mod evalharness;
mod http;
pub mod pipeline;
pub mod retrieval;
pub mod seeds;
pub mod statinsight;
pub mod trainer;

pub use error::{CsemError, Result};

pub use chartcore::{
    BenchmarkGroup, Cell, ChartSpec, ChartType, Column, ColumnKind, EmbeddingVector, EvalReport, GroupStatus, Insight,
    InsightLevel, Point, Provenance, QueryKind, RankedEntry, RankedList, Series, StyleParams, Table, TextQuery, Theme,
    XValue,
};
