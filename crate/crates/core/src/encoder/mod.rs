//! Features and embeddings for both modalities.
//!
//! Text becomes hashed word and character n-grams; a chart becomes its
//! rasterized occupancy (pooled to 32x32) plus n-grams of the text it
//! renders, after either resizing or center-cropping the canvas. Two linear
//! towers project both into one unit-norm space.

mod chart;
mod grouping;
mod model;
mod remote;
mod text;

pub use chart::{
    extract_chart_features, features_from_grid, pool_grid, preprocess, ChartFeatures, PreprocessKind, PreprocessMode,
    DEFAULT_CHART_FEATURES, GRID_FEATURES, GRID_SIDE,
};
pub use grouping::{GroupingEncoder, GROUPING_DIM};
pub use model::{
    cosine, dot, normalize_or_uniform, DualEncoderModel, ModelShape, CHECKPOINT_MAGIC, DEFAULT_DIM, DEFAULT_TEMPERATURE,
};
pub use remote::{remote_embed, EmbedEndpointConfig, RemoteInput, ENV_EMBED_DIM, ENV_EMBED_URL};
pub use text::{bucket_of, char_trigrams, terms, tokenize, SparseVec, TextFeatures, DEFAULT_TEXT_BUCKETS};
