//! Client for an external embedding service, so other encoders can be
//! evaluated through the same harness.

use std::time::Duration;

use serde_json::{json, Value};

use super::model::normalize_or_uniform;
use crate::chartcore::EmbeddingVector;
use crate::{http, CsemError, Result};

pub const ENV_EMBED_URL: &str = "CSEM_EMBED_URL";
pub const ENV_EMBED_DIM: &str = "CSEM_EMBED_DIM";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RemoteInput {
    Text(String),
    Svg(String),
}

impl RemoteInput {
    fn to_json(&self) -> Value {
        match self {
            RemoteInput::Text(t) => Value::String(t.clone()),
            RemoteInput::Svg(s) => json!({ "svg": s }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedEndpointConfig {
    pub url: String,
    /// Checked against every returned vector when set.
    pub expected_dim: Option<usize>,
    pub batch_size: usize,
    pub concurrency: usize,
    pub timeout: Duration,
}

impl EmbedEndpointConfig {
    pub fn new(url: impl Into<String>) -> Self {
        EmbedEndpointConfig {
            url: url.into(),
            expected_dim: None,
            batch_size: 32,
            concurrency: 4,
            timeout: Duration::from_secs(60),
        }
    }

    pub fn from_env() -> Result<Option<Self>> {
        let Some(url) = std::env::var(ENV_EMBED_URL).ok().filter(|u| !u.is_empty()) else {
            return Ok(None);
        };
        let mut cfg = EmbedEndpointConfig::new(url);
        if let Ok(d) = std::env::var(ENV_EMBED_DIM) {
            let d = d
                .trim()
                .parse()
                .map_err(|_| CsemError::InvalidArgument(format!("{ENV_EMBED_DIM}={d} is not a dimension")))?;
            cfg.expected_dim = Some(d);
        }
        Ok(Some(cfg))
    }
}

fn embed_batch(batch: &[RemoteInput], cfg: &EmbedEndpointConfig) -> Result<Vec<Vec<f64>>> {
    let body = json!({ "inputs": batch.iter().map(RemoteInput::to_json).collect::<Vec<_>>() });
    let resp = http::post_json(&cfg.url, &body, cfg.timeout)?;
    let vectors = resp
        .get("vectors")
        .and_then(Value::as_array)
        .ok_or_else(|| CsemError::Service("response has no `vectors` array".into()))?;
    if vectors.len() != batch.len() {
        return Err(CsemError::Service(format!("sent {} inputs, got {} vectors", batch.len(), vectors.len())));
    }
    vectors
        .iter()
        .map(|v| {
            v.as_array()
                .and_then(|xs| xs.iter().map(Value::as_f64).collect::<Option<Vec<f64>>>())
                .ok_or_else(|| CsemError::Service("vector entries must be numbers".into()))
        })
        .collect()
}

/// Embed inputs remotely, in order, re-normalizing every vector locally.
/// Batches run `concurrency` at a time.
pub fn remote_embed(inputs: &[RemoteInput], cfg: &EmbedEndpointConfig) -> Result<Vec<EmbeddingVector>> {
    if inputs.is_empty() {
        return Ok(Vec::new());
    }
    let batches: Vec<&[RemoteInput]> = inputs.chunks(cfg.batch_size.max(1)).collect();
    let mut raw: Vec<Vec<f64>> = Vec::with_capacity(inputs.len());
    for wave in batches.chunks(cfg.concurrency.max(1)) {
        let results: Vec<Result<Vec<Vec<f64>>>> = std::thread::scope(|s| {
            let handles: Vec<_> = wave.iter().map(|b| s.spawn(move || embed_batch(b, cfg))).collect();
            handles.into_iter().map(|h| h.join().expect("embedding worker panicked")).collect()
        });
        for r in results {
            raw.extend(r?);
        }
    }
    let dim = cfg.expected_dim.unwrap_or(raw[0].len());
    if let Some(bad) = raw.iter().find(|v| v.len() != dim) {
        return Err(CsemError::DimMismatch { expected: dim, actual: bad.len() });
    }
    if dim == 0 {
        return Err(CsemError::Service("service returned empty vectors".into()));
    }
    Ok(raw.into_iter().map(normalize_or_uniform).collect())
}
