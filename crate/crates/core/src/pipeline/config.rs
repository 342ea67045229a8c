use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::benchgen::{GroupingConfig, RaterModel};
use crate::encoder::{EmbedEndpointConfig, GroupingEncoder};
use crate::evalharness::MetricConfig;
use crate::statinsight::EndpointConfig;
use crate::trainer::TrainConfig;
use crate::{seeds, CsemError, Result};

/// Every knob of a pipeline run. Loaded from TOML; missing keys take the
/// defaults below. The training seed is always derived from `seed`, so
/// one master seed governs every stochastic step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub tables: usize,
    pub max_charts_per_table: usize,
    pub output: PathBuf,
    pub grouping: GroupingConfig,
    /// Weight of rendered-text features in the grouping encoder.
    pub grouping_ocr_weight: f64,
    pub raters: RaterModel,
    pub train: TrainConfig,
    pub metrics: MetricConfig,
    /// Worker threads; `None` uses all cores.
    pub jobs: Option<usize>,
    /// Chat-completion endpoint for insights and queries; `CSEM_LLM_URL`
    /// and `CSEM_LLM_MODEL` override these.
    pub llm_url: Option<String>,
    pub llm_model: Option<String>,
    /// Embedding service; `CSEM_EMBED_URL` and `CSEM_EMBED_DIM` override.
    pub embed_url: Option<String>,
    pub embed_dim: Option<usize>,
    /// Crowd votes (`query_id`, `votes`) to use instead of simulated raters.
    pub votes_input: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 7,
            tables: 200,
            max_charts_per_table: 6,
            output: PathBuf::from("csem-out"),
            grouping: GroupingConfig::default(),
            grouping_ocr_weight: GroupingEncoder::DEFAULT_OCR_WEIGHT,
            raters: RaterModel::default(),
            train: TrainConfig::default(),
            metrics: MetricConfig::default(),
            jobs: None,
            llm_url: None,
            llm_model: None,
            embed_url: None,
            embed_dim: None,
            votes_input: None,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| CsemError::InvalidArgument(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CsemError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    pub fn validate(&self) -> Result<()> {
        if self.tables == 0 {
            return Err(CsemError::InvalidArgument("tables must be at least 1".into()));
        }
        if self.max_charts_per_table == 0 {
            return Err(CsemError::InvalidArgument("max_charts_per_table must be at least 1".into()));
        }
        if self.grouping_ocr_weight.is_nan() || self.grouping_ocr_weight < 0.0 {
            return Err(CsemError::InvalidArgument("grouping_ocr_weight must be non-negative".into()));
        }
        if self.raters.min_agree < 1 || self.raters.min_agree > self.raters.n_raters {
            return Err(CsemError::InvalidArgument("raters.min_agree must be within 1..=n_raters".into()));
        }
        self.grouping.validate()?;
        self.train.validate()?;
        self.metrics.validate()
    }

    /// Training config with its seed derived from the master seed.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig { seed: seeds::sub_seed(self.seed, "train"), ..self.train.clone() }
    }

    pub fn llm_endpoint(&self) -> Option<EndpointConfig> {
        if let Some(cfg) = EndpointConfig::from_env() {
            return Some(cfg);
        }
        let url = self.llm_url.clone().filter(|u| !u.is_empty())?;
        let mut cfg = EndpointConfig::new(url, self.llm_model.clone().unwrap_or_else(|| "default".into()));
        if let Some(m) = std::env::var(crate::statinsight::ENV_LLM_MODEL).ok().filter(|m| !m.is_empty()) {
            cfg.model = m;
        }
        Some(cfg)
    }

    pub fn embed_endpoint(&self) -> Result<Option<EmbedEndpointConfig>> {
        if let Some(cfg) = EmbedEndpointConfig::from_env()? {
            return Ok(Some(cfg));
        }
        Ok(self.embed_url.clone().filter(|u| !u.is_empty()).map(|url| {
            let mut cfg = EmbedEndpointConfig::new(url);
            cfg.expected_dim = self.embed_dim;
            cfg
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let cfg = PipelineConfig::default();
        assert_eq!(PipelineConfig::from_toml_str(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn partial_file_uses_defaults() {
        let cfg = PipelineConfig::from_toml_str("seed = 11\ntables = 20\n[grouping]\nthreshold = 0.8\n").unwrap();
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.grouping.threshold, 0.8);
        assert_eq!(cfg.grouping.group_size, 5);
        assert_eq!(cfg.train.epochs, 20);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(PipelineConfig::from_toml_str("sed = 1\n").is_err());
    }
}
