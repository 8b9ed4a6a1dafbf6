//! The `[qc]` and `[eval]` tables of the shared config file.

use std::path::{Path, PathBuf};

use anyhow::Context;
use ocrkit_core::curation::QcThresholds;
use ocrkit_core::metrics::TokenizationPolicy;
use ocrkit_eval::{ConditionKind, EndpointConfig};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
pub struct Settings {
    #[serde(default)]
    pub qc: QcSettings,
    #[serde(default)]
    pub eval: EvalSettings,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QcSettings {
    #[serde(flatten)]
    pub thresholds: QcThresholds,
    /// Share of passing samples sent to human review.
    pub review_budget: f64,
}

impl Default for QcSettings {
    fn default() -> Self {
        Self {
            thresholds: QcThresholds::default(),
            review_budget: 0.05,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSettings {
    pub condition: ConditionKind,
    pub tokenization: TokenizationPolicy,
    pub predictions: Option<PathBuf>,
    pub endpoint: Option<EndpointConfig>,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            condition: ConditionKind::ImageOnly,
            tokenization: TokenizationPolicy::default(),
            predictions: None,
            endpoint: None,
        }
    }
}

impl Settings {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}
