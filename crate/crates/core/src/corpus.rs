//! On-disk corpus index: one JSON object per line of `manifest.jsonl`.

use serde::{Deserialize, Serialize};

use crate::docmodel::{Language, SupervisionMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStatus {
    Ok,
    Failed,
}

/// One corpus sample. Paths are relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub image_path: String,
    pub gt_path: String,
    pub mode: SupervisionMode,
    pub category: String,
    pub language: Language,
    pub seed: u64,
    pub status: SampleStatus,
    pub config_fingerprint: String,
    /// Text-layer stand-in supplied to models under the metadata condition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ManifestEntry {
    pub fn is_ok(&self) -> bool {
        self.status == SampleStatus::Ok
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
}

impl CorpusManifest {
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            // ManifestEntry holds only strings, integers and unit enums.
            out.push_str(&serde_json::to_string(e).expect("manifest entry serializes"));
            out.push('\n');
        }
        out
    }

    pub fn ok_entries(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(|e| e.is_ok())
    }

    pub fn failed_count(&self) -> usize {
        self.entries.len() - self.ok_entries().count()
    }
}
