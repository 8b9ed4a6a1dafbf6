use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ocrkit_core::corpus::CorpusManifest;
use ocrkit_core::curation::ANCHOR_CAP;
use serde::{Deserialize, Serialize};

use crate::endpoint::{fetch_from_endpoint, Endpoint};
use crate::error::{EvalError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    /// The model also receives the sample's anchor text.
    WithMetadata,
    ImageOnly,
}

impl ConditionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConditionKind::WithMetadata => "with_metadata",
            ConditionKind::ImageOnly => "image_only",
        }
    }
}

impl FromStr for ConditionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "with_metadata" => Ok(ConditionKind::WithMetadata),
            "image_only" => Ok(ConditionKind::ImageOnly),
            other => Err(format!("unknown condition `{other}` (with_metadata | image_only)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCondition {
    pub kind: ConditionKind,
    /// Anchor text is cut to this many grapheme clusters.
    pub anchor_cap: usize,
}

impl EvalCondition {
    pub fn new(kind: ConditionKind) -> Self {
        Self {
            kind,
            anchor_cap: ANCHOR_CAP,
        }
    }

    pub fn image_only() -> Self {
        Self::new(ConditionKind::ImageOnly)
    }

    pub fn with_metadata() -> Self {
        Self::new(ConditionKind::WithMetadata)
    }

    /// Every scored sample must carry anchor text under `with_metadata`.
    pub fn check(&self, manifest: &CorpusManifest) -> Result<()> {
        if self.kind == ConditionKind::WithMetadata {
            if let Some(e) = manifest.ok_entries().find(|e| e.anchor_path.is_none()) {
                return Err(EvalError::MissingAnchor { id: e.id.clone() });
            }
        }
        Ok(())
    }
}

impl fmt::Display for EvalCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    File,
    Endpoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", content = "detail", rename_all = "snake_case")]
pub enum PredictionFlag {
    /// No prediction file for the sample.
    Missing,
    /// The endpoint answered, but not with the documented response shape.
    MalformedResponse(String),
    /// The endpoint kept rejecting the request.
    RequestFailed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    /// One entry per scored sample; flagged samples hold "".
    pub texts: BTreeMap<String, String>,
    pub flags: BTreeMap<String, PredictionFlag>,
    pub provenance: Provenance,
    /// Endpoint URL when `provenance` is `Endpoint`.
    pub endpoint: Option<String>,
}

impl PredictionSet {
    pub fn get(&self, id: &str) -> &str {
        self.texts.get(id).map_or("", String::as_str)
    }

    pub fn flagged_count(&self) -> usize {
        self.flags.len()
    }
}

#[derive(Debug, Clone)]
pub enum PredictionSource {
    /// Directory of `<id>.pred.txt` files.
    Directory(PathBuf),
    Endpoint(Endpoint),
}

/// Predictions for every `ok` entry. `root` is the directory that manifest
/// paths are relative to.
pub fn fetch_predictions(
    manifest: &CorpusManifest,
    root: &Path,
    source: &PredictionSource,
    condition: &EvalCondition,
) -> Result<PredictionSet> {
    condition.check(manifest)?;
    match source {
        PredictionSource::Directory(dir) => read_prediction_dir(manifest, dir),
        PredictionSource::Endpoint(ep) => fetch_from_endpoint(manifest, root, ep, condition),
    }
}

fn read_prediction_dir(manifest: &CorpusManifest, dir: &Path) -> Result<PredictionSet> {
    let mut set = PredictionSet {
        texts: BTreeMap::new(),
        flags: BTreeMap::new(),
        provenance: Provenance::File,
        endpoint: None,
    };
    for e in manifest.ok_entries() {
        let path = dir.join(format!("{}.pred.txt", e.id));
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(err) if err.kind() == std::io::ErrorKind::NotFound => {
                set.flags.insert(e.id.clone(), PredictionFlag::Missing);
                String::new()
            }
            Err(err) => return Err(EvalError::io(path, err)),
        };
        set.texts.insert(e.id.clone(), text);
    }
    Ok(set)
}
