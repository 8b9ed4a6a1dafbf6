use std::collections::HashMap;
use std::path::Path;

use ocrkit_core::corpus::{CorpusManifest, ManifestEntry};

use crate::error::{EvalError, Result};

pub fn load_manifest(path: &Path) -> Result<CorpusManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| EvalError::io(path, e))?;
    parse_manifest(&text)
}

/// Parses JSON lines; blank lines are skipped but still counted, so line
/// numbers in errors match the file.
pub fn parse_manifest(text: &str) -> Result<CorpusManifest> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry = serde_json::from_str(line).map_err(|e| EvalError::MalformedManifestLine {
            line: line_no,
            reason: e.to_string(),
        })?;
        if entry.id.is_empty() {
            return Err(EvalError::MalformedManifestLine {
                line: line_no,
                reason: "empty id".into(),
            });
        }
        if seen.insert(entry.id.clone(), line_no).is_some() {
            return Err(EvalError::DuplicateId {
                id: entry.id,
                line: line_no,
            });
        }
        entries.push(entry);
    }
    Ok(CorpusManifest { entries })
}
