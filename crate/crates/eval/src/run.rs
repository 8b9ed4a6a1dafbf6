use std::collections::BTreeSet;
use std::path::Path;

use ocrkit_core::corpus::CorpusManifest;
use ocrkit_core::metrics::{aggregate_report, score_pair, MetricRecord, TokenizationPolicy};
use rayon::prelude::*;

use crate::error::{EvalError, Result};
use crate::predict::{EvalCondition, PredictionSet};
use crate::report::EvalReport;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRun {
    /// In manifest order.
    pub records: Vec<MetricRecord>,
    pub report: EvalReport,
}

/// Scores every `ok` manifest entry against its prediction. Ground-truth
/// paths are relative to `root`.
pub fn run_eval(
    manifest: &CorpusManifest,
    root: &Path,
    predictions: &PredictionSet,
    policy: TokenizationPolicy,
    condition: &EvalCondition,
) -> Result<EvalRun> {
    let entries: Vec<_> = manifest.ok_entries().collect();
    let records = entries
        .par_iter()
        .map(|e| {
            let path = root.join(&e.gt_path);
            let gt = std::fs::read_to_string(&path).map_err(|err| EvalError::io(&path, err))?;
            Ok(score_pair(&e.id, &e.category, predictions.get(&e.id), &gt, policy))
        })
        .collect::<Result<Vec<_>>>()?;
    let metrics = aggregate_report(&records, policy)?;
    let fingerprints: BTreeSet<&str> = manifest.entries.iter().map(|e| e.config_fingerprint.as_str()).collect();
    let report = EvalReport {
        metrics,
        condition: condition.kind,
        config_fingerprint: fingerprints.into_iter().collect::<Vec<_>>().join(","),
        scored: records.len(),
        flagged: predictions.flagged_count(),
        failed: manifest.failed_count(),
    };
    Ok(EvalRun { records, report })
}
