use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use ocrkit_core::metrics::{round_half_even, MetricMeans, MetricRecord, MetricReport};
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::predict::ConditionKind;

/// Aggregate scores plus the context needed to read them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub metrics: MetricReport,
    pub condition: ConditionKind,
    /// Generation config fingerprint(s) of the scored corpus, comma-joined.
    pub config_fingerprint: String,
    pub scored: usize,
    /// Samples scored with an empty prediction because none was obtained.
    pub flagged: usize,
    /// Manifest entries whose generation failed; not scored.
    pub failed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

fn cells(m: &MetricMeans) -> String {
    let r = |x: f64| format!("{:.3}", round_half_even(x, 3));
    format!("{} | {} | {}", r(m.bleu), r(m.rouge_l), r(m.lev_norm))
}

pub fn render_report(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Markdown => {
            let mut s = String::new();
            s.push_str("| Category | BLEU↑ | ROUGE-L↑ | Levenshtein↓ |\n");
            s.push_str("|---|---|---|---|\n");
            for (name, stats) in &report.metrics.per_category {
                let _ = writeln!(s, "| {name} | {} |", cells(&stats.means));
            }
            let _ = writeln!(s, "| Average | {} |", cells(&report.metrics.overall));
            s.push('\n');
            let _ = writeln!(
                s,
                "Tokenization: {}. Condition: {}. Config: {}.",
                report.metrics.policy,
                report.condition.as_str(),
                if report.config_fingerprint.is_empty() { "n/a" } else { &report.config_fingerprint },
            );
            let _ = writeln!(
                s,
                "Scored: {}. Flagged (empty prediction): {}. Failed generation: {}.",
                report.scored, report.flagged, report.failed
            );
            s
        }
    }
}

pub fn scores_jsonl(records: &[MetricRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn parse_scores(text: &str) -> Result<Vec<MetricRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| EvalError::Config(format!("scores line {}: {e}", i + 1)))
        })
        .collect()
}

/// Writes `scores.jsonl`, `report.md` and `report.json` into `dir`.
pub fn write_outputs(dir: &Path, records: &[MetricRecord], report: &EvalReport) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| EvalError::io(dir, e))?;
    for (name, body) in [
        ("scores.jsonl", scores_jsonl(records)),
        ("report.md", render_report(report, ReportFormat::Markdown)),
        ("report.json", render_report(report, ReportFormat::Json)),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| EvalError::io(&path, e))?;
    }
    Ok(())
}
