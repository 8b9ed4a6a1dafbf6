use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::docmodel::{canonicalize, parse_structured, ContentBlock};
use crate::metrics::{lcs_len, tokenize, TokenizationPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QcCheck {
    Coverage,
    Duplication,
    Ordering,
    TableWellformed,
    AlignmentLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warn,
    Fail,
}

/// One threshold crossing. `measure` is in `[0, 1]`, higher is healthier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcFinding {
    pub sample_id: String,
    pub check: QcCheck,
    pub severity: Severity,
    pub measure: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QcThresholds {
    pub coverage_fail: f64,
    pub coverage_warn: f64,
    pub ordering_fail: f64,
    /// Warn when `1 - |Δlen| / max(len)` drops below this.
    pub alignment_warn: f64,
}

impl Default for QcThresholds {
    fn default() -> Self {
        Self {
            coverage_fail: 0.70,
            coverage_warn: 0.90,
            ordering_fail: 0.60,
            alignment_warn: 0.5,
        }
    }
}

/// Checks an annotation against the raw text it was derived from.
///
/// Both texts are canonicalized and tokenized with the default
/// script-aware policy; markup in the annotation only adds tokens, so it
/// never lowers coverage or ordering. Measures:
///
/// * coverage: multiset share of raw tokens found in the annotation.
/// * duplication: distinct / total normalized paragraphs of the annotation.
/// * ordering: LCS of the two token streams over the shorter stream.
/// * table_wellformed: 0 when parsing reports any table diagnostic.
/// * alignment_length: `1 - |Δ| / max` over character counts.
pub fn qc_check(
    sample_id: &str,
    raw_text: &str,
    annotation: &str,
    thresholds: &QcThresholds,
) -> Vec<QcFinding> {
    let raw = canonicalize(raw_text);
    let ann = canonicalize(annotation);
    let policy = TokenizationPolicy::default();
    let raw_tokens = tokenize(&raw, policy);
    let ann_tokens = tokenize(&ann, policy);

    let mut findings = Vec::new();
    let mut push = |check, severity, measure: f64, detail: String| {
        findings.push(QcFinding {
            sample_id: sample_id.to_string(),
            check,
            severity,
            measure,
            detail,
        })
    };

    let coverage = coverage(&raw_tokens, &ann_tokens);
    if coverage < thresholds.coverage_fail {
        push(QcCheck::Coverage, Severity::Fail, coverage, format!("{coverage:.3} of raw tokens present"));
    } else if coverage < thresholds.coverage_warn {
        push(QcCheck::Coverage, Severity::Warn, coverage, format!("{coverage:.3} of raw tokens present"));
    }

    let parsed = parse_structured(&ann);
    let mut seen: HashMap<String, usize> = HashMap::new();
    for block in &parsed.blocks {
        if let ContentBlock::Paragraph { text } = block {
            *seen.entry(normalize_paragraph(text)).or_default() += 1;
        }
    }
    let total: usize = seen.values().sum();
    if let Some((para, &max)) = seen.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))) {
        if max >= 2 {
            let measure = seen.len() as f64 / total as f64;
            let preview: String = para.chars().take(40).collect();
            push(QcCheck::Duplication, Severity::Fail, measure, format!("paragraph repeated {max}x: {preview:?}"));
        }
    }

    let shorter = raw_tokens.len().min(ann_tokens.len());
    if shorter > 0 {
        let ordering = lcs_len(&raw_tokens, &ann_tokens) as f64 / shorter as f64;
        if ordering < thresholds.ordering_fail {
            push(QcCheck::Ordering, Severity::Fail, ordering, format!("in-order token share {ordering:.3}"));
        }
    }

    let table_issues: Vec<&str> = parsed
        .diagnostics
        .iter()
        .filter(|d| d.kind.is_table())
        .map(|d| d.message.as_str())
        .collect();
    if !table_issues.is_empty() {
        push(QcCheck::TableWellformed, Severity::Fail, 0.0, table_issues.join("; "));
    }

    let (a, b) = (raw.chars().count(), ann.chars().count());
    let longest = a.max(b);
    if longest > 0 {
        let alignment = 1.0 - a.abs_diff(b) as f64 / longest as f64;
        if alignment < thresholds.alignment_warn {
            push(QcCheck::AlignmentLength, Severity::Warn, alignment, format!("lengths {a} vs {b}"));
        }
    }
    findings
}

fn coverage(raw: &[String], ann: &[String]) -> f64 {
    if raw.is_empty() {
        return 1.0;
    }
    let mut available: HashMap<&str, usize> = HashMap::new();
    for t in ann {
        *available.entry(t.as_str()).or_default() += 1;
    }
    let mut hit = 0usize;
    for t in raw {
        if let Some(n) = available.get_mut(t.as_str()) {
            if *n > 0 {
                *n -= 1;
                hit += 1;
            }
        }
    }
    hit as f64 / raw.len() as f64
}

fn normalize_paragraph(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = "# รายงาน\n\nalpha beta gamma delta\n\nepsilon zeta eta theta\n\niota kappa lambda mu\n\nnu xi omicron pi\n\nrho sigma tau upsilon";

    fn checks(findings: &[QcFinding]) -> Vec<(QcCheck, Severity)> {
        findings.iter().map(|f| (f.check, f.severity)).collect()
    }

    #[test]
    fn identity_has_no_findings() {
        assert!(qc_check("s", DOC, DOC, &QcThresholds::default()).is_empty());
    }

    #[test]
    fn duplicated_paragraph_fails() {
        let ann = format!("{DOC}\n\nalpha beta gamma delta");
        let f = qc_check("s", DOC, &ann, &QcThresholds::default());
        assert_eq!(checks(&f), vec![(QcCheck::Duplication, Severity::Fail)]);
        assert!((f[0].measure - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_paragraphs_fail_ordering() {
        let paras: Vec<&str> = DOC.split("\n\n").skip(1).collect();
        let mut rev = paras.clone();
        rev.reverse();
        let raw = paras.join("\n\n");
        let ann = rev.join("\n\n");
        let f = qc_check("s", &raw, &ann, &QcThresholds::default());
        // Oracle: every paragraph has four distinct words and no word is
        // shared across paragraphs, so the LCS is one paragraph: 4 / 20.
        assert_eq!(checks(&f), vec![(QcCheck::Ordering, Severity::Fail)]);
        assert!((f[0].measure - 0.2).abs() < 1e-12);
    }

    #[test]
    fn deletion_lowers_coverage() {
        let raw = "a b c d e f g h i j";
        let f = qc_check("s", raw, "a b c d e f g", &QcThresholds::default());
        // Coverage exactly 0.70 is a warning, not a failure.
        assert_eq!(checks(&f), vec![(QcCheck::Coverage, Severity::Warn)]);
        let f = qc_check("s", raw, "a b c d e f", &QcThresholds::default());
        assert_eq!(checks(&f), vec![(QcCheck::Coverage, Severity::Fail)]);
        assert!((f[0].measure - 0.6).abs() < 1e-12);
    }

    #[test]
    fn broken_table_and_length_mismatch() {
        let raw = "x y z w v u t s r q p o n m l k j i h g f e d c b a aa bb cc dd";
        let ann = format!("{raw}\n\n<table><tr><td>x</td></tr>");
        let f = qc_check("s", raw, &ann, &QcThresholds::default());
        assert_eq!(checks(&f), vec![(QcCheck::TableWellformed, Severity::Fail)]);

        let f = qc_check("s", "a", "a b c d e f", &QcThresholds::default());
        assert_eq!(checks(&f), vec![(QcCheck::AlignmentLength, Severity::Warn)]);
    }
}
