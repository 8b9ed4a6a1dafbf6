use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::TokenizationPolicy;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("no records to aggregate")]
    NoRecords,
    #[error("record `{sample_id}`: {field} = {value} is outside [0, 1]")]
    OutOfRange {
        sample_id: String,
        field: &'static str,
        value: f64,
    },
}

/// Scores for one sample; one line of `scores.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub sample_id: String,
    pub category: String,
    pub bleu: f64,
    pub rouge_l: f64,
    pub lev_norm: f64,
}

impl MetricRecord {
    fn check(&self) -> Result<(), MetricsError> {
        for (field, value) in [
            ("bleu", self.bleu),
            ("rouge_l", self.rouge_l),
            ("lev_norm", self.lev_norm),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(MetricsError::OutOfRange {
                    sample_id: self.sample_id.clone(),
                    field,
                    value,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricMeans {
    pub bleu: f64,
    pub rouge_l: f64,
    pub lev_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryStats {
    #[serde(flatten)]
    pub means: MetricMeans,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub per_category: BTreeMap<String, CategoryStats>,
    /// Unweighted mean of the category means.
    pub overall: MetricMeans,
    pub policy: TokenizationPolicy,
}

/// Per-category means, then the unweighted mean of those means.
///
/// Records are folded in (category, sample_id) order so the sums, and
/// therefore the low bits of every mean, do not depend on input order.
pub fn aggregate_report(
    records: &[MetricRecord],
    policy: TokenizationPolicy,
) -> Result<MetricReport, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::NoRecords);
    }
    let mut sorted: Vec<&MetricRecord> = records.iter().collect();
    for r in &sorted {
        r.check()?;
    }
    sorted.sort_by(|a, b| (&a.category, &a.sample_id).cmp(&(&b.category, &b.sample_id)));

    let mut sums: BTreeMap<String, (MetricMeans, usize)> = BTreeMap::new();
    for r in sorted {
        let (acc, n) = sums.entry(r.category.clone()).or_default();
        acc.bleu += r.bleu;
        acc.rouge_l += r.rouge_l;
        acc.lev_norm += r.lev_norm;
        *n += 1;
    }

    let per_category: BTreeMap<String, CategoryStats> = sums
        .into_iter()
        .map(|(cat, (acc, n))| {
            let k = n as f64;
            let means = MetricMeans {
                bleu: acc.bleu / k,
                rouge_l: acc.rouge_l / k,
                lev_norm: acc.lev_norm / k,
            };
            (cat, CategoryStats { means, count: n })
        })
        .collect();

    let k = per_category.len() as f64;
    let mut overall = MetricMeans::default();
    for stats in per_category.values() {
        overall.bleu += stats.means.bleu;
        overall.rouge_l += stats.means.rouge_l;
        overall.lev_norm += stats.means.lev_norm;
    }
    overall.bleu /= k;
    overall.rouge_l /= k;
    overall.lev_norm /= k;

    Ok(MetricReport {
        per_category,
        overall,
        policy,
    })
}

/// Rounds to `decimals` places, ties to even.
pub fn round_half_even(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (x * scale).round_ties_even() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, cat: &str, bleu: f64) -> MetricRecord {
        MetricRecord {
            sample_id: id.into(),
            category: cat.into(),
            bleu,
            rouge_l: bleu,
            lev_norm: 1.0 - bleu,
        }
    }

    #[test]
    fn mean_of_category_means() {
        let records = vec![
            rec("a", "x", 1.0),
            rec("b", "x", 0.0),
            rec("c", "y", 1.0),
        ];
        let report = aggregate_report(&records, TokenizationPolicy::default()).unwrap();
        assert_eq!(report.per_category["x"].means.bleu, 0.5);
        assert_eq!(report.per_category["x"].count, 2);
        assert_eq!(report.overall.bleu, 0.75);
    }

    #[test]
    fn single_record() {
        let report = aggregate_report(&[rec("a", "x", 0.3)], TokenizationPolicy::default()).unwrap();
        assert_eq!(report.per_category["x"].means.bleu, 0.3);
        assert_eq!(report.overall.bleu, 0.3);
    }

    #[test]
    fn errors() {
        assert_eq!(
            aggregate_report(&[], TokenizationPolicy::default()),
            Err(MetricsError::NoRecords)
        );
        assert!(matches!(
            aggregate_report(&[rec("a", "x", 1.5)], TokenizationPolicy::default()),
            Err(MetricsError::OutOfRange { field: "bleu", .. })
        ));
    }

    #[test]
    fn half_even_rounding() {
        assert_eq!(round_half_even(0.0625, 3), 0.062);
        assert_eq!(round_half_even(0.1875, 3), 0.188);
        assert_eq!(round_half_even(0.6441, 3), 0.644);
    }
}
