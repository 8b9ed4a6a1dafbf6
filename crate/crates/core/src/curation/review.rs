use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CurationError, QcFinding, Severity};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReviewSelection {
    pub review_ids: Vec<String>,
    pub drop_ids: Vec<String>,
}

/// Samples with any failing finding are dropped. Of the rest,
/// `ceil(budget_fraction * remaining)` with the lowest minimum measure go to
/// review; a sample without findings has measure 1. Ties go to the smaller id.
pub fn select_for_review(
    findings: &BTreeMap<String, Vec<QcFinding>>,
    budget_fraction: f64,
) -> Result<ReviewSelection, CurationError> {
    if !(budget_fraction > 0.0 && budget_fraction <= 1.0) {
        return Err(CurationError::InvalidBudget(budget_fraction));
    }
    let mut selection = ReviewSelection::default();
    let mut kept: Vec<(f64, &String)> = Vec::new();
    for (id, list) in findings {
        if list.iter().any(|f| f.severity == Severity::Fail) {
            selection.drop_ids.push(id.clone());
        } else {
            let worst = list.iter().map(|f| f.measure).fold(1.0, f64::min);
            kept.push((worst, id));
        }
    }
    kept.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    // The epsilon keeps products like 0.1 * 30 = 3.0000000000000004 at 3.
    let quota = ((budget_fraction * kept.len() as f64) - 1e-9).ceil().max(0.0) as usize;
    selection.review_ids = kept
        .into_iter()
        .take(quota)
        .map(|(_, id)| id.clone())
        .collect();
    Ok(selection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curation::QcCheck;

    fn finding(id: &str, severity: Severity, measure: f64) -> QcFinding {
        QcFinding {
            sample_id: id.into(),
            check: QcCheck::Coverage,
            severity,
            measure,
            detail: String::new(),
        }
    }

    fn ids(n: usize) -> BTreeMap<String, Vec<QcFinding>> {
        (0..n).map(|i| (format!("s{i:02}"), Vec::new())).collect()
    }

    #[test]
    fn clean_corpus_reviews_smallest_id() {
        let sel = select_for_review(&ids(10), 0.1).unwrap();
        assert_eq!(sel.review_ids, vec!["s00"]);
        assert!(sel.drop_ids.is_empty());
    }

    #[test]
    fn failures_are_dropped_and_worst_reviewed() {
        let mut m = ids(3);
        m.get_mut("s01").unwrap().push(finding("s01", Severity::Fail, 0.2));
        m.get_mut("s02").unwrap().push(finding("s02", Severity::Warn, 0.8));
        let sel = select_for_review(&m, 0.5).unwrap();
        assert_eq!(sel.drop_ids, vec!["s01"]);
        assert_eq!(sel.review_ids, vec!["s02"]);
    }

    #[test]
    fn full_budget_and_quota_rounding() {
        let sel = select_for_review(&ids(7), 1.0).unwrap();
        assert_eq!(sel.review_ids.len(), 7);
        assert_eq!(select_for_review(&ids(30), 0.1).unwrap().review_ids.len(), 3);
        assert_eq!(select_for_review(&ids(31), 0.1).unwrap().review_ids.len(), 4);
        assert!(select_for_review(&ids(3), 0.0).is_err());
        assert!(select_for_review(&ids(3), 1.5).is_err());
    }
}
