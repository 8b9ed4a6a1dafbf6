use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::CurationError;
use crate::rng::DetRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub label: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureConfig {
    pub components: Vec<MixtureComponent>,
    pub total_samples: usize,
}

const WEIGHT_TOLERANCE: f64 = 1e-6;

impl MixtureConfig {
    pub fn new(components: &[(&str, f64)], total_samples: usize) -> Result<Self, CurationError> {
        let config = Self {
            components: components
                .iter()
                .map(|(label, weight)| MixtureComponent {
                    label: label.to_string(),
                    weight: *weight,
                })
                .collect(),
            total_samples,
        };
        config.validate()?;
        Ok(config)
    }

    /// V1.5 training mix: V1 corpus, VQA, layout-annotated, synthetic.
    ///
    /// The published shares (53.7/2.2/6.4/37.6%) sum to 99.9%; the synthetic
    /// share carries the rounding residual so the weights sum to one.
    pub fn v15() -> Self {
        Self::new(
            &[
                ("v1_corpus", 0.537),
                ("vqa", 0.022),
                ("layout_annotated", 0.064),
                ("synthetic", 0.377),
            ],
            155_403,
        )
        .expect("preset weights are valid")
    }

    /// V1 training mix. The published shares sum to 100.1%; the long-tail
    /// share carries the rounding residual.
    pub fn v1() -> Self {
        Self::new(
            &[
                ("infographics", 0.456),
                ("cosyn", 0.083),
                ("financial_infographics", 0.072),
                ("thai_books", 0.056),
                ("handwriting_forms", 0.055),
                ("olmocr_scans", 0.062),
                ("reports_and_bills", 0.087),
                ("long_tail", 0.129),
            ],
            77_029,
        )
        .expect("preset weights are valid")
    }

    pub fn validate(&self) -> Result<(), CurationError> {
        let invalid = |reason: String| Err(CurationError::InvalidWeights(reason));
        if self.components.is_empty() {
            return invalid("no components".into());
        }
        if self.total_samples == 0 {
            return invalid("total_samples must be positive".into());
        }
        let mut labels = HashSet::new();
        for c in &self.components {
            if !(c.weight > 0.0 && c.weight <= 1.0) {
                return invalid(format!("weight {} of `{}` outside (0, 1]", c.weight, c.label));
            }
            if !labels.insert(c.label.as_str()) {
                return invalid(format!("duplicate label `{}`", c.label));
            }
        }
        let sum: f64 = self.components.iter().map(|c| c.weight).sum();
        if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
            return invalid(format!("weights sum to {sum}, expected 1"));
        }
        Ok(())
    }

    /// Largest-remainder apportionment of `total_samples`: floors first,
    /// then one extra sample per component in descending fractional part,
    /// ties to the earlier component.
    pub fn allocate(&self) -> Result<Vec<usize>, CurationError> {
        self.validate()?;
        let total = self.total_samples;
        let quotas: Vec<f64> = self
            .components
            .iter()
            .map(|c| c.weight * total as f64)
            .collect();
        let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
        let assigned: usize = counts.iter().sum();
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&a, &b| {
            let fa = quotas[a] - quotas[a].floor();
            let fb = quotas[b] - quotas[b].floor();
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        // Weights summing to 1 ± 1e-6 can leave the floors a sample above
        // or below `total`; the remainder walk corrects either way.
        if assigned <= total {
            for &i in order.iter().cycle().take(total - assigned) {
                counts[i] += 1;
            }
        } else {
            for &i in order.iter().rev().cycle().take(assigned - total) {
                counts[i] -= 1;
            }
        }
        Ok(counts)
    }
}

/// Exact per-component counts laid out as labels in seeded random order.
pub fn mixture_sample(config: &MixtureConfig, seed: u64) -> Result<Vec<String>, CurationError> {
    let counts = config.allocate()?;
    let mut labels: Vec<String> = Vec::with_capacity(config.total_samples);
    for (c, &n) in config.components.iter().zip(&counts) {
        labels.extend(std::iter::repeat(c.label.clone()).take(n));
    }
    DetRng::new(seed).shuffle(&mut labels);
    Ok(labels)
}
