//! Quality control for annotated samples, review-set selection, image
//! resize policies, corpus-mixture sampling and the anchor-text cap.

pub mod corrupt;
mod mixture;
mod qc;
mod resize;
mod review;

use thiserror::Error;
use unicode_segmentation::UnicodeSegmentation;

pub use mixture::{mixture_sample, MixtureComponent, MixtureConfig};
pub use qc::{qc_check, QcCheck, QcFinding, QcThresholds, Severity};
pub use resize::{resize_image, ResizePolicy, ResizeVariant};
pub use review::{select_for_review, ReviewSelection};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurationError {
    #[error("image has a zero dimension ({width}x{height})")]
    ZeroDimension { width: u32, height: u32 },
    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),
    #[error("review budget {0} outside (0, 1]")]
    InvalidBudget(f64),
}

/// Default anchor-text length, in extended grapheme clusters.
pub const ANCHOR_CAP: usize = 8000;

/// Keeps the first `cap` grapheme clusters of `text`.
pub fn cap_anchor_text(text: &str, cap: usize) -> &str {
    match text.grapheme_indices(true).nth(cap) {
        Some((cut, _)) => &text[..cut],
        None => text,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_cap_counts_clusters() {
        assert_eq!(cap_anchor_text("น้ำนา", 1), "น้ำ");
        assert_eq!(cap_anchor_text("abc", 3), "abc");
        assert_eq!(cap_anchor_text("abc", 0), "");
        let long = "ก".repeat(ANCHOR_CAP + 10);
        assert_eq!(cap_anchor_text(&long, ANCHOR_CAP).chars().count(), ANCHOR_CAP);
    }
}
