//! BLEU, ROUGE-L and normalized Levenshtein over canonicalized text, the
//! tokenizer they share, and per-category aggregation.

mod report;
mod score;
mod tokenize;

pub use report::{
    aggregate_report, round_half_even, CategoryStats, MetricMeans, MetricRecord, MetricReport,
    MetricsError,
};
pub use score::{bleu, edit_distance, lcs_len, levenshtein_norm, rouge_l};
pub use tokenize::{token_spans, tokenize, TokenMode, TokenizationPolicy};

use crate::docmodel::canonicalize;

/// Maximum n-gram order used for BLEU in reports.
pub const BLEU_MAX_N: usize = 4;

/// Scores one prediction against its reference with all three metrics.
pub fn score_pair(
    sample_id: &str,
    category: &str,
    pred: &str,
    reference: &str,
    policy: TokenizationPolicy,
) -> MetricRecord {
    let pred_c = canonicalize(pred);
    let ref_c = canonicalize(reference);
    let pt = tokenize(&pred_c, policy);
    let rt = tokenize(&ref_c, policy);
    MetricRecord {
        sample_id: sample_id.to_string(),
        category: category.to_string(),
        bleu: bleu(&pt, &rt, BLEU_MAX_N),
        rouge_l: rouge_l(&pt, &rt),
        lev_norm: levenshtein_norm(&pred_c, &ref_c),
    }
}
