use std::collections::HashMap;
use std::hash::Hash;

use unicode_segmentation::UnicodeSegmentation;

use crate::docmodel::canonicalize;

/// Sentence BLEU over n-gram orders `1..=max_n` with uniform weights.
///
/// Orders n ≥ 2 whose clipped precision is zero are smoothed to
/// `(0 + 1) / (total + 1)`. A zero unigram precision yields 0.
pub fn bleu<T: Eq + Hash>(pred: &[T], reference: &[T], max_n: usize) -> f64 {
    assert!(max_n >= 1, "max_n must be at least 1");
    match (pred.is_empty(), reference.is_empty()) {
        (true, true) => return 1.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    let mut log_sum = 0.0;
    for n in 1..=max_n {
        let (matches, total) = clipped_matches(pred, reference, n);
        let precision = if matches > 0 {
            matches as f64 / total as f64
        } else if n == 1 {
            return 0.0;
        } else {
            1.0 / (total as f64 + 1.0)
        };
        log_sum += precision.ln();
    }
    let geo_mean = (log_sum / max_n as f64).exp();
    let bp = if pred.len() < reference.len() {
        (1.0 - reference.len() as f64 / pred.len() as f64).exp()
    } else {
        1.0
    };
    (bp * geo_mean).clamp(0.0, 1.0)
}

fn clipped_matches<T: Eq + Hash>(pred: &[T], reference: &[T], n: usize) -> (usize, usize) {
    if pred.len() < n {
        return (0, 0);
    }
    let mut ref_counts: HashMap<&[T], usize> = HashMap::new();
    if reference.len() >= n {
        for gram in reference.windows(n) {
            *ref_counts.entry(gram).or_default() += 1;
        }
    }
    let mut matches = 0;
    for gram in pred.windows(n) {
        if let Some(left) = ref_counts.get_mut(gram) {
            if *left > 0 {
                *left -= 1;
                matches += 1;
            }
        }
    }
    (matches, pred.len() - n + 1)
}

/// Length of the longest common subsequence, two DP rows.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut prev = vec![0usize; short.len() + 1];
    let mut cur = vec![0usize; short.len() + 1];
    for x in long {
        for (j, y) in short.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

/// ROUGE-L F1.
pub fn rouge_l<T: PartialEq>(pred: &[T], reference: &[T]) -> f64 {
    if pred.is_empty() && reference.is_empty() {
        return 1.0;
    }
    let l = lcs_len(pred, reference);
    if l == 0 {
        return 0.0;
    }
    let p = l as f64 / pred.len() as f64;
    let r = l as f64 / reference.len() as f64;
    2.0 * p * r / (p + r)
}

/// Unit-cost Levenshtein distance.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut prev: Vec<usize> = (0..=short.len()).collect();
    let mut cur = vec![0usize; short.len() + 1];
    for (i, x) in long.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in short.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

/// Edit distance over grapheme clusters of the canonicalized texts,
/// divided by the longer cluster count. Both empty gives 0.
pub fn levenshtein_norm(pred: &str, reference: &str) -> f64 {
    let pred = canonicalize(pred);
    let reference = canonicalize(reference);
    let a: Vec<&str> = pred.graphemes(true).collect();
    let b: Vec<&str> = reference.graphemes(true).collect();
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 0.0;
    }
    edit_distance(&a, &b) as f64 / longest as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bleu_examples() {
        let t = ["a", "b", "c", "d", "e"];
        assert_eq!(bleu(&t, &t, 4), 1.0);
        assert_eq!(bleu(&["a", "b"], &["a", "c"], 1), 0.5);
        assert_eq!(bleu::<&str>(&[], &["a"], 4), 0.0);
        assert_eq!(bleu::<&str>(&[], &[], 4), 1.0);
        assert_eq!(bleu(&["x"], &["x"], 4), 1.0);
    }

    #[test]
    fn bleu_brevity_penalty() {
        // p1 = 1, BP = exp(1 - 4/2).
        let got = bleu(&["a", "b"], &["a", "b", "c", "d"], 1);
        assert!((got - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn bleu_smoothing_on_empty_higher_orders() {
        // p1 = 2/2, p2 = (0+1)/(1+1) after smoothing.
        let got = bleu(&["a", "b"], &["b", "a"], 2);
        assert!((got - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rouge_examples() {
        assert_eq!(rouge_l(&["a", "b"], &["a", "b"]), 1.0);
        assert!((rouge_l(&["a", "b", "c"], &["a", "c"]) - 0.8).abs() < 1e-15);
        assert_eq!(rouge_l(&["a"], &["b"]), 0.0);
        assert_eq!(rouge_l::<&str>(&[], &[]), 1.0);
        assert_eq!(rouge_l(&[], &["b"]), 0.0);
    }

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein_norm("x", "x"), 0.0);
        assert!((levenshtein_norm("kitten", "sitting") - 3.0 / 7.0).abs() < 1e-15);
        assert_eq!(levenshtein_norm("", "abc"), 1.0);
        assert_eq!(levenshtein_norm("", ""), 0.0);
        // One Thai cluster replaced: 1 edit over 2 clusters.
        assert_eq!(levenshtein_norm("น้ำก", "น้ำข"), 0.5);
        // Canonicalization applies before comparison.
        assert_eq!(levenshtein_norm("a \r\nb", "a\nb"), 0.0);
    }
}
