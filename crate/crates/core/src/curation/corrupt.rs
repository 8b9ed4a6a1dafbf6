//! Seeded corruptions of clean annotations, used to measure how reliably
//! the QC checks catch known failure modes.

use crate::docmodel::ContentBlock;
use crate::metrics::{token_spans, TokenMode};
use crate::rng::DetRng;

fn paragraph_positions(blocks: &[ContentBlock]) -> Vec<usize> {
    blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| matches!(b, ContentBlock::Paragraph { .. }))
        .map(|(i, _)| i)
        .collect()
}

/// Inserts a verbatim copy of a randomly chosen paragraph right after it.
/// `None` when there is no paragraph.
pub fn duplicate_paragraph(blocks: &[ContentBlock], rng: &mut DetRng) -> Option<Vec<ContentBlock>> {
    let positions = paragraph_positions(blocks);
    if positions.is_empty() {
        return None;
    }
    let at = positions[rng.index(positions.len())];
    let mut out = blocks.to_vec();
    out.insert(at + 1, blocks[at].clone());
    Some(out)
}

/// Reverses the order of `count` consecutive paragraphs (counting only
/// paragraphs; other blocks keep their slots). `None` when there are fewer
/// than `count` paragraphs.
pub fn reverse_paragraphs(
    blocks: &[ContentBlock],
    count: usize,
    rng: &mut DetRng,
) -> Option<Vec<ContentBlock>> {
    let positions = paragraph_positions(blocks);
    if count < 2 || positions.len() < count {
        return None;
    }
    let start = rng.index(positions.len() - count + 1);
    let window = &positions[start..start + count];
    let mut out = blocks.to_vec();
    for (k, &slot) in window.iter().enumerate() {
        out[slot] = blocks[window[count - 1 - k]].clone();
    }
    Some(out)
}

/// Removes `count` distinct script-aware tokens chosen uniformly at random
/// (surrounding whitespace is kept).
pub fn delete_tokens(text: &str, count: usize, rng: &mut DetRng) -> String {
    let spans = token_spans(text, TokenMode::ScriptAware);
    let mut order: Vec<usize> = (0..spans.len()).collect();
    rng.shuffle(&mut order);
    let mut doomed = vec![false; spans.len()];
    for &i in order.iter().take(count) {
        doomed[i] = true;
    }
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for (span, gone) in spans.iter().zip(&doomed) {
        if *gone {
            out.push_str(&text[cursor..span.start]);
            cursor = span.end;
        }
    }
    out.push_str(&text[cursor..]);
    out
}
