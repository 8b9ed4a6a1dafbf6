//! Property tests over randomly built document trees and arbitrary text.

use ocrkit_core::docmodel::{
    build_tree, canonicalize, parse_structured, serialize, ContentBlock, DocumentTree, Language,
    SupervisionMode, Table, TableCell,
};
use proptest::prelude::*;

const WORDS: &[&str] = &[
    "ก", "น้ำ", "ภาษาไทย", "ที่", "ข้อมูล", "report", "Q3", "42", "3.5%", "#", "-", "*", "|", "<b>",
    "&", "&lt;", "<table>", "<td", "$", "\\", "x^2", "(a)", "1.",
];

fn words(max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 1..max).prop_map(|w| w.join(" "))
}

fn lines(max_lines: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(words(8), 1..max_lines).prop_map(|l| l.join("\n"))
}

fn table() -> impl Strategy<Value = Table> {
    (1usize..4, 1usize..5, any::<bool>())
        .prop_flat_map(|(rows, cols, merged_header)| {
            let cell = prop_oneof![1 => Just(String::new()), 4 => words(4)];
            (prop::collection::vec(prop::collection::vec(cell, cols), rows), Just(merged_header))
        })
        .prop_map(|(grid, merged_header)| {
            let cols = grid[0].len();
            let mut rows: Vec<Vec<TableCell>> = grid
                .into_iter()
                .map(|r| r.into_iter().map(TableCell::new).collect())
                .collect();
            if merged_header && cols > 1 {
                let text = rows[0][0].text.clone();
                rows.insert(0, vec![TableCell::spanning(text, cols as u32, 1)]);
            }
            Table { rows }
        })
}

fn block() -> impl Strategy<Value = ContentBlock> {
    prop_oneof![
        (1u8..=6, words(6)).prop_map(|(l, t)| ContentBlock::heading(l, t)),
        lines(4).prop_map(ContentBlock::paragraph),
        table().prop_map(ContentBlock::Table),
        words(8).prop_map(ContentBlock::figure),
        lines(3).prop_map(ContentBlock::equation),
        (0u8..=4, words(6)).prop_map(|(d, t)| ContentBlock::list_item(d, t)),
    ]
}

fn tree() -> impl Strategy<Value = DocumentTree> {
    prop::collection::vec(block(), 1..8)
        .prop_filter_map("invalid tree", |blocks| build_tree(blocks, Language::Mixed).ok())
}

fn markup_soup() -> impl Strategy<Value = String> {
    let pieces = prop::sample::select(vec![
        "<table>", "</table>", "<tr>", "</tr>", "<td>", "</td>", "<td colspan=\"2\">",
        "<td rowspan=\"x\">", "<figure>", "</figure>", "$$", "\n", "\n\n", "# ", "| a | b |",
        "| --- |", "- ", "\\", "&amp;", "&#x", "ก", "น้ำ", " ", "\r\n", "\u{0}",
    ]);
    prop::collection::vec(pieces, 0..40).prop_map(|p| p.concat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn structure_round_trip_is_exact(t in tree()) {
        let text = serialize(&t, SupervisionMode::Structure);
        let parsed = parse_structured(&text);
        prop_assert!(parsed.diagnostics.is_empty(), "{:?}\n{text}", parsed.diagnostics);
        prop_assert_eq!(parsed.blocks.as_slice(), t.blocks(), "{}", text);
    }

    #[test]
    fn default_mode_never_emits_structure_tags(t in tree()) {
        let text = serialize(&t, SupervisionMode::Default).to_lowercase();
        for tag in ["<table", "<figure", "<td"] {
            prop_assert!(!text.contains(tag), "{tag} in {text}");
        }
    }

    #[test]
    fn serialization_is_deterministic_and_canonical(t in tree()) {
        for mode in [SupervisionMode::Default, SupervisionMode::Structure] {
            let a = serialize(&t, mode);
            prop_assert_eq!(&a, &serialize(&t.clone(), mode));
            prop_assert_eq!(canonicalize(&a), a);
        }
    }

    #[test]
    fn canonicalize_is_idempotent(s in any::<String>(), soup in markup_soup()) {
        for text in [s, soup] {
            let once = canonicalize(&text);
            prop_assert_eq!(canonicalize(&once), once);
        }
    }

    #[test]
    fn parser_is_total(s in any::<String>(), soup in markup_soup()) {
        for text in [s, soup] {
            let parsed = parse_structured(&text);
            for d in &parsed.diagnostics {
                prop_assert!(d.line >= 1);
            }
        }
    }
}
