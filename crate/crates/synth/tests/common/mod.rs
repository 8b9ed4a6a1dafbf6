#![allow(dead_code)]

use std::path::PathBuf;

use ocrkit_synth::{AssetPool, Font, Lexicon, RenderSpec};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn sarabun() -> Font {
    Font::load(&fixture("fonts/Sarabun-Regular.ttf")).unwrap()
}

pub fn mono() -> Font {
    Font::load(&fixture("fonts/DejaVuSansMono.ttf")).unwrap()
}

pub fn lexicon() -> Lexicon {
    Lexicon::merge(vec![
        Lexicon::load(&fixture("lexicon/thai_words.txt")).unwrap(),
        Lexicon::load(&fixture("lexicon/english_words.txt")).unwrap(),
    ])
    .unwrap()
}

pub fn pool() -> AssetPool {
    AssetPool::load(
        Some(&fixture("assets/assets.json")),
        Some(&fixture("assets/equations.txt")),
    )
    .unwrap()
}

pub fn render_spec() -> RenderSpec {
    RenderSpec {
        fonts: vec![sarabun()],
        equation_font: Some(mono()),
        handwriting_fonts: Vec::new(),
        handwriting_fraction: 0.0,
        font_size_range: (12, 18),
        page_size: (1240, 1754),
        margins_px: 90,
        line_spacing_factor: 1.5,
        ink_color: [20, 20, 20],
        paper_color: [252, 250, 245],
    }
}
