mod common;

use common::{lexicon, pool, render_spec};
use ocrkit_core::docmodel::{serialize, BlockKind, ContentBlock, SupervisionMode};
use ocrkit_synth::{augment, compose_layout, rasterize_page, AugOp, AugmentationSpec, BlockMix, LayoutSpec, Rect};

fn only(kind: BlockKind) -> BlockMix {
    let mut m = BlockMix {
        heading: 0.0,
        paragraph: 0.0,
        table: 0.0,
        figure: 0.0,
        equation: 0.0,
        list_item: 0.0,
    };
    match kind {
        BlockKind::Heading => m.heading = 1.0,
        BlockKind::Paragraph => m.paragraph = 1.0,
        BlockKind::Table => m.table = 1.0,
        BlockKind::Figure => m.figure = 1.0,
        BlockKind::Equation => m.equation = 1.0,
        BlockKind::ListItem => m.list_item = 1.0,
    }
    m
}

fn overlaps(a: &Rect, b: &Rect) -> bool {
    a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h
}

#[test]
fn thousand_plans_have_disjoint_boxes_inside_margins() {
    let (lex, pool, render) = (lexicon(), pool(), render_spec());
    let margin = render.margins_px;
    let (pw, ph) = render.page_size;
    for seed in 0..1000u64 {
        let layout = LayoutSpec {
            columns: 1 + (seed % 2) as u32,
            ..LayoutSpec::default()
        };
        let plan = compose_layout(&layout, &lex, &pool, &render, seed).unwrap();
        assert!(!plan.blocks.is_empty());
        for (i, a) in plan.blocks.iter().enumerate() {
            let r = a.bbox;
            assert!(r.x >= margin && r.y >= margin && r.x + r.w <= pw - margin && r.y + r.h <= ph - margin);
            for b in &plan.blocks[i + 1..] {
                if a.column == b.column {
                    assert!(!overlaps(&a.bbox, &b.bbox), "seed {seed}: {:?} vs {:?}", a.bbox, b.bbox);
                    assert!(b.bbox.y >= a.bbox.y + a.bbox.h, "reading order, seed {seed}");
                } else {
                    assert!(b.column > a.column);
                }
            }
        }
    }
}

#[test]
fn forced_single_paragraph() {
    let layout = LayoutSpec {
        blocks_per_page: [1, 1],
        block_mix: only(BlockKind::Paragraph),
        ..LayoutSpec::default()
    };
    for seed in 0..20 {
        let plan = compose_layout(&layout, &lexicon(), &pool(), &render_spec(), seed).unwrap();
        assert_eq!(plan.blocks.len(), 1);
        assert_eq!(plan.blocks[0].block.kind(), BlockKind::Paragraph);
    }
}

#[test]
fn forced_three_by_three_tables() {
    let layout = LayoutSpec {
        block_mix: only(BlockKind::Table),
        table_rows: [3, 3],
        table_cols: [3, 3],
        ..LayoutSpec::default()
    };
    for seed in 0..20 {
        let plan = compose_layout(&layout, &lexicon(), &pool(), &render_spec(), seed).unwrap();
        for b in &plan.blocks {
            let ContentBlock::Table(t) = &b.block else { panic!("non-table block") };
            let grid = t.expanded().unwrap();
            assert_eq!(grid.len(), 3);
            assert!(grid.iter().all(|r| r.len() == 3));
        }
    }
}

#[test]
fn rasterized_tree_matches_draw_log() {
    let (lex, pool, render) = (lexicon(), pool(), render_spec());
    for seed in 0..30 {
        let plan = compose_layout(&LayoutSpec::default(), &lex, &pool, &render, seed).unwrap();
        let page = rasterize_page(&plan, &render).unwrap();
        assert_eq!(page.image.dimensions(), render.page_size);
        assert_eq!(page.tree.blocks().len(), plan.blocks.len());
        for (i, block) in page.tree.blocks().iter().enumerate() {
            assert_eq!(block, &plan.blocks[i].block);
            let drawn: Vec<&str> = page
                .draw_log
                .iter()
                .filter(|e| e.block == i)
                .map(|e| e.text.as_str())
                .collect();
            for text in block.texts() {
                if !text.is_empty() {
                    assert!(drawn.contains(&text), "seed {seed} block {i}: {text:?} not drawn");
                }
            }
        }
    }
}

#[test]
fn single_paragraph_page_serializes_to_its_text() {
    let lex = ocrkit_synth::Lexicon::new(vec!["ทดสอบ".into()]).unwrap();
    let layout = LayoutSpec {
        blocks_per_page: [1, 1],
        paragraph_words: [1, 1],
        block_mix: only(BlockKind::Paragraph),
        ..LayoutSpec::default()
    };
    let plan = compose_layout(&layout, &lex, &pool(), &render_spec(), 5).unwrap();
    let page = rasterize_page(&plan, &render_spec()).unwrap();
    assert_eq!(serialize(&page.tree, SupervisionMode::Structure), "ทดสอบ");
}

#[test]
fn illumination_lowers_mean_luminance_of_text_page() {
    let layout = LayoutSpec {
        block_mix: only(BlockKind::Paragraph),
        ..LayoutSpec::default()
    };
    let render = render_spec();
    let plan = compose_layout(&layout, &lexicon(), &pool(), &render, 8).unwrap();
    let page = rasterize_page(&plan, &render).unwrap();
    let spec = AugmentationSpec {
        ops: vec![AugOp::IlluminationGradient { amplitude: 0.3 }],
        fill_color: render.paper_color,
    };
    let dark = augment(&page.image, &spec, 8).unwrap();
    let luma = |img: &image::RgbImage| {
        img.pixels()
            .map(|p| 0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2]))
            .sum::<f64>()
    };
    assert!(luma(&page.image) > luma(&dark));
}
