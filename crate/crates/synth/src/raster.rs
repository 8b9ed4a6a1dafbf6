use image::imageops::{self, FilterType};
use image::{Rgb, RgbImage};
use ocrkit_core::docmodel::{build_tree, BlockKind, DocumentTree, Language};
use serde::Serialize;

use crate::error::{Result, SynthError};
use crate::layout::{BlockRender, PagePlan, Rect, CELL_PAD};
use crate::text::{draw_text, RenderSpec};

const BULLET_PX: u32 = 6;

/// One string handed to the renderer, recorded for pairing audits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DrawEvent {
    pub block: usize,
    pub kind: BlockKind,
    pub text: String,
}

#[derive(Debug, Clone)]
pub struct RasterizedPage {
    pub image: RgbImage,
    pub tree: DocumentTree,
    pub draw_log: Vec<DrawEvent>,
}

/// Draws every planned block and returns the page with its ground truth.
/// The tree is built from the same blocks whose strings were drawn.
pub fn rasterize_page(plan: &PagePlan, render: &RenderSpec) -> Result<RasterizedPage> {
    let (w, h) = plan.page_size;
    let mut image = RgbImage::from_pixel(w, h, Rgb(render.paper_color));
    let ink = render.ink_color;
    let mut log = Vec::new();

    for (i, placed) in plan.blocks.iter().enumerate() {
        let b = placed.bbox;
        let kind = placed.block.kind();
        let mut record = |text: &str| {
            log.push(DrawEvent {
                block: i,
                kind,
                text: text.to_string(),
            })
        };
        match &placed.render {
            BlockRender::Text {
                layout,
                indent_px,
                bullet,
            } => {
                if *bullet {
                    let cy = b.y + layout.line_height / 2;
                    let bx = (b.x + indent_px).saturating_sub(BULLET_PX * 3);
                    fill(&mut image, Rect::new(bx, cy.saturating_sub(BULLET_PX / 2), BULLET_PX, BULLET_PX), ink);
                }
                record(&layout.text);
                draw_text(&mut image, layout, b.x + indent_px, b.y, ink);
            }
            BlockRender::Equation { layout, indent_px } => {
                record(&layout.text);
                draw_text(&mut image, layout, b.x + indent_px, b.y, ink);
            }
            BlockRender::Figure { image: asset, description } => {
                record(description);
                let scaled = imageops::resize(asset.as_ref(), b.w, b.h, FilterType::Triangle);
                imageops::replace(&mut image, &scaled, i64::from(b.x), i64::from(b.y));
            }
            BlockRender::Table { cells } => {
                for cell in cells {
                    let r = Rect::new(b.x + cell.rect.x, b.y + cell.rect.y, cell.rect.w + 1, cell.rect.h + 1);
                    outline(&mut image, r, ink);
                    match &cell.text {
                        Some(layout) => {
                            record(&layout.text);
                            draw_text(&mut image, layout, r.x + CELL_PAD, r.y + CELL_PAD, ink);
                        }
                        None => record(""),
                    }
                }
            }
        }
    }

    let blocks: Vec<_> = plan.blocks.iter().map(|p| p.block.clone()).collect();
    let text: Vec<&str> = blocks.iter().flat_map(|b| b.texts()).collect();
    let language = Language::detect(&text.join(" "));
    let tree = build_tree(blocks, language).map_err(|e| SynthError::InvalidSpec(e.to_string()))?;
    Ok(RasterizedPage {
        image,
        tree,
        draw_log: log,
    })
}

fn fill(image: &mut RgbImage, r: Rect, color: [u8; 3]) {
    for y in r.y..r.bottom().min(image.height()) {
        for x in r.x..r.right().min(image.width()) {
            image.put_pixel(x, y, Rgb(color));
        }
    }
}

/// 1 px rectangle outline.
fn outline(image: &mut RgbImage, r: Rect, color: [u8; 3]) {
    if r.w == 0 || r.h == 0 {
        return;
    }
    fill(image, Rect::new(r.x, r.y, r.w, 1), color);
    fill(image, Rect::new(r.x, r.bottom() - 1, r.w, 1), color);
    fill(image, Rect::new(r.x, r.y, 1, r.h), color);
    fill(image, Rect::new(r.right() - 1, r.y, 1, r.h), color);
}
