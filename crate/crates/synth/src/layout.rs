use std::collections::HashSet;
use std::sync::Arc;

use image::RgbImage;
use ocrkit_core::docmodel::{BlockKind, ContentBlock, Table, TableCell};
use ocrkit_core::rng::DetRng;
use serde::{Deserialize, Serialize};

use crate::assets::{draw_asset, Asset, AssetKind, AssetPool};
use crate::error::{Result, SynthError};
use crate::lexicon::Lexicon;
use crate::text::{layout_text, RenderSpec, TextLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }

    pub fn right(&self) -> u32 {
        self.x + self.w
    }

    pub fn bottom(&self) -> u32 {
        self.y + self.h
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.right() && other.x < self.right() && self.y < other.bottom() && other.y < self.bottom()
    }

    pub fn contains(&self, other: &Rect) -> bool {
        other.x >= self.x && other.y >= self.y && other.right() <= self.right() && other.bottom() <= self.bottom()
    }
}

/// Relative sampling weights of the block kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockMix {
    pub heading: f64,
    pub paragraph: f64,
    pub table: f64,
    pub figure: f64,
    pub equation: f64,
    pub list_item: f64,
}

impl Default for BlockMix {
    fn default() -> Self {
        Self {
            heading: 1.0,
            paragraph: 4.0,
            table: 1.0,
            figure: 1.0,
            equation: 1.0,
            list_item: 1.0,
        }
    }
}

impl BlockMix {
    fn weights(&self) -> [f64; 6] {
        [self.heading, self.paragraph, self.table, self.figure, self.equation, self.list_item]
    }
}

const MIX_ORDER: [BlockKind; 6] = [
    BlockKind::Heading,
    BlockKind::Paragraph,
    BlockKind::Table,
    BlockKind::Figure,
    BlockKind::Equation,
    BlockKind::ListItem,
];

/// Page composition parameters. Ranges are inclusive `[min, max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutSpec {
    pub columns: u32,
    pub block_mix: BlockMix,
    pub table_rows: [u32; 2],
    pub table_cols: [u32; 2],
    pub blocks_per_page: [u32; 2],
    pub paragraph_words: [u32; 2],
    pub heading_words: [u32; 2],
    pub list_words: [u32; 2],
    pub cell_words: [u32; 2],
    /// Chance that a table's first row is one title cell spanning all columns.
    pub header_span_prob: f64,
    /// Chance that a table cell holds a number instead of words.
    pub numeric_cell_prob: f64,
    pub column_gap_px: u32,
    pub block_gap_px: u32,
}

impl Default for LayoutSpec {
    fn default() -> Self {
        Self {
            columns: 1,
            block_mix: BlockMix::default(),
            table_rows: [2, 8],
            table_cols: [2, 6],
            blocks_per_page: [3, 12],
            paragraph_words: [8, 40],
            heading_words: [2, 6],
            list_words: [3, 10],
            cell_words: [1, 3],
            header_span_prob: 0.25,
            numeric_cell_prob: 0.3,
            column_gap_px: 40,
            block_gap_px: 18,
        }
    }
}

impl LayoutSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SynthError::InvalidSpec(m));
        if !(1..=2).contains(&self.columns) {
            return bad(format!("columns must be 1 or 2, got {}", self.columns));
        }
        let w = self.block_mix.weights();
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) || w.iter().sum::<f64>() <= 0.0 {
            return bad("block weights must be non-negative with a positive sum".into());
        }
        for (name, [lo, hi]) in [
            ("table_rows", self.table_rows),
            ("table_cols", self.table_cols),
            ("blocks_per_page", self.blocks_per_page),
            ("paragraph_words", self.paragraph_words),
            ("heading_words", self.heading_words),
            ("list_words", self.list_words),
            ("cell_words", self.cell_words),
        ] {
            if lo == 0 || lo > hi {
                return bad(format!("{name} range [{lo}, {hi}] must satisfy 1 <= min <= max"));
            }
        }
        for (name, p) in [
            ("header_span_prob", self.header_span_prob),
            ("numeric_cell_prob", self.numeric_cell_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// One table cell as placed inside its table box (coordinates relative to
/// the box).
#[derive(Debug, Clone)]
pub struct CellRender {
    pub rect: Rect,
    pub text: Option<TextLayout>,
}

/// What to draw for a block; every string here is the block's ground truth.
#[derive(Debug, Clone)]
pub enum BlockRender {
    Text {
        layout: TextLayout,
        indent_px: u32,
        bullet: bool,
    },
    Table {
        cells: Vec<CellRender>,
    },
    Figure {
        image: Arc<RgbImage>,
        description: String,
    },
    Equation {
        layout: TextLayout,
        indent_px: u32,
    },
}

#[derive(Debug, Clone)]
pub struct PlacedBlock {
    pub block: ContentBlock,
    pub bbox: Rect,
    pub column: u32,
    pub render: BlockRender,
}

/// Blocks in reading order with their page boxes.
#[derive(Debug, Clone)]
pub struct PagePlan {
    pub page_size: (u32, u32),
    pub content: Rect,
    pub columns: Vec<Rect>,
    pub blocks: Vec<PlacedBlock>,
}

impl PagePlan {
    /// Checks that boxes lie in their columns inside the margins, do not
    /// overlap within a column, and follow column-major reading order.
    pub fn check_geometry(&self) -> std::result::Result<(), String> {
        for (i, b) in self.blocks.iter().enumerate() {
            let col = self
                .columns
                .get(b.column as usize)
                .ok_or(format!("block {i}: unknown column {}", b.column))?;
            if !self.content.contains(&b.bbox) || !col.contains(&b.bbox) {
                return Err(format!("block {i}: box {:?} outside column {:?}", b.bbox, col));
            }
            for (j, other) in self.blocks.iter().enumerate().skip(i + 1) {
                if other.column == b.column && other.bbox.intersects(&b.bbox) {
                    return Err(format!("blocks {i} and {j} overlap"));
                }
            }
            if let Some(next) = self.blocks.get(i + 1) {
                let ordered = next.column > b.column || (next.column == b.column && next.bbox.y >= b.bbox.bottom());
                if !ordered {
                    return Err(format!("blocks {i} and {} out of reading order", i + 1));
                }
            }
        }
        Ok(())
    }
}

pub(crate) const CELL_PAD: u32 = 6;
const LIST_INDENT: u32 = 28;
const EQUATION_INDENT: u32 = 24;

/// A sampled block measured at column width.
struct Sampled {
    block: ContentBlock,
    render: BlockRender,
    width: u32,
    height: u32,
}

struct Composer<'a> {
    layout: &'a LayoutSpec,
    lexicon: &'a Lexicon,
    pool: &'a AssetPool,
    render: &'a RenderSpec,
    rng: DetRng,
    col_w: u32,
    seen_paragraphs: HashSet<String>,
}

impl Composer<'_> {
    fn range(&mut self, [lo, hi]: [u32; 2]) -> u32 {
        self.rng.range_inclusive(lo, hi)
    }

    fn words(&mut self, range: [u32; 2]) -> String {
        let n = self.range(range);
        (0..n)
            .map(|_| self.lexicon.draw(&mut self.rng).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn number(&mut self) -> String {
        let whole = self.rng.below(1_000_000);
        let cents = self.rng.below(100);
        let mut digits = whole.to_string();
        let mut grouped = String::new();
        while digits.len() > 3 {
            let tail = digits.split_off(digits.len() - 3);
            grouped = format!(",{tail}{grouped}");
        }
        format!("{digits}{grouped}.{cents:02}")
    }

    fn base_size(&mut self) -> u32 {
        let (lo, hi) = self.render.font_size_range;
        self.rng.range_inclusive(lo, hi)
    }

    /// Lays out text, mapping "does not fit this width" to `None`.
    fn fit(&self, text: &str, font: &crate::font::Font, size: u32, width: u32) -> Result<Option<TextLayout>> {
        if width == 0 {
            return Ok(None);
        }
        match layout_text(text, font, size, width, self.render.line_spacing_factor) {
            Ok(l) => Ok(Some(l)),
            Err(SynthError::TextTooWide { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn text_block(&mut self, block: ContentBlock, size_scale: f32, indent_px: u32, bullet: bool) -> Result<Option<Sampled>> {
        let text = block.texts()[0].to_string();
        let (font, size) = self.render.pick_style(&text, true, &mut self.rng)?;
        let size = ((size as f32) * size_scale).round() as u32;
        let width = self.col_w.saturating_sub(indent_px);
        Ok(self.fit(&text, &font, size, width)?.map(|layout| Sampled {
            height: layout.height(),
            width: self.col_w,
            block,
            render: BlockRender::Text { layout, indent_px, bullet },
        }))
    }

    fn sample(&mut self, kind: BlockKind) -> Result<Option<Sampled>> {
        match kind {
            BlockKind::Heading => {
                let level = self.rng.range_inclusive(1, 3) as u8;
                let text = self.words(self.layout.heading_words);
                let scale = 1.0 + 0.2 * f32::from(4 - level);
                self.text_block(ContentBlock::heading(level, text), scale, 0, false)
            }
            BlockKind::Paragraph => {
                let mut text = self.words(self.layout.paragraph_words);
                let mut tries = 0;
                while self.seen_paragraphs.contains(&text) && tries < 8 {
                    text = self.words(self.layout.paragraph_words);
                    tries += 1;
                }
                if !self.seen_paragraphs.insert(text.clone()) {
                    return Ok(None);
                }
                self.text_block(ContentBlock::paragraph(text), 1.0, 0, false)
            }
            BlockKind::ListItem => {
                let depth = self.rng.range_inclusive(0, 2) as u8;
                let text = self.words(self.layout.list_words);
                let indent = LIST_INDENT * (u32::from(depth) + 1);
                self.text_block(ContentBlock::list_item(depth, text), 1.0, indent, true)
            }
            BlockKind::Equation => self.equation(),
            BlockKind::Figure => self.figure(),
            BlockKind::Table => self.table(),
        }
    }

    fn equation(&mut self) -> Result<Option<Sampled>> {
        let source = match draw_asset(self.pool, AssetKind::Equation, &mut self.rng) {
            Ok(a) => a.payload().to_string(),
            Err(SynthError::EmptyPoolForKind(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let font = self.render.equation_face(&source)?;
        let size = self.base_size();
        let width = self.col_w.saturating_sub(EQUATION_INDENT);
        Ok(self.fit(&source, &font, size, width)?.map(|layout| Sampled {
            height: layout.height(),
            width: self.col_w,
            block: ContentBlock::equation(source),
            render: BlockRender::Equation {
                layout,
                indent_px: EQUATION_INDENT,
            },
        }))
    }

    fn figure(&mut self) -> Result<Option<Sampled>> {
        let kinds: Vec<AssetKind> = [AssetKind::Photo, AssetKind::Chart]
            .into_iter()
            .filter(|k| self.pool.count(*k) > 0)
            .collect();
        if kinds.is_empty() {
            return Ok(None);
        }
        let kind = kinds[self.rng.index(kinds.len())];
        let Asset::Image(asset) = draw_asset(self.pool, kind, &mut self.rng)? else {
            unreachable!("photo and chart draws return images");
        };
        let (iw, ih) = asset.image.dimensions();
        let max_h = f64::from(self.render.content_height()) / 2.0;
        let mut w = f64::from(self.col_w) * self.rng.uniform(0.5, 1.0);
        let mut h = w * f64::from(ih) / f64::from(iw.max(1));
        if h > max_h {
            w *= max_h / h;
            h = max_h;
        }
        Ok(Some(Sampled {
            block: ContentBlock::figure(asset.description.clone()),
            render: BlockRender::Figure {
                image: Arc::clone(&asset.image),
                description: asset.description.clone(),
            },
            width: (w.floor() as u32).clamp(1, self.col_w),
            height: (h.floor() as u32).max(1),
        }))
    }

    fn table(&mut self) -> Result<Option<Sampled>> {
        let rows = self.range(self.layout.table_rows) as usize;
        let cols = self.range(self.layout.table_cols) as usize;
        let title = rows > 1 && cols > 1 && self.rng.bernoulli(self.layout.header_span_prob);
        let mut grid: Vec<Vec<TableCell>> = Vec::with_capacity(rows);
        for r in 0..rows {
            if r == 0 && title {
                let text = self.words(self.layout.heading_words);
                grid.push(vec![TableCell::spanning(text, cols as u32, 1)]);
                continue;
            }
            let row = (0..cols)
                .map(|_| {
                    let text = if r > 0 && self.rng.bernoulli(self.layout.numeric_cell_prob) {
                        self.number()
                    } else {
                        self.words(self.layout.cell_words)
                    };
                    TableCell::new(text)
                })
                .collect();
            grid.push(row);
        }
        let table = Table { rows: grid };
        let all_text: String = table.rows.iter().flatten().map(|c| c.text.as_str()).collect::<Vec<_>>().join(" ");
        let (font, size) = self.render.pick_style(&all_text, false, &mut self.rng)?;
        let size = size.saturating_sub(2).max(8);

        let (placements, n_cols) = table.layout().map_err(SynthError::InvalidSpec)?;
        let col_w = self.col_w / n_cols as u32;
        if col_w <= 2 * CELL_PAD + 1 {
            return Ok(None);
        }
        let cells: Vec<&TableCell> = table.rows.iter().flatten().collect();
        let mut layouts = Vec::with_capacity(cells.len());
        for (cell, p) in cells.iter().zip(&placements) {
            let inner = col_w * p.colspan as u32 - 2 * CELL_PAD;
            if cell.text.is_empty() {
                layouts.push(None);
                continue;
            }
            match self.fit(&cell.text, &font, size, inner)? {
                Some(l) => layouts.push(Some(l)),
                None => return Ok(None),
            }
        }
        // Row heights from single-row cells; taller row-spanning cells
        // stretch the last row they cover.
        let n_rows = table.rows.len();
        let mut row_h = vec![0u32; n_rows];
        let empty_h = (size as f32 * self.render.line_spacing_factor).ceil() as u32;
        for (l, p) in layouts.iter().zip(&placements) {
            let need = l.as_ref().map_or(empty_h, TextLayout::height) + 2 * CELL_PAD;
            if p.rowspan == 1 {
                row_h[p.row] = row_h[p.row].max(need);
            }
        }
        for (l, p) in layouts.iter().zip(&placements) {
            let need = l.as_ref().map_or(empty_h, TextLayout::height) + 2 * CELL_PAD;
            let have: u32 = row_h[p.row..p.row + p.rowspan].iter().sum();
            if need > have {
                row_h[p.row + p.rowspan - 1] += need - have;
            }
        }
        let mut row_y = vec![0u32; n_rows + 1];
        for r in 0..n_rows {
            row_y[r + 1] = row_y[r] + row_h[r];
        }
        let cells = layouts
            .into_iter()
            .zip(&placements)
            .map(|(text, p)| CellRender {
                rect: Rect::new(
                    p.col as u32 * col_w,
                    row_y[p.row],
                    p.colspan as u32 * col_w,
                    row_y[p.row + p.rowspan] - row_y[p.row],
                ),
                text,
            })
            .collect();
        Ok(Some(Sampled {
            block: ContentBlock::Table(table),
            render: BlockRender::Table { cells },
            width: col_w * n_cols as u32 + 1,
            height: row_y[n_rows] + 1,
        }))
    }
}

/// Samples block kinds and contents, then flows them column by column.
/// A block that does not fit the rest of the page is skipped.
pub fn compose_layout(
    layout: &LayoutSpec,
    lexicon: &Lexicon,
    pool: &AssetPool,
    render: &RenderSpec,
    seed: u64,
) -> Result<PagePlan> {
    layout.validate()?;
    render.validate()?;
    let content = Rect::new(
        render.margins_px,
        render.margins_px,
        render.content_width(),
        render.content_height(),
    );
    let n_cols = layout.columns;
    let gap = if n_cols > 1 { layout.column_gap_px } else { 0 };
    let col_w = content.w.saturating_sub(gap * (n_cols - 1)) / n_cols;
    if col_w < 2 {
        return Err(SynthError::InvalidSpec("columns leave no width".into()));
    }
    let columns: Vec<Rect> = (0..n_cols)
        .map(|c| Rect::new(content.x + c * (col_w + gap), content.y, col_w, content.h))
        .collect();

    let mut composer = Composer {
        layout,
        lexicon,
        pool,
        render,
        rng: DetRng::new(seed),
        col_w: col_w - 1,
        seen_paragraphs: HashSet::new(),
    };
    let count = composer.range(layout.blocks_per_page);
    let weights = layout.block_mix.weights();

    let mut placed = Vec::new();
    let mut column = 0usize;
    let mut cursor = content.y;
    for _ in 0..count {
        let kind = MIX_ORDER[composer.rng.weighted_index(&weights).expect("positive weight sum")];
        let Some(s) = composer.sample(kind)? else {
            continue;
        };
        let gap_before = if cursor == content.y { 0 } else { layout.block_gap_px };
        let mut top = cursor + gap_before;
        if top + s.height > content.bottom() {
            if column + 1 < columns.len() && content.y + s.height <= content.bottom() {
                column += 1;
                top = content.y;
            } else {
                continue;
            }
        }
        let col = columns[column];
        placed.push(PlacedBlock {
            block: s.block,
            bbox: Rect::new(col.x, top, s.width, s.height),
            column: column as u32,
            render: s.render,
        });
        cursor = top + s.height;
    }
    if placed.is_empty() {
        return Err(SynthError::LayoutInfeasible);
    }
    Ok(PagePlan {
        page_size: render.page_size,
        content,
        columns,
        blocks: placed,
    })
}
