use image::{Rgb, RgbImage};
use ocrkit_core::rng::DetRng;
use unicode_segmentation::UnicodeSegmentation;

use crate::error::{Result, SynthError};
use crate::font::Font;

/// Typography and page geometry. Sizes are in points rendered at 1 px per
/// point.
#[derive(Debug, Clone)]
pub struct RenderSpec {
    pub fonts: Vec<Font>,
    /// Face for equation source text; falls back to `fonts`.
    pub equation_font: Option<Font>,
    /// Optional handwriting-style faces used for a share of text blocks.
    pub handwriting_fonts: Vec<Font>,
    pub handwriting_fraction: f64,
    pub font_size_range: (u32, u32),
    pub page_size: (u32, u32),
    pub margins_px: u32,
    pub line_spacing_factor: f32,
    pub ink_color: [u8; 3],
    pub paper_color: [u8; 3],
}

impl RenderSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SynthError::InvalidSpec(m));
        if self.fonts.is_empty() {
            return bad("at least one font is required".into());
        }
        let (lo, hi) = self.font_size_range;
        if lo < 8 || lo > hi {
            return bad(format!("font size range [{lo}, {hi}] must satisfy 8 <= min <= max"));
        }
        let (w, h) = self.page_size;
        if !(600..=4200).contains(&w) || !(600..=4200).contains(&h) {
            return bad(format!("page size {w}x{h} outside [600, 4200] px"));
        }
        if 2 * self.margins_px >= w.min(h) {
            return bad(format!("margins of {} px leave no content area", self.margins_px));
        }
        if !(self.line_spacing_factor >= 1.0 && self.line_spacing_factor <= 4.0) {
            return bad(format!("line spacing {} outside [1, 4]", self.line_spacing_factor));
        }
        if !(0.0..=1.0).contains(&self.handwriting_fraction) {
            return bad("handwriting_fraction outside [0, 1]".into());
        }
        Ok(())
    }

    pub fn content_width(&self) -> u32 {
        self.page_size.0 - 2 * self.margins_px
    }

    pub fn content_height(&self) -> u32 {
        self.page_size.1 - 2 * self.margins_px
    }

    /// Draws a face covering `text` and a size. Handwriting faces are used
    /// with probability `handwriting_fraction` when `allow_handwriting`.
    pub(crate) fn pick_style(
        &self,
        text: &str,
        allow_handwriting: bool,
        rng: &mut DetRng,
    ) -> Result<(Font, u32)> {
        let use_hand = allow_handwriting
            && !self.handwriting_fonts.is_empty()
            && rng.bernoulli(self.handwriting_fraction);
        let pool = if use_hand { &self.handwriting_fonts } else { &self.fonts };
        let mut covering: Vec<&Font> = pool.iter().filter(|f| f.covers(text)).collect();
        if covering.is_empty() && use_hand {
            covering = self.fonts.iter().filter(|f| f.covers(text)).collect();
        }
        if covering.is_empty() {
            let mut missing: Vec<char> = self.fonts.iter().flat_map(|f| f.missing_chars(text)).collect();
            missing.sort_unstable();
            missing.dedup();
            return Err(SynthError::NoGlyphCoverage { missing });
        }
        let font = covering[rng.index(covering.len())].clone();
        let size = rng.range_inclusive(self.font_size_range.0, self.font_size_range.1);
        Ok((font, size))
    }

    /// Face for equation sources: the equation font if it covers `source`,
    /// otherwise the first regular font that does.
    pub(crate) fn equation_face(&self, source: &str) -> Result<Font> {
        self.equation_font
            .iter()
            .chain(&self.fonts)
            .find(|f| f.covers(source))
            .cloned()
            .ok_or_else(|| SynthError::NoGlyphCoverage {
                missing: self.fonts[0].missing_chars(source),
            })
    }
}

/// Text broken into lines for a given face, size and width.
#[derive(Debug, Clone)]
pub struct TextLayout {
    /// The input text exactly as given to the layout.
    pub text: String,
    pub font: Font,
    pub size_pt: u32,
    pub lines: Vec<String>,
    pub line_height: u32,
    pub width_px: u32,
}

impl TextLayout {
    pub fn height(&self) -> u32 {
        self.line_height * self.lines.len() as u32
    }
}

/// Width in px of every grapheme cluster of `word`, from one shaping pass.
/// Glyph advances are charged to the cluster their source offset falls in,
/// so marks that the shaper gives no advance add no width.
fn cluster_widths<'a>(font: &Font, word: &'a str, k: f32) -> Vec<(&'a str, f32)> {
    let clusters: Vec<(usize, &str)> = word.grapheme_indices(true).collect();
    let mut widths = vec![0f32; clusters.len()];
    for g in font.shape(word) {
        let idx = clusters.partition_point(|(start, _)| *start <= g.cluster).saturating_sub(1);
        widths[idx] += g.x_advance as f32 * k;
    }
    clusters.into_iter().map(|(_, c)| c).zip(widths).collect()
}

/// Greedy line breaking: words are separated at whitespace; a word longer
/// than the line is split between grapheme clusters.
pub fn layout_text(
    text: &str,
    font: &Font,
    size_pt: u32,
    width_px: u32,
    line_spacing: f32,
) -> Result<TextLayout> {
    if text.trim().is_empty() {
        return Err(SynthError::EmptyText);
    }
    let size_px = size_pt as f32;
    let k = font.px_per_unit(size_px);
    let max = width_px as f32;
    let space: f32 = font.shape(" ").iter().map(|g| g.x_advance as f32 * k).sum();

    let mut lines = Vec::new();
    for hard_line in text.split('\n') {
        let mut line = String::new();
        let mut line_w = 0f32;
        for word in hard_line.split_whitespace() {
            let clusters = cluster_widths(font, word, k);
            let word_w: f32 = clusters.iter().map(|c| c.1).sum();
            if !line.is_empty() && line_w + space + word_w <= max {
                line.push(' ');
                line.push_str(word);
                line_w += space + word_w;
                continue;
            }
            if !line.is_empty() {
                lines.push(std::mem::take(&mut line));
                line_w = 0.0;
            }
            if word_w <= max {
                line.push_str(word);
                line_w = word_w;
                continue;
            }
            for (cluster, w) in clusters {
                if w > max {
                    return Err(SynthError::TextTooWide {
                        cluster: cluster.to_string(),
                        needed_px: w,
                        width_px,
                    });
                }
                if line_w + w > max {
                    lines.push(std::mem::take(&mut line));
                    line_w = 0.0;
                }
                line.push_str(cluster);
                line_w += w;
            }
        }
        if !line.is_empty() {
            lines.push(line);
        }
    }
    Ok(TextLayout {
        text: text.to_string(),
        font: font.clone(),
        size_pt,
        lines,
        line_height: (size_px * line_spacing).ceil() as u32,
        width_px,
    })
}

/// Alpha-blends `ink` into the pixel at (`x`, `y`) if it is on the canvas.
pub(crate) fn blend(canvas: &mut RgbImage, x: i64, y: i64, ink: [u8; 3], coverage: f32) {
    if x < 0 || y < 0 || x >= i64::from(canvas.width()) || y >= i64::from(canvas.height()) {
        return;
    }
    let a = coverage.clamp(0.0, 1.0);
    let p = canvas.get_pixel_mut(x as u32, y as u32);
    for c in 0..3 {
        p[c] = (f32::from(p[c]) * (1.0 - a) + f32::from(ink[c]) * a).round() as u8;
    }
}

/// Draws a laid-out text block with its top-left corner at (`x`, `y`).
pub fn draw_text(canvas: &mut RgbImage, layout: &TextLayout, x: u32, y: u32, ink: [u8; 3]) {
    let size_px = layout.size_pt as f32;
    let k = layout.font.px_per_unit(size_px);
    let (ascent, descent) = layout.font.vertical_metrics(size_px);
    let pad = (layout.line_height as f32 - (ascent - descent)) / 2.0;
    for (i, line) in layout.lines.iter().enumerate() {
        let baseline = y as f32 + (i as u32 * layout.line_height) as f32 + pad + ascent;
        let mut pen = x as f32;
        for g in layout.font.shape(line) {
            let gx = pen + g.x_offset as f32 * k;
            let gy = baseline - g.y_offset as f32 * k;
            layout.font.draw_glyph(g.glyph_id, size_px, gx, gy, |px, py, c| {
                blend(canvas, px, py, ink, c)
            });
            pen += g.x_advance as f32 * k;
        }
    }
}

/// A text block rendered on its own canvas.
#[derive(Debug, Clone)]
pub struct TextRaster {
    pub image: RgbImage,
    pub height_px: u32,
    pub font_name: String,
    pub size_pt: u32,
    pub lines: Vec<String>,
}

/// Renders `text` at `width_px` in a face and size drawn from `spec` with
/// `seed`.
pub fn render_text_block(text: &str, spec: &RenderSpec, width_px: u32, seed: u64) -> Result<TextRaster> {
    if text.trim().is_empty() {
        return Err(SynthError::EmptyText);
    }
    if width_px == 0 || width_px > spec.content_width() {
        return Err(SynthError::InvalidSpec(format!(
            "block width {width_px} px outside the {} px content area",
            spec.content_width()
        )));
    }
    let mut rng = DetRng::new(seed);
    let (font, size) = spec.pick_style(text, true, &mut rng)?;
    let layout = layout_text(text, &font, size, width_px, spec.line_spacing_factor)?;
    let mut image = RgbImage::from_pixel(width_px, layout.height().max(1), Rgb(spec.paper_color));
    draw_text(&mut image, &layout, 0, 0, spec.ink_color);
    Ok(TextRaster {
        height_px: layout.height(),
        font_name: font.name().to_string(),
        size_pt: size,
        lines: layout.lines,
        image,
    })
}
