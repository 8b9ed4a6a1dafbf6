use std::fmt;
use std::path::Path;
use std::sync::Arc;

use ab_glyph::{Font as _, FontArc, GlyphId, PxScale};
use rustybuzz::{Face, UnicodeBuffer};

use crate::error::{Result, SynthError};

/// A font file loaded once and shared between workers.
#[derive(Clone)]
pub struct Font {
    name: String,
    data: Arc<Vec<u8>>,
    raster: FontArc,
    units_per_em: f32,
    ascender: f32,
    descender: f32,
}

impl fmt::Debug for Font {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Font").field("name", &self.name).finish()
    }
}

/// One positioned glyph in font units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShapedGlyph {
    pub glyph_id: u16,
    /// Byte offset of the source cluster in the shaped text.
    pub cluster: usize,
    pub x_advance: i32,
    pub x_offset: i32,
    pub y_offset: i32,
}

impl Font {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| SynthError::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::from_bytes(name, bytes).map_err(|reason| SynthError::FontLoad {
            path: path.to_path_buf(),
            reason,
        })
    }

    pub fn from_bytes(name: impl Into<String>, bytes: Vec<u8>) -> std::result::Result<Self, String> {
        let face = Face::from_slice(&bytes, 0).ok_or("not a parseable font")?;
        let units_per_em = f32::from(face.units_per_em() as u16);
        let ascender = f32::from(face.ascender());
        let descender = f32::from(face.descender());
        drop(face);
        let raster = FontArc::try_from_vec(bytes.clone()).map_err(|e| e.to_string())?;
        Ok(Self {
            name: name.into(),
            data: Arc::new(bytes),
            raster,
            units_per_em,
            ascender,
            descender,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn units_per_em(&self) -> f32 {
        self.units_per_em
    }

    fn face(&self) -> Face<'_> {
        Face::from_slice(&self.data, 0).expect("font parsed at load time")
    }

    /// Visible characters of `text` the font has no glyph for.
    pub fn missing_chars(&self, text: &str) -> Vec<char> {
        let face = self.face();
        let mut missing: Vec<char> = text
            .chars()
            .filter(|c| !c.is_whitespace() && !c.is_control() && !is_format_char(*c))
            .filter(|c| face.glyph_index(*c).is_none())
            .collect();
        missing.sort_unstable();
        missing.dedup();
        missing
    }

    pub fn covers(&self, text: &str) -> bool {
        self.missing_chars(text).is_empty()
    }

    /// Shapes one line of text with the font's default features.
    pub fn shape(&self, text: &str) -> Vec<ShapedGlyph> {
        let face = self.face();
        let mut buffer = UnicodeBuffer::new();
        buffer.push_str(text);
        let shaped = rustybuzz::shape(&face, &[], buffer);
        shaped
            .glyph_infos()
            .iter()
            .zip(shaped.glyph_positions())
            .map(|(info, pos)| ShapedGlyph {
                glyph_id: info.glyph_id as u16,
                cluster: info.cluster as usize,
                x_advance: pos.x_advance,
                x_offset: pos.x_offset,
                y_offset: pos.y_offset,
            })
            .collect()
    }

    /// Horizontal advance of a glyph as stored in the font, in font units.
    pub fn glyph_advance(&self, c: char) -> Option<u16> {
        let face = self.face();
        face.glyph_index(c).and_then(|g| face.glyph_hor_advance(g))
    }

    pub(crate) fn px_per_unit(&self, size_px: f32) -> f32 {
        size_px / self.units_per_em
    }

    /// Ascent and descent (negative) in px at `size_px`.
    pub(crate) fn vertical_metrics(&self, size_px: f32) -> (f32, f32) {
        let k = self.px_per_unit(size_px);
        (self.ascender * k, self.descender * k)
    }

    /// Calls `plot(x, y, coverage)` for every pixel of the glyph placed with
    /// its origin at (`x`, `baseline`).
    pub(crate) fn draw_glyph(
        &self,
        glyph_id: u16,
        size_px: f32,
        x: f32,
        baseline: f32,
        mut plot: impl FnMut(i64, i64, f32),
    ) {
        let scale = PxScale::from(self.px_per_unit(size_px) * self.raster.height_unscaled());
        let glyph = GlyphId(glyph_id).with_scale_and_position(scale, ab_glyph::point(x, baseline));
        if let Some(outline) = self.raster.outline_glyph(glyph) {
            let bounds = outline.px_bounds();
            outline.draw(|gx, gy, c| {
                plot(
                    bounds.min.x as i64 + i64::from(gx),
                    bounds.min.y as i64 + i64::from(gy),
                    c,
                )
            });
        }
    }
}

/// Zero-width joiners and similar characters that need no glyph.
fn is_format_char(c: char) -> bool {
    matches!(c, '\u{200B}'..='\u{200D}' | '\u{2060}' | '\u{FEFF}')
}
