//! Generation config file (TOML).
//!
//! ```toml
//! [corpus]
//! count = 100            # samples, at least 1
//! master_seed = 42
//! mode = "structure"     # or "default"
//! category = "synthetic"
//! id_prefix = "syn"
//! anchors = true         # also write the page's plain text as anchor text
//!
//! [lexicon]
//! paths = ["lexicon/thai_words.txt"]
//!
//! [render]
//! fonts = ["fonts/Sarabun-Regular.ttf"]
//! equation_font = "fonts/DejaVuSansMono.ttf"
//! handwriting_fonts = []
//! handwriting_fraction = 0.0
//! font_size_pt = [12, 18]
//! page_size = [1240, 1754]
//! margins_px = 90
//! line_spacing = 1.5
//! ink_color = [20, 20, 20]
//! paper_color = [252, 250, 245]
//!
//! [layout]               # any LayoutSpec field; see its defaults
//! columns = 1
//! block_mix = { paragraph = 4, table = 1 }
//!
//! [assets]
//! index = "assets/assets.json"
//! equations = "assets/equations.txt"
//!
//! [augmentation]         # omit the section to disable augmentation
//! fraction = 1.0
//! max_ops = 4
//! gaussian_blur = [0.3, 1.0]
//! perspective_warp = [0.0, 2.0]
//! ```
//!
//! Relative paths resolve against the config file's directory. Other
//! top-level tables are ignored here so that tools can share the file.

use std::path::{Path, PathBuf};

use ocrkit_core::docmodel::SupervisionMode;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::assets::AssetPool;
use crate::augment::AugmentationPool;
use crate::error::{Result, SynthError};
use crate::font::Font;
use crate::layout::LayoutSpec;
use crate::lexicon::Lexicon;
use crate::text::RenderSpec;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSection {
    pub count: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub mode: SupervisionMode,
    #[serde(default = "default_category")]
    pub category: String,
    #[serde(default = "default_prefix")]
    pub id_prefix: String,
    #[serde(default = "yes")]
    pub anchors: bool,
}

fn default_category() -> String {
    "synthetic".into()
}

fn default_prefix() -> String {
    "syn".into()
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconSection {
    pub paths: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderSection {
    pub fonts: Vec<PathBuf>,
    #[serde(default)]
    pub equation_font: Option<PathBuf>,
    #[serde(default)]
    pub handwriting_fonts: Vec<PathBuf>,
    #[serde(default)]
    pub handwriting_fraction: f64,
    #[serde(default = "default_sizes")]
    pub font_size_pt: [u32; 2],
    #[serde(default = "default_page")]
    pub page_size: [u32; 2],
    #[serde(default = "default_margins")]
    pub margins_px: u32,
    #[serde(default = "default_spacing")]
    pub line_spacing: f32,
    #[serde(default = "default_ink")]
    pub ink_color: [u8; 3],
    #[serde(default = "default_paper")]
    pub paper_color: [u8; 3],
}

fn default_sizes() -> [u32; 2] {
    [12, 18]
}

fn default_page() -> [u32; 2] {
    [1240, 1754]
}

fn default_margins() -> u32 {
    90
}

fn default_spacing() -> f32 {
    1.5
}

fn default_ink() -> [u8; 3] {
    [20, 20, 20]
}

fn default_paper() -> [u8; 3] {
    [252, 250, 245]
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssetSection {
    pub index: Option<PathBuf>,
    pub equations: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ConfigFile {
    pub corpus: CorpusSection,
    pub lexicon: LexiconSection,
    pub render: RenderSection,
    #[serde(default)]
    pub layout: LayoutSpec,
    #[serde(default)]
    pub assets: AssetSection,
    #[serde(default)]
    pub augmentation: Option<AugmentationPool>,
}

/// A parsed config plus what is needed to fingerprint it.
#[derive(Debug, Clone)]
pub struct GenerationConfig {
    pub file: ConfigFile,
    base_dir: PathBuf,
    source: Vec<u8>,
    overrides: Vec<String>,
    /// Worker threads; `None` uses all cores. Does not affect output.
    pub jobs: Option<usize>,
}

/// Loaded, shareable inputs for sample generation.
#[derive(Debug, Clone)]
pub struct Resources {
    pub lexicon: Lexicon,
    pub render: RenderSpec,
    pub pool: AssetPool,
}

impl GenerationConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| SynthError::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_bytes(bytes, base)
    }

    pub fn from_bytes(bytes: Vec<u8>, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let text = std::str::from_utf8(&bytes).map_err(|e| SynthError::Config(format!("not UTF-8: {e}")))?;
        let file: ConfigFile = toml::from_str(text).map_err(|e| SynthError::Config(e.to_string()))?;
        let cfg = Self {
            file,
            base_dir: base_dir.into(),
            source: bytes,
            overrides: Vec::new(),
            jobs: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.file.corpus.count == 0 {
            return Err(SynthError::Config("corpus.count must be at least 1".into()));
        }
        if self.file.lexicon.paths.is_empty() {
            return Err(SynthError::Config("lexicon.paths is empty".into()));
        }
        self.file.layout.validate()?;
        if let Some(pool) = &self.file.augmentation {
            pool.validate()?;
        }
        Ok(())
    }

    pub fn set_master_seed(&mut self, seed: u64) {
        self.file.corpus.master_seed = seed;
        self.overrides.push(format!("corpus.master_seed={seed}"));
    }

    pub fn set_count(&mut self, count: usize) -> Result<()> {
        if count == 0 {
            return Err(SynthError::Config("corpus.count must be at least 1".into()));
        }
        self.file.corpus.count = count;
        self.overrides.push(format!("corpus.count={count}"));
        Ok(())
    }

    /// Hex SHA-256 of the config bytes, followed by one line per override.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(&self.source);
        for line in &self.overrides {
            h.update(b"\n");
            h.update(line.as_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn load_resources(&self) -> Result<Resources> {
        let parts = self
            .file
            .lexicon
            .paths
            .iter()
            .map(|p| Lexicon::load(&self.resolve(p)))
            .collect::<Result<Vec<_>>>()?;
        let lexicon = Lexicon::merge(parts)?;
        let r = &self.file.render;
        let load_all = |paths: &[PathBuf]| -> Result<Vec<Font>> {
            paths.iter().map(|p| Font::load(&self.resolve(p))).collect()
        };
        let render = RenderSpec {
            fonts: load_all(&r.fonts)?,
            equation_font: r.equation_font.as_ref().map(|p| Font::load(&self.resolve(p))).transpose()?,
            handwriting_fonts: load_all(&r.handwriting_fonts)?,
            handwriting_fraction: r.handwriting_fraction,
            font_size_range: (r.font_size_pt[0], r.font_size_pt[1]),
            page_size: (r.page_size[0], r.page_size[1]),
            margins_px: r.margins_px,
            line_spacing_factor: r.line_spacing,
            ink_color: r.ink_color,
            paper_color: r.paper_color,
        };
        render.validate()?;
        let a = &self.file.assets;
        let index = a.index.as_ref().map(|p| self.resolve(p));
        let equations = a.equations.as_ref().map(|p| self.resolve(p));
        let pool = AssetPool::load(index.as_deref(), equations.as_deref())?;
        Ok(Resources { lexicon, render, pool })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[corpus]
count = 3
master_seed = 9

[lexicon]
paths = ["words.txt"]

[render]
fonts = ["a.ttf"]

[qc]
anything = 1
"#;

    #[test]
    fn defaults_and_foreign_sections() {
        let cfg = GenerationConfig::from_bytes(MINIMAL.as_bytes().to_vec(), "/base").unwrap();
        assert_eq!(cfg.file.corpus.mode, SupervisionMode::Structure);
        assert_eq!(cfg.file.render.page_size, [1240, 1754]);
        assert!(cfg.file.augmentation.is_none());
        assert_eq!(cfg.resolve(Path::new("words.txt")), PathBuf::from("/base/words.txt"));
    }

    #[test]
    fn fingerprint_tracks_bytes_and_overrides() {
        let a = GenerationConfig::from_bytes(MINIMAL.as_bytes().to_vec(), ".").unwrap();
        let b = GenerationConfig::from_bytes(format!("{MINIMAL}\n").into_bytes(), ".").unwrap();
        assert_eq!(a.fingerprint().len(), 64);
        assert_ne!(a.fingerprint(), b.fingerprint());
        let mut c = a.clone();
        c.set_master_seed(9);
        assert_ne!(a.fingerprint(), c.fingerprint());
        let mut d = a.clone();
        d.jobs = Some(2);
        assert_eq!(a.fingerprint(), d.fingerprint());
    }

    #[test]
    fn rejects_zero_count_and_unknown_keys() {
        let zero = MINIMAL.replace("count = 3", "count = 0");
        assert!(GenerationConfig::from_bytes(zero.into_bytes(), ".").is_err());
        let typo = MINIMAL.replace("master_seed", "master_sed");
        assert!(GenerationConfig::from_bytes(typo.into_bytes(), ".").is_err());
        let mut ok = GenerationConfig::from_bytes(MINIMAL.as_bytes().to_vec(), ".").unwrap();
        assert!(ok.set_count(0).is_err());
    }

    #[test]
    fn rejects_out_of_range_augmentation() {
        let text = format!("{MINIMAL}\n[augmentation]\ngaussian_blur = [0.1, 1.0]\n");
        assert!(GenerationConfig::from_bytes(text.into_bytes(), ".").is_err());
    }
}
