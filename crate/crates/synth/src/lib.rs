//! Synthetic document pages with ground truth that matches the pixels.
//!
//! A page is built in four steps: words are drawn from a lexicon and shaped
//! with real fonts, figures and equations are drawn from an asset pool, the
//! blocks are flowed into columns, and the finished raster may be degraded
//! by scan-like artifacts. Only the last step is lossy, and it never touches
//! the ground truth.

pub mod assets;
pub mod augment;
pub mod config;
pub mod error;
pub mod font;
pub mod generate;
pub mod layout;
pub mod lexicon;
pub mod raster;
pub mod text;

pub use assets::{sample_asset, Asset, AssetKind, AssetPool, ImageAsset};
pub use augment::{augment, AugOp, AugmentationPool, AugmentationSpec, OpKind};
pub use config::{GenerationConfig, Resources};
pub use error::{Result, SynthError};
pub use font::Font;
pub use generate::{augmentation_plan, generate_corpus, generate_sample, sample_seed, GeneratedSample};
pub use layout::{compose_layout, BlockMix, LayoutSpec, PagePlan, PlacedBlock, Rect};
pub use lexicon::{sample_vocab, Lexicon, ScriptTag};
pub use raster::{rasterize_page, DrawEvent, RasterizedPage};
pub use text::{layout_text, render_text_block, RenderSpec, TextLayout, TextRaster};
