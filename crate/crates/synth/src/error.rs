use std::path::PathBuf;

use thiserror::Error;

use crate::assets::AssetKind;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("lexicon has no entries")]
    EmptyLexicon,
    #[error("lexicon entry {line}: {reason}")]
    InvalidLexicon { line: usize, reason: String },
    #[error("cannot load font {path}: {reason}")]
    FontLoad { path: PathBuf, reason: String },
    #[error("no configured font covers {missing:?}")]
    NoGlyphCoverage { missing: Vec<char> },
    #[error("cluster {cluster:?} is {needed_px:.1}px wide, more than the {width_px}px available")]
    TextTooWide {
        cluster: String,
        needed_px: f32,
        width_px: u32,
    },
    #[error("cannot render empty text")]
    EmptyText,
    #[error("asset pool has no {0:?} entries")]
    EmptyPoolForKind(AssetKind),
    #[error("asset {path}: {reason}")]
    AssetLoad { path: PathBuf, reason: String },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("no sampled block fits on an empty page")]
    LayoutInfeasible,
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SynthError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SynthError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, SynthError>;
