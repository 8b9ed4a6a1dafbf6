//! Whole-corpus generation: images, ground truth, anchors and manifest.

use std::fs;
use std::path::Path;

use image::RgbImage;
use ocrkit_core::corpus::{CorpusManifest, ManifestEntry, SampleStatus};
use ocrkit_core::docmodel::{serialize, DocumentTree, Language};
use ocrkit_core::rng::{derive_seed, splitmix64};
use rayon::prelude::*;

use crate::augment::{augment, AugmentationSpec};
use crate::config::{GenerationConfig, Resources};
use crate::error::{Result, SynthError};
use crate::layout::compose_layout;
use crate::raster::{rasterize_page, DrawEvent};

const STREAM_LAYOUT: u64 = 1;
const STREAM_AUG_PLAN: u64 = 2;
const STREAM_AUG_APPLY: u64 = 3;

pub fn sample_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ index)
}

/// The op list sample `index` receives and the seed `augment` is called
/// with. Depends only on the config, so a single op can be replayed on any
/// image of the page's size.
pub fn augmentation_plan(config: &GenerationConfig, fill_color: [u8; 3], index: u64) -> (AugmentationSpec, u64) {
    let seed = sample_seed(config.file.corpus.master_seed, index);
    let spec = match &config.file.augmentation {
        Some(pool) => pool.sample(fill_color, derive_seed(seed, STREAM_AUG_PLAN)),
        None => AugmentationSpec {
            ops: Vec::new(),
            fill_color,
        },
    };
    (spec, derive_seed(seed, STREAM_AUG_APPLY))
}

#[derive(Debug, Clone)]
pub struct GeneratedSample {
    pub seed: u64,
    pub image: RgbImage,
    /// The page before augmentation.
    pub clean_image: RgbImage,
    pub tree: DocumentTree,
    pub ground_truth: String,
    pub augmentation: AugmentationSpec,
    pub draw_log: Vec<DrawEvent>,
}

/// Builds sample `index` alone; identical to what `generate_corpus` writes
/// for that index.
pub fn generate_sample(config: &GenerationConfig, res: &Resources, index: u64) -> Result<GeneratedSample> {
    let corpus = &config.file.corpus;
    let seed = sample_seed(corpus.master_seed, index);
    let plan = compose_layout(
        &config.file.layout,
        &res.lexicon,
        &res.pool,
        &res.render,
        derive_seed(seed, STREAM_LAYOUT),
    )?;
    let page = rasterize_page(&plan, &res.render)?;
    let ground_truth = serialize(&page.tree, corpus.mode);
    let (augmentation, aug_seed) = augmentation_plan(config, res.render.paper_color, index);
    let image = augment(&page.image, &augmentation, aug_seed)?;
    Ok(GeneratedSample {
        seed,
        image,
        clean_image: page.image,
        tree: page.tree,
        ground_truth,
        augmentation,
        draw_log: page.draw_log,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| SynthError::io(path, e))
}

/// Writes `images/`, `gt/`, optionally `anchors/`, and `manifest.jsonl`
/// under `out_dir`. A sample that fails is listed with status `failed` and
/// its error; the others are unaffected.
pub fn generate_corpus(config: &GenerationConfig, out_dir: &Path) -> Result<CorpusManifest> {
    let res = config.load_resources()?;
    let corpus = &config.file.corpus;
    for sub in ["images", "gt", "anchors"] {
        if sub == "anchors" && !corpus.anchors {
            continue;
        }
        let dir = out_dir.join(sub);
        fs::create_dir_all(&dir).map_err(|e| SynthError::io(&dir, e))?;
    }
    let fingerprint = config.fingerprint();

    let build = |index: usize| -> Result<ManifestEntry> {
        let id = format!("{}-{index:06}", corpus.id_prefix);
        let image_path = format!("images/{id}.png");
        let gt_path = format!("gt/{id}.gt.txt");
        let mut entry = ManifestEntry {
            id,
            image_path,
            gt_path,
            mode: corpus.mode,
            category: corpus.category.clone(),
            language: Language::Thai,
            seed: sample_seed(corpus.master_seed, index as u64),
            status: SampleStatus::Ok,
            config_fingerprint: fingerprint.clone(),
            anchor_path: None,
            error: None,
        };
        match generate_sample(config, &res, index as u64) {
            Ok(sample) => {
                entry.language = sample.tree.language();
                let img_file = out_dir.join(&entry.image_path);
                sample
                    .image
                    .save_with_format(&img_file, image::ImageFormat::Png)
                    .map_err(|e| SynthError::io(&img_file, std::io::Error::other(e)))?;
                write(&out_dir.join(&entry.gt_path), sample.ground_truth.as_bytes())?;
                if corpus.anchors {
                    let anchor = format!("anchors/{}.anchor.txt", entry.id);
                    write(&out_dir.join(&anchor), sample.tree.plain_text().as_bytes())?;
                    entry.anchor_path = Some(anchor);
                }
            }
            Err(err) => {
                entry.status = SampleStatus::Failed;
                entry.error = Some(err.to_string());
            }
        }
        Ok(entry)
    };

    let run = || (0..corpus.count).into_par_iter().map(build).collect::<Result<Vec<_>>>();
    let entries = match config.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| SynthError::Config(format!("worker pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let manifest = CorpusManifest { entries };
    write(&out_dir.join("manifest.jsonl"), manifest.to_jsonl().as_bytes())?;
    Ok(manifest)
}
