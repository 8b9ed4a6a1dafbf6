//! Acquisition-artifact simulation. Every op keeps the image size and works
//! on pixels only.

use image::{Rgb, RgbImage};
use nalgebra::{SMatrix, SVector};
use ocrkit_core::rng::{derive_seed, DetRng};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SynthError};

pub const MAX_OPS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum AugOp {
    GaussianBlur { sigma: f64 },
    /// Gaussian noise with `sigma` on the 0-255 scale.
    AdditiveNoise { sigma: f64 },
    /// Pull of each 8×8 luma block toward its mean; 4 replaces it outright.
    BlockQuantization { strength: f64 },
    /// Linear darkening across the page, at most `amplitude`.
    IlluminationGradient { amplitude: f64 },
    /// Each corner moves inward by up to `max_shift_pct` % of the width
    /// (horizontally) and height (vertically).
    PerspectiveWarp { max_shift_pct: f64 },
    /// Share of pixels, in percent, set to pure black or white.
    SaltPepper { rate_pct: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    GaussianBlur,
    AdditiveNoise,
    BlockQuantization,
    IlluminationGradient,
    PerspectiveWarp,
    SaltPepper,
}

impl OpKind {
    pub const ALL: [OpKind; 6] = [
        OpKind::GaussianBlur,
        OpKind::AdditiveNoise,
        OpKind::BlockQuantization,
        OpKind::IlluminationGradient,
        OpKind::PerspectiveWarp,
        OpKind::SaltPepper,
    ];

    /// Allowed parameter range.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            OpKind::GaussianBlur => (0.3, 1.5),
            OpKind::AdditiveNoise => (2.0, 12.0),
            OpKind::BlockQuantization => (1.0, 4.0),
            OpKind::IlluminationGradient => (0.05, 0.3),
            OpKind::PerspectiveWarp => (0.0, 2.0),
            OpKind::SaltPepper => (0.0, 0.5),
        }
    }

    pub fn with_param(&self, v: f64) -> AugOp {
        match self {
            OpKind::GaussianBlur => AugOp::GaussianBlur { sigma: v },
            OpKind::AdditiveNoise => AugOp::AdditiveNoise { sigma: v },
            OpKind::BlockQuantization => AugOp::BlockQuantization { strength: v },
            OpKind::IlluminationGradient => AugOp::IlluminationGradient { amplitude: v },
            OpKind::PerspectiveWarp => AugOp::PerspectiveWarp { max_shift_pct: v },
            OpKind::SaltPepper => AugOp::SaltPepper { rate_pct: v },
        }
    }

    fn stream(&self) -> u64 {
        0xA0 + *self as u64
    }
}

impl AugOp {
    pub fn kind(&self) -> OpKind {
        match self {
            AugOp::GaussianBlur { .. } => OpKind::GaussianBlur,
            AugOp::AdditiveNoise { .. } => OpKind::AdditiveNoise,
            AugOp::BlockQuantization { .. } => OpKind::BlockQuantization,
            AugOp::IlluminationGradient { .. } => OpKind::IlluminationGradient,
            AugOp::PerspectiveWarp { .. } => OpKind::PerspectiveWarp,
            AugOp::SaltPepper { .. } => OpKind::SaltPepper,
        }
    }

    pub fn param(&self) -> f64 {
        match *self {
            AugOp::GaussianBlur { sigma } | AugOp::AdditiveNoise { sigma } => sigma,
            AugOp::BlockQuantization { strength } => strength,
            AugOp::IlluminationGradient { amplitude } => amplitude,
            AugOp::PerspectiveWarp { max_shift_pct } => max_shift_pct,
            AugOp::SaltPepper { rate_pct } => rate_pct,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationSpec {
    pub ops: Vec<AugOp>,
    /// Color for canvas areas a warp exposes.
    pub fill_color: [u8; 3],
}

impl AugmentationSpec {
    pub fn identity() -> Self {
        Self {
            ops: Vec::new(),
            fill_color: [255; 3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ops.len() > MAX_OPS {
            return Err(SynthError::InvalidSpec(format!(
                "{} augmentation ops, at most {MAX_OPS} allowed",
                self.ops.len()
            )));
        }
        for op in &self.ops {
            let (lo, hi) = op.kind().bounds();
            let v = op.param();
            if !(lo..=hi).contains(&v) {
                return Err(SynthError::InvalidSpec(format!("{op:?}: parameter outside [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// Applies the ops in order. Each op draws from its own stream, derived
/// from `seed`, its kind and how many ops of that kind came before it, so
/// removing an op does not change what the others do.
pub fn augment(image: &RgbImage, spec: &AugmentationSpec, seed: u64) -> Result<RgbImage> {
    spec.validate()?;
    let mut out = image.clone();
    let mut seen = [0u64; 6];
    for op in &spec.ops {
        let kind = op.kind();
        let occurrence = seen[kind as usize];
        seen[kind as usize] += 1;
        let mut rng = DetRng::new(derive_seed(derive_seed(seed, kind.stream()), occurrence));
        out = match *op {
            AugOp::GaussianBlur { sigma } => blur_rgb(&out, sigma),
            AugOp::AdditiveNoise { sigma } => noise(out, sigma, &mut rng),
            AugOp::BlockQuantization { strength } => quantize_blocks(out, strength),
            AugOp::IlluminationGradient { amplitude } => illumination(out, amplitude, &mut rng),
            AugOp::PerspectiveWarp { max_shift_pct } => warp(&out, max_shift_pct, spec.fill_color, &mut rng),
            AugOp::SaltPepper { rate_pct } => salt_pepper(out, rate_pct, &mut rng),
        };
    }
    Ok(out)
}

fn gaussian_kernel(sigma: f64) -> Vec<f32> {
    let radius = (3.0 * sigma).ceil() as i64;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| (v / total) as f32).collect()
}

/// Separable Gaussian blur of one channel with clamped edges.
pub fn gaussian_blur_plane(data: &[f32], width: usize, height: usize, sigma: f64) -> Vec<f32> {
    assert_eq!(data.len(), width * height);
    let kernel = gaussian_kernel(sigma);
    let r = kernel.len() / 2;
    let mut tmp = vec![0f32; data.len()];
    let mut padded = vec![0f32; width + 2 * r];
    for (src, dst) in data.chunks_exact(width).zip(tmp.chunks_exact_mut(width)) {
        padded[..r].fill(src[0]);
        padded[r..r + width].copy_from_slice(src);
        padded[r + width..].fill(src[width - 1]);
        for (x, out) in dst.iter_mut().enumerate() {
            *out = padded[x..x + kernel.len()].iter().zip(&kernel).map(|(v, w)| v * w).sum();
        }
    }
    let mut out = vec![0f32; data.len()];
    for (y, dst) in out.chunks_exact_mut(width).enumerate() {
        for (k, w) in kernel.iter().enumerate() {
            let sy = (y + k).saturating_sub(r).min(height - 1);
            let src = &tmp[sy * width..(sy + 1) * width];
            for (o, v) in dst.iter_mut().zip(src) {
                *o += w * v;
            }
        }
    }
    out
}

fn blur_rgb(image: &RgbImage, sigma: f64) -> RgbImage {
    let (w, h) = (image.width() as usize, image.height() as usize);
    let mut out = image.clone();
    for c in 0..3 {
        let plane: Vec<f32> = image.pixels().map(|p| f32::from(p[c])).collect();
        let blurred = gaussian_blur_plane(&plane, w, h, sigma);
        for (p, v) in out.pixels_mut().zip(blurred) {
            p[c] = v.round().clamp(0.0, 255.0) as u8;
        }
    }
    out
}

fn noise(mut image: RgbImage, sigma: f64, rng: &mut DetRng) -> RgbImage {
    let normal = Normal::new(0.0, sigma).expect("sigma validated positive");
    for p in image.pixels_mut() {
        for c in 0..3 {
            let v = f64::from(p[c]) + normal.sample(rng);
            p[c] = v.round().clamp(0.0, 255.0) as u8;
        }
    }
    image
}

fn luma(p: &Rgb<u8>) -> f32 {
    0.299 * f32::from(p[0]) + 0.587 * f32::from(p[1]) + 0.114 * f32::from(p[2])
}

fn quantize_blocks(mut image: RgbImage, strength: f64) -> RgbImage {
    const B: u32 = 8;
    let alpha = (strength / 4.0) as f32;
    let (w, h) = image.dimensions();
    for by in (0..h).step_by(B as usize) {
        for bx in (0..w).step_by(B as usize) {
            let (x1, y1) = ((bx + B).min(w), (by + B).min(h));
            let mut sum = 0f32;
            for y in by..y1 {
                for x in bx..x1 {
                    sum += luma(image.get_pixel(x, y));
                }
            }
            let mean = sum / ((x1 - bx) * (y1 - by)) as f32;
            for y in by..y1 {
                for x in bx..x1 {
                    let p = image.get_pixel_mut(x, y);
                    let shift = alpha * (mean - luma(p));
                    for c in 0..3 {
                        p[c] = (f32::from(p[c]) + shift).round().clamp(0.0, 255.0) as u8;
                    }
                }
            }
        }
    }
    image
}

fn illumination(mut image: RgbImage, amplitude: f64, rng: &mut DetRng) -> RgbImage {
    let theta = rng.uniform(0.0, std::f64::consts::TAU);
    let (dx, dy) = (theta.cos(), theta.sin());
    let (w, h) = (f64::from(image.width()), f64::from(image.height()));
    let corners = [0.0, w * dx, h * dy, w * dx + h * dy];
    let lo = corners.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = corners.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(f64::EPSILON);
    for (x, y, p) in image.enumerate_pixels_mut() {
        let t = ((f64::from(x) + 0.5) * dx + (f64::from(y) + 0.5) * dy - lo) / span;
        let factor = 1.0 - amplitude * t.clamp(0.0, 1.0);
        for c in 0..3 {
            p[c] = (f64::from(p[c]) * factor).round() as u8;
        }
    }
    image
}

/// Homography taking `from[i]` to `to[i]` (8 unknowns, h33 = 1).
fn homography(from: &[(f64, f64); 4], to: &[(f64, f64); 4]) -> Option<[f64; 9]> {
    let mut a = SMatrix::<f64, 8, 8>::zeros();
    let mut b = SVector::<f64, 8>::zeros();
    for i in 0..4 {
        let ((x, y), (u, v)) = (from[i], to[i]);
        a.set_row(2 * i, &nalgebra::RowSVector::<f64, 8>::from_row_slice(&[x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y]));
        a.set_row(2 * i + 1, &nalgebra::RowSVector::<f64, 8>::from_row_slice(&[0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y]));
        b[2 * i] = u;
        b[2 * i + 1] = v;
    }
    let h = a.lu().solve(&b)?;
    Some([h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0])
}

/// Corner positions after the warp: top-left, top-right, bottom-right,
/// bottom-left, each moved inward.
pub fn warp_corners(width: u32, height: u32, max_shift_pct: f64, rng: &mut DetRng) -> [(f64, f64); 4] {
    let (w, h) = (f64::from(width), f64::from(height));
    let mut shift = |extent: f64| rng.uniform(0.0, max_shift_pct / 100.0) * extent;
    let tl = (shift(w), shift(h));
    let tr = (w - shift(w), shift(h));
    let br = (w - shift(w), h - shift(h));
    let bl = (shift(w), h - shift(h));
    [tl, tr, br, bl]
}

fn warp(image: &RgbImage, max_shift_pct: f64, fill: [u8; 3], rng: &mut DetRng) -> RgbImage {
    let (w, h) = image.dimensions();
    let src = [(0.0, 0.0), (f64::from(w), 0.0), (f64::from(w), f64::from(h)), (0.0, f64::from(h))];
    let dst = warp_corners(w, h, max_shift_pct, rng);
    let Some(m) = homography(&dst, &src) else {
        return image.clone();
    };
    let mut out = RgbImage::from_pixel(w, h, Rgb(fill));
    for (x, y, p) in out.enumerate_pixels_mut() {
        let (u, v) = (f64::from(x) + 0.5, f64::from(y) + 0.5);
        let d = m[6] * u + m[7] * v + m[8];
        let sx = (m[0] * u + m[1] * v + m[2]) / d;
        let sy = (m[3] * u + m[4] * v + m[5]) / d;
        if sx < 0.0 || sy < 0.0 || sx > f64::from(w) || sy > f64::from(h) {
            continue;
        }
        *p = bilinear(image, sx - 0.5, sy - 0.5);
    }
    out
}

fn bilinear(image: &RgbImage, x: f64, y: f64) -> Rgb<u8> {
    let (w, h) = (image.width() as i64, image.height() as i64);
    let (x0, y0) = (x.floor() as i64, y.floor() as i64);
    let (tx, ty) = (x - x0 as f64, y - y0 as f64);
    let px = |xx: i64, yy: i64| image.get_pixel(xx.clamp(0, w - 1) as u32, yy.clamp(0, h - 1) as u32);
    let (a, b, c, d) = (px(x0, y0), px(x0 + 1, y0), px(x0, y0 + 1), px(x0 + 1, y0 + 1));
    let mut out = [0u8; 3];
    for ch in 0..3 {
        let top = f64::from(a[ch]) * (1.0 - tx) + f64::from(b[ch]) * tx;
        let bottom = f64::from(c[ch]) * (1.0 - tx) + f64::from(d[ch]) * tx;
        out[ch] = (top * (1.0 - ty) + bottom * ty).round() as u8;
    }
    Rgb(out)
}

fn salt_pepper(mut image: RgbImage, rate_pct: f64, rng: &mut DetRng) -> RgbImage {
    let p = rate_pct / 100.0;
    for px in image.pixels_mut() {
        if rng.bernoulli(p) {
            *px = if rng.bernoulli(0.5) { Rgb([255; 3]) } else { Rgb([0; 3]) };
        }
    }
    image
}

/// Which ops a corpus may use, with per-op parameter ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentationPool {
    /// Share of samples that get any augmentation.
    pub fraction: f64,
    /// Ops drawn per augmented sample: uniform in `1..=max_ops`.
    pub max_ops: usize,
    pub gaussian_blur: Option<[f64; 2]>,
    pub additive_noise: Option<[f64; 2]>,
    pub block_quantization: Option<[f64; 2]>,
    pub illumination_gradient: Option<[f64; 2]>,
    pub perspective_warp: Option<[f64; 2]>,
    pub salt_pepper: Option<[f64; 2]>,
}

impl Default for AugmentationPool {
    fn default() -> Self {
        Self {
            fraction: 1.0,
            max_ops: MAX_OPS,
            gaussian_blur: None,
            additive_noise: None,
            block_quantization: None,
            illumination_gradient: None,
            perspective_warp: None,
            salt_pepper: None,
        }
    }
}

impl AugmentationPool {
    /// Every op enabled over its full range.
    pub fn all_ops() -> Self {
        let full = |k: OpKind| Some(<[f64; 2]>::from(k.bounds()));
        Self {
            gaussian_blur: full(OpKind::GaussianBlur),
            additive_noise: full(OpKind::AdditiveNoise),
            block_quantization: full(OpKind::BlockQuantization),
            illumination_gradient: full(OpKind::IlluminationGradient),
            perspective_warp: full(OpKind::PerspectiveWarp),
            salt_pepper: full(OpKind::SaltPepper),
            ..Self::default()
        }
    }

    pub fn enabled(&self) -> Vec<(OpKind, [f64; 2])> {
        let slots = [
            self.gaussian_blur,
            self.additive_noise,
            self.block_quantization,
            self.illumination_gradient,
            self.perspective_warp,
            self.salt_pepper,
        ];
        OpKind::ALL
            .into_iter()
            .zip(slots)
            .filter_map(|(k, r)| r.map(|r| (k, r)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SynthError::InvalidSpec(m));
        if !(0.0..=1.0).contains(&self.fraction) {
            return bad("augmentation fraction outside [0, 1]".into());
        }
        if self.max_ops == 0 || self.max_ops > MAX_OPS {
            return bad(format!("max_ops must be in 1..={MAX_OPS}"));
        }
        for (kind, [lo, hi]) in self.enabled() {
            let (blo, bhi) = kind.bounds();
            if !(blo <= lo && lo <= hi && hi <= bhi) {
                return bad(format!("{kind:?} range [{lo}, {hi}] not within [{blo}, {bhi}]"));
            }
        }
        Ok(())
    }

    /// Draws a sample's op list: with probability `fraction`, between 1 and
    /// `max_ops` distinct enabled ops in pool order, parameters uniform in
    /// their ranges.
    pub fn sample(&self, fill_color: [u8; 3], seed: u64) -> AugmentationSpec {
        let mut rng = DetRng::new(seed);
        let enabled = self.enabled();
        let mut spec = AugmentationSpec {
            ops: Vec::new(),
            fill_color,
        };
        if enabled.is_empty() || !rng.bernoulli(self.fraction) {
            return spec;
        }
        let k = rng.range_inclusive(1, self.max_ops.min(enabled.len()) as u32) as usize;
        let mut idx: Vec<usize> = (0..enabled.len()).collect();
        rng.shuffle(&mut idx);
        let mut chosen = idx[..k].to_vec();
        chosen.sort_unstable();
        for i in chosen {
            let (kind, [lo, hi]) = enabled[i];
            spec.ops.push(kind.with_param(rng.uniform(lo, hi).min(hi)));
        }
        spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(w: u32, h: u32, v: u8) -> RgbImage {
        RgbImage::from_pixel(w, h, Rgb([v; 3]))
    }

    #[test]
    fn empty_spec_is_identity() {
        let img = RgbImage::from_fn(13, 7, |x, y| Rgb([x as u8, y as u8, 3]));
        assert_eq!(augment(&img, &AugmentationSpec::identity(), 5).unwrap(), img);
    }

    #[test]
    fn blur_conserves_mass_and_is_symmetric() {
        let (w, h) = (31, 31);
        let mut plane = vec![0f32; w * h];
        plane[15 * w + 15] = 1000.0;
        let out = gaussian_blur_plane(&plane, w, h, 1.0);
        let mass: f32 = out.iter().sum();
        assert!((mass - 1000.0).abs() < 1e-3);
        for d in 1..5 {
            let c = |x: usize, y: usize| out[y * w + x];
            assert!((c(15 + d, 15) - c(15 - d, 15)).abs() < 1e-4);
            assert!((c(15, 15 + d) - c(15, 15 - d)).abs() < 1e-4);
            assert!((c(15 + d, 15) - c(15, 15 + d)).abs() < 1e-4);
        }
    }

    #[test]
    fn salt_pepper_count_is_binomial() {
        let img = gray(1000, 1000, 128);
        let spec = AugmentationSpec {
            ops: vec![AugOp::SaltPepper { rate_pct: 0.5 }],
            fill_color: [255; 3],
        };
        let out = augment(&img, &spec, 11).unwrap();
        let flipped = out.pixels().filter(|p| p[0] != 128).count() as f64;
        let (n, p) = (1e6_f64, 0.005_f64);
        let sd = (n * p * (1.0 - p)).sqrt();
        assert!((flipped - n * p).abs() <= 3.0 * sd, "flipped {flipped}");
    }

    #[test]
    fn illumination_darkens() {
        let img = gray(64, 48, 240);
        let spec = AugmentationSpec {
            ops: vec![AugOp::IlluminationGradient { amplitude: 0.3 }],
            fill_color: [255; 3],
        };
        let mean = |i: &RgbImage| i.pixels().map(|p| f64::from(p[0])).sum::<f64>() / f64::from(i.width() * i.height());
        assert!(mean(&augment(&img, &spec, 1).unwrap()) < mean(&img));
    }

    #[test]
    fn zero_warp_is_identity() {
        let img = RgbImage::from_fn(40, 30, |x, y| Rgb([(x * 6) as u8, (y * 8) as u8, 0]));
        let spec = AugmentationSpec {
            ops: vec![AugOp::PerspectiveWarp { max_shift_pct: 0.0 }],
            fill_color: [255; 3],
        };
        assert_eq!(augment(&img, &spec, 2).unwrap(), img);
    }

    #[test]
    fn ops_keep_dimensions_and_validate() {
        let img = gray(50, 20, 200);
        let spec = AugmentationSpec {
            ops: vec![
                AugOp::GaussianBlur { sigma: 1.5 },
                AugOp::BlockQuantization { strength: 4.0 },
                AugOp::AdditiveNoise { sigma: 12.0 },
                AugOp::PerspectiveWarp { max_shift_pct: 2.0 },
            ],
            fill_color: [255; 3],
        };
        assert_eq!(augment(&img, &spec, 3).unwrap().dimensions(), (50, 20));
        let mut too_many = spec.clone();
        too_many.ops.push(AugOp::SaltPepper { rate_pct: 0.1 });
        assert!(augment(&img, &too_many, 3).is_err());
        let out_of_range = AugmentationSpec {
            ops: vec![AugOp::GaussianBlur { sigma: 3.0 }],
            fill_color: [255; 3],
        };
        assert!(augment(&img, &out_of_range, 3).is_err());
    }

    #[test]
    fn homography_maps_corners() {
        let from = [(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)];
        let to = [(1.0, 0.5), (9.0, 0.0), (10.0, 9.0), (0.2, 10.0)];
        let m = homography(&from, &to).unwrap();
        for ((x, y), (u, v)) in from.iter().zip(to) {
            let d = m[6] * x + m[7] * y + m[8];
            assert!(((m[0] * x + m[1] * y + m[2]) / d - u).abs() < 1e-9);
            assert!(((m[3] * x + m[4] * y + m[5]) / d - v).abs() < 1e-9);
        }
    }

    #[test]
    fn pool_sampling_respects_limits() {
        let pool = AugmentationPool::all_ops();
        pool.validate().unwrap();
        for seed in 0..200 {
            let spec = pool.sample([255; 3], seed);
            assert!((1..=MAX_OPS).contains(&spec.ops.len()));
            spec.validate().unwrap();
        }
    }
}
