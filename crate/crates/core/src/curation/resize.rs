use image::RgbImage;
use serde::{Deserialize, Serialize};

use super::CurationError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResizeVariant {
    /// Always scale to `target_px` wide.
    V1FixedWidth,
    /// Keep images whose longer side is below `target_px`; otherwise scale
    /// the longer side to `target_px`.
    V15ResolutionAware,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResizePolicy {
    pub variant: ResizeVariant,
    pub target_px: u32,
}

impl ResizePolicy {
    pub const DEFAULT_TARGET: u32 = 1800;

    pub fn v1() -> Self {
        Self {
            variant: ResizeVariant::V1FixedWidth,
            target_px: Self::DEFAULT_TARGET,
        }
    }

    pub fn v15() -> Self {
        Self {
            variant: ResizeVariant::V15ResolutionAware,
            target_px: Self::DEFAULT_TARGET,
        }
    }

    /// Output size for a `width × height` input; the free side is rounded
    /// to the nearest pixel and kept at least 1.
    pub fn target_dimensions(&self, width: u32, height: u32) -> Result<(u32, u32), CurationError> {
        if width == 0 || height == 0 {
            return Err(CurationError::ZeroDimension { width, height });
        }
        if self.target_px == 0 {
            return Err(CurationError::ZeroDimension {
                width: self.target_px,
                height: self.target_px,
            });
        }
        let t = self.target_px;
        let scaled = |side: u32, num: u32, den: u32| -> u32 {
            ((f64::from(side) * f64::from(num) / f64::from(den)).round() as u32).max(1)
        };
        Ok(match self.variant {
            ResizeVariant::V1FixedWidth => (t, scaled(height, t, width)),
            ResizeVariant::V15ResolutionAware => {
                if width.max(height) < t {
                    (width, height)
                } else if width >= height {
                    (t, scaled(height, t, width))
                } else {
                    (scaled(width, t, height), t)
                }
            }
        })
    }
}

/// Resizes with area averaging along shrinking axes and bilinear
/// interpolation along growing ones. Returns an exact copy when the size
/// is unchanged.
pub fn resize_image(image: &RgbImage, policy: &ResizePolicy) -> Result<RgbImage, CurationError> {
    let (w, h) = image.dimensions();
    let (nw, nh) = policy.target_dimensions(w, h)?;
    if (nw, nh) == (w, h) {
        return Ok(image.clone());
    }
    Ok(resample(image, nw, nh))
}

/// Source taps and weights for each destination index along one axis.
fn axis_taps(src: u32, dst: u32) -> Vec<Vec<(usize, f32)>> {
    let (src_f, dst_f) = (f64::from(src), f64::from(dst));
    let scale = src_f / dst_f;
    (0..dst)
        .map(|i| {
            if dst < src {
                let lo = f64::from(i) * scale;
                let hi = lo + scale;
                let mut taps = Vec::new();
                let mut s = lo.floor() as u32;
                while f64::from(s) < hi && s < src {
                    let overlap = (f64::from(s + 1).min(hi) - f64::from(s).max(lo)).max(0.0);
                    if overlap > 0.0 {
                        taps.push((s as usize, (overlap / scale) as f32));
                    }
                    s += 1;
                }
                taps
            } else if dst > src {
                let x = ((f64::from(i) + 0.5) * scale - 0.5).clamp(0.0, src_f - 1.0);
                let x0 = x.floor() as usize;
                let x1 = (x0 + 1).min(src as usize - 1);
                let t = (x - x0 as f64) as f32;
                if x1 == x0 || t == 0.0 {
                    vec![(x0, 1.0)]
                } else {
                    vec![(x0, 1.0 - t), (x1, t)]
                }
            } else {
                vec![(i as usize, 1.0)]
            }
        })
        .collect()
}

fn resample(image: &RgbImage, nw: u32, nh: u32) -> RgbImage {
    let (w, h) = image.dimensions();
    let cols = axis_taps(w, nw);
    let rows = axis_taps(h, nh);
    let src = image.as_raw();

    let mut horiz = vec![0f32; nw as usize * h as usize * 3];
    for y in 0..h as usize {
        let row = &src[y * w as usize * 3..(y + 1) * w as usize * 3];
        for (x, taps) in cols.iter().enumerate() {
            let out = &mut horiz[(y * nw as usize + x) * 3..][..3];
            for &(s, wt) in taps {
                for c in 0..3 {
                    out[c] += wt * f32::from(row[s * 3 + c]);
                }
            }
        }
    }

    let mut out = RgbImage::new(nw, nh);
    let buf: &mut [u8] = &mut out;
    for (y, taps) in rows.iter().enumerate() {
        for x in 0..nw as usize {
            for c in 0..3 {
                let v: f32 = taps
                    .iter()
                    .map(|&(s, wt)| wt * horiz[(s * nw as usize + x) * 3 + c])
                    .sum();
                buf[(y * nw as usize + x) * 3 + c] = v.round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    out
}
