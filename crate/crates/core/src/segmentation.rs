//! Foreground segmentation by block gray-level variance.
//!
//! Blocks are scored by population variance, split with Otsu's method over the block
//! variances, cleaned on the block grid (closing, largest 4-connected component, hole
//! filling) and upsampled back to pixel resolution.

use crate::error::{invalid, Error, Result};
use crate::imgcore::morph;
use crate::imgcore::{GrayImage, Raster};
use crate::scalar::Scalar;

/// Boolean raster; `true` is white.
pub type BinaryImage = Raster<bool>;

pub const DEFAULT_SEGMENT_BLOCK: usize = 16;

const CLOSING_ITERATIONS: usize = 2;

/// When the lower Otsu class mean reaches this fraction of the upper class mean the
/// block variances are not bimodal and every textured block is kept.
const UNIMODAL_RATIO: f64 = 0.25;

/// Block variances at or below this are treated as flat.
const FLAT_VARIANCE: f64 = 1e-12;

/// Pixel-resolution foreground mask (white = fingerprint area).
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentationMask(BinaryImage);

impl SegmentationMask {
    pub fn new(mask: BinaryImage) -> Self {
        Self(mask)
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }

    #[inline]
    pub fn is_foreground(&self, x: usize, y: usize) -> bool {
        self.0.get(x, y)
    }

    pub fn as_raster(&self) -> &BinaryImage {
        &self.0
    }

    pub fn foreground_count(&self) -> usize {
        self.0.data().iter().filter(|&&v| v).count()
    }

    /// Foreground 255, background 0.
    pub fn to_u8(&self) -> Vec<u8> {
        self.0
            .data()
            .iter()
            .map(|&v| if v { 255 } else { 0 })
            .collect()
    }

    /// Number of 4-connected foreground components.
    pub fn component_count(&self) -> usize {
        morph::label4(&self.0).1.len()
    }
}

/// Population variance of every `block x block` tile; edge tiles use the pixels they have.
pub fn block_variances<T: Scalar>(img: &Raster<T>, block: usize) -> Raster<f64> {
    let cols = img.width().div_ceil(block);
    let rows = img.height().div_ceil(block);
    Raster::from_fn(cols, rows, |bx, by| {
        let x1 = ((bx + 1) * block).min(img.width());
        let y1 = ((by + 1) * block).min(img.height());
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        let mut n = 0.0;
        for y in by * block..y1 {
            for &v in &img.row(y)[bx * block..x1] {
                let v = v.as_f64();
                sum += v;
                sum2 += v * v;
                n += 1.0;
            }
        }
        let mean = sum / n;
        (sum2 / n - mean * mean).max(0.0)
    })
}

/// Otsu threshold over raw values: the lowest `t` maximizing between-class variance of
/// `{v <= t}` vs `{v > t}`. Returns `(t, mean_low, mean_high)`, or `None` if all values are equal.
pub fn otsu_threshold(values: &[f64]) -> Option<(f64, f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let total: f64 = sorted.iter().sum();
    let mut best: Option<(f64, f64, f64, f64)> = None;
    let mut low_sum = 0.0;
    for i in 0..sorted.len() - 1 {
        low_sum += sorted[i];
        if sorted[i] == sorted[i + 1] {
            continue;
        }
        let n0 = (i + 1) as f64;
        let n1 = n - n0;
        let m0 = low_sum / n0;
        let m1 = (total - low_sum) / n1;
        let objective = (n0 / n) * (n1 / n) * (m0 - m1) * (m0 - m1);
        // Relative slack so analytically equal objectives resolve to the lower threshold.
        if best.is_none_or(|(_, obj, _, _)| objective > obj + 1e-12 * obj.abs()) {
            best = Some((sorted[i], objective, m0, m1));
        }
    }
    best.map(|(t, _, m0, m1)| (t, m0, m1))
}

/// Segments `img` into a single cleaned foreground region.
pub fn segment<T: Scalar>(img: &GrayImage<T>, block: usize) -> Result<SegmentationMask> {
    if block == 0 {
        return Err(invalid("segmentation block size must be positive"));
    }
    if img.width() < block || img.height() < block {
        return Err(invalid(format!(
            "image {}x{} smaller than one {block}x{block} segmentation block",
            img.width(),
            img.height()
        )));
    }
    let variances = block_variances(img.as_raster(), block);
    let textured = |v: f64| v > FLAT_VARIANCE;
    if !variances.data().iter().any(|&v| textured(v)) {
        return Err(Error::NoForeground);
    }
    let blocks = match otsu_threshold(variances.data()) {
        Some((t, low, high)) if low < UNIMODAL_RATIO * high => {
            variances.map(|v| v > t && textured(v))
        }
        _ => variances.map(textured),
    };
    let blocks = morph::close(&blocks, CLOSING_ITERATIONS);
    let blocks = morph::fill_holes(&morph::largest_component(&blocks));
    if !blocks.data().iter().any(|&v| v) {
        return Err(Error::NoForeground);
    }
    let mask = Raster::from_fn(img.width(), img.height(), |x, y| {
        blocks.get(x / block, y / block)
    });
    Ok(SegmentationMask(mask))
}
