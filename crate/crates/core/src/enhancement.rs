//! Orientation-aligned Gabor enhancement and local-mean binarization.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::imgcore::{GrayImage, Kernel2D, Raster};
use crate::orientation::OrientationField;
use crate::scalar::Scalar;
use crate::segmentation::BinaryImage;

pub const DEFAULT_BINARIZE_BLOCK: usize = 16;

/// Even-symmetric Gabor filter parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GaborParams {
    /// Ridge frequency in cycles per pixel.
    pub frequency: f64,
    /// Gaussian spread across the ridges (along the oscillation).
    pub sigma_x: f64,
    /// Gaussian spread along the ridges.
    pub sigma_y: f64,
    pub kernel_size: usize,
}

impl Default for GaborParams {
    fn default() -> Self {
        Self {
            frequency: 1.0 / 9.0,
            sigma_x: 4.0,
            sigma_y: 4.0,
            kernel_size: 17,
        }
    }
}

impl GaborParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.frequency > 0.0 && self.frequency <= 0.5) {
            return Err(invalid(format!(
                "gabor frequency {} outside (0, 0.5]",
                self.frequency
            )));
        }
        if !(self.sigma_x > 0.0 && self.sigma_y > 0.0) {
            return Err(invalid("gabor sigmas must be positive"));
        }
        if self.kernel_size < 3 || self.kernel_size.is_multiple_of(2) {
            return Err(invalid(format!(
                "gabor kernel size {} must be odd and >= 3",
                self.kernel_size
            )));
        }
        Ok(())
    }
}

/// Even (cosine) Gabor kernel for ridges running along `theta`, with its mean subtracted.
pub fn gabor_kernel<T: Scalar>(theta: T, params: &GaborParams) -> Result<Kernel2D<T>> {
    params.validate()?;
    let (s, c) = theta.sin_cos();
    let two_pi_f = T::lit(2.0 * std::f64::consts::PI * params.frequency);
    let sx2 = T::lit(params.sigma_x * params.sigma_x);
    let sy2 = T::lit(params.sigma_y * params.sigma_y);
    let half = T::lit(0.5);
    let k = Kernel2D::from_fn(params.kernel_size, |dx, dy| {
        let (dx, dy) = (T::lit(dx as f64), T::lit(dy as f64));
        let along = dx * c + dy * s;
        let across = -dx * s + dy * c;
        let env = (-half * (across * across / sx2 + along * along / sy2)).exp();
        env * (two_pi_f * across).cos()
    })?;
    let n = T::from_usize_lossy(k.taps().len());
    let mean = k.taps().iter().copied().sum::<T>() / n;
    Ok(k.map(|t| t - mean))
}

/// Filters every block with the Gabor kernel aligned to that block's orientation.
///
/// Filtered pixels are min-max renormalized to `[0, 1]`; blocks with zero coherence are
/// copied from the input untouched.
pub fn gabor_enhance<T: Scalar>(
    img: &GrayImage<T>,
    field: &OrientationField<T>,
    params: &GaborParams,
) -> Result<GrayImage<T>> {
    params.validate()?;
    if !field.covers(img.width(), img.height()) {
        return Err(invalid(format!(
            "orientation grid {}x{} (block {}) does not match image {}x{}",
            field.cols,
            field.rows,
            field.block_size,
            img.width(),
            img.height()
        )));
    }
    let (w, h) = img.dims();
    let mut out = img.as_raster().clone();
    let mut filtered = Raster::filled(w, h, false);
    let bs = field.block_size;
    for by in 0..field.rows {
        for bx in 0..field.cols {
            if field.coherence_at(bx, by) <= T::zero() {
                continue;
            }
            let kernel = gabor_kernel(field.theta_at(bx, by), params)?;
            for y in by * bs..((by + 1) * bs).min(h) {
                for x in bx * bs..((bx + 1) * bs).min(w) {
                    out.set(x, y, apply_at(img.as_raster(), &kernel, x, y));
                    filtered.set(x, y, true);
                }
            }
        }
    }
    let values: Vec<T> = out
        .data()
        .iter()
        .zip(filtered.data())
        .filter_map(|(&v, &f)| f.then_some(v))
        .collect();
    if let Some((lo, hi)) = crate::imgcore::min_max(&values) {
        let range = hi - lo;
        for (v, &f) in out.data_mut().iter_mut().zip(filtered.data()) {
            if f {
                *v = if range > T::zero() {
                    (*v - lo) / range
                } else {
                    T::zero()
                };
            }
        }
    }
    GrayImage::new(out)
}

fn apply_at<T: Scalar>(img: &Raster<T>, kernel: &Kernel2D<T>, x: usize, y: usize) -> T {
    let r = kernel.radius();
    let size = kernel.size();
    let taps = kernel.taps();
    let (w, h) = img.dims();
    let (xi, yi) = (x as isize, y as isize);
    let mut acc = T::zero();
    if xi >= r && yi >= r && xi + r < w as isize && yi + r < h as isize {
        let data = img.data();
        for ky in 0..size {
            let base = (y + ky - r as usize) * w + x - r as usize;
            for (kx, &t) in taps[ky * size..(ky + 1) * size].iter().enumerate() {
                acc += t * data[base + kx];
            }
        }
    } else {
        for dy in -r..=r {
            for dx in -r..=r {
                acc += kernel.tap(dx, dy) * img.get_clamped(xi + dx, yi + dy);
            }
        }
    }
    acc
}

/// Local-mean binarization: a pixel is white when it is at least its block's mean.
pub fn binarize<T: Scalar>(img: &Raster<T>, block: usize) -> BinaryImage {
    let block = block.max(1);
    let (w, h) = img.dims();
    let cols = w.div_ceil(block);
    let rows = h.div_ceil(block);
    let means = Raster::from_fn(cols, rows, |bx, by| {
        let mut sum = T::zero();
        let mut n = 0usize;
        let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
        for y in by * block..((by + 1) * block).min(h) {
            for &v in &img.row(y)[bx * block..((bx + 1) * block).min(w)] {
                sum += v;
                n += 1;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        // Rounding can push the mean of a constant block above its only value.
        (sum / T::from_usize_lossy(n)).max(lo).min(hi)
    });
    Raster::from_fn(w, h, |x, y| {
        img.get(x, y) >= means.get(x / block, y / block)
    })
}

/// White 1.0, black 0.0.
pub fn binary_to_gray<T: Scalar>(bin: &BinaryImage) -> GrayImage<T> {
    GrayImage::from_raster_clamped(bin.map(|b| if b { T::one() } else { T::zero() }))
}
