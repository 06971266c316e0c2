//! Singular-point detection with first-order complex filters.
//!
//! The gradient pair forms a complex tensor field `c = fx + i·fy`. Its magnitude `‖c‖` is
//! correlated with the Gaussian-windowed complex filter `(x + i·m·y)·g(x, y)` (order
//! `m = ±1`). The response is summarized per non-overlapping `W/4` block by its complex
//! population variance, min-max normalized, and the core is the peak block inside the
//! foreground interior.
//!
//! Around a singularity the response phase turns through a full cycle, so a block covering
//! it has near-zero mean response and a large variance; blocks elsewhere see a response of
//! roughly constant phase.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::imgcore::morph::{self, Border};
use crate::imgcore::{
    correlate_separable, gaussian_profile, normalize_minmax, GradientPair, Kernel2D, Raster,
};
use crate::scalar::Scalar;
use crate::segmentation::SegmentationMask;

/// Which complex raster is fed to the filter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorMode {
    /// Filter the real magnitude `‖c‖`.
    #[default]
    Magnitude,
    /// Filter the squared tensor `c²` (doubled-angle representation).
    Squared,
}

/// Per-pixel complex tensor `fx + i·fy` with its magnitude.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField<T> {
    pub values: Raster<Complex<T>>,
    pub magnitude: Raster<T>,
}

impl<T: Scalar> ComplexField<T> {
    pub fn dims(&self) -> (usize, usize) {
        self.values.dims()
    }
}

pub fn tensor_field<T: Scalar>(grad: &GradientPair<T>) -> Result<ComplexField<T>> {
    let values = grad.fx.zip_map(&grad.fy, Complex::new)?;
    let magnitude = values.map(|c| c.re.hypot(c.im));
    Ok(ComplexField { values, magnitude })
}

/// Complex filter `r·e^{imφ}·exp(-r²/2σ²)` sampled on integer offsets.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexFilterKernel<T> {
    order: i32,
    sigma: T,
    kernel: Kernel2D<Complex<T>>,
}

impl<T: Scalar> ComplexFilterKernel<T> {
    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn size(&self) -> usize {
        self.kernel.size()
    }

    #[inline]
    pub fn tap(&self, dx: isize, dy: isize) -> Complex<T> {
        self.kernel.tap(dx, dy)
    }

    pub fn as_kernel(&self) -> &Kernel2D<Complex<T>> {
        &self.kernel
    }
}

pub fn complex_filter_kernel<T: Scalar>(
    order: i32,
    sigma: T,
    size: usize,
) -> Result<ComplexFilterKernel<T>> {
    if order != 1 && order != -1 {
        return Err(Error::UnsupportedOrder(order));
    }
    if !sigma.is_finite() || sigma <= T::zero() {
        return Err(invalid(format!(
            "complex filter sigma must be positive, got {sigma}"
        )));
    }
    let denom = T::lit(2.0) * sigma * sigma;
    let kernel = Kernel2D::from_fn(size, |dx, dy| {
        let (x, y) = (T::lit(dx as f64), T::lit(dy as f64));
        let g = (-(x * x + y * y) / denom).exp();
        // r·e^{±iφ} = x ± i·y
        let im = y * g;
        Complex::new(x * g, if order == 1 { im } else { -im })
    })?;
    Ok(ComplexFilterKernel {
        order,
        sigma,
        kernel,
    })
}

/// Tap count for a filter window: even windows get one extra tap so the kernel has a center.
pub fn window_taps(window: usize) -> usize {
    if window.is_multiple_of(2) {
        window + 1
    } else {
        window
    }
}

/// Correlates the selected tensor raster with `kernel` (replicated edges).
///
/// The filter factorizes as `x·g(x)·g(y) + i·m·g(x)·y·g(y)`, so the response is built from
/// two separable passes.
pub fn filter_response<T: Scalar>(
    field: &ComplexField<T>,
    kernel: &ComplexFilterKernel<T>,
    mode: TensorMode,
) -> Result<Raster<Complex<T>>> {
    let g = gaussian_profile(kernel.sigma, kernel.size())?;
    let r = (kernel.size() / 2) as isize;
    let xg: Vec<T> = g
        .iter()
        .enumerate()
        .map(|(i, &gv)| T::lit((i as isize - r) as f64) * gv)
        .collect();
    let m = T::lit(kernel.order as f64);
    let out = match mode {
        TensorMode::Magnitude => {
            let a = correlate_separable(&field.magnitude, &xg, &g);
            let b = correlate_separable(&field.magnitude, &g, &xg);
            a.zip_map(&b, |re, im| Complex::new(re, m * im))?
        }
        TensorMode::Squared => {
            let sq = field.values.map(|c| c * c);
            let a = correlate_separable(&sq, &xg, &g);
            let b = correlate_separable(&sq, &g, &xg);
            let i_m = Complex::new(T::zero(), m);
            a.zip_map(&b, |a, b| a + i_m * b)?
        }
    };
    Ok(out)
}

/// Block statistics of a filter response: raw complex variances and their `[0, 1]` normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct VarianceImage<T> {
    pub block_size: usize,
    pub cols: usize,
    pub rows: usize,
    /// Pixel dimensions of the response this was computed from.
    pub width: usize,
    pub height: usize,
    /// Raw population variances, row-major.
    pub raw: Vec<T>,
    /// Min-max normalized variances, row-major.
    pub values: Vec<T>,
}

impl<T: Scalar> VarianceImage<T> {
    #[inline]
    pub fn value_at(&self, bx: usize, by: usize) -> T {
        self.values[by * self.cols + bx]
    }

    /// Pixel at the center of block `(bx, by)`, clamped into the image.
    pub fn block_center(&self, bx: usize, by: usize) -> (usize, usize) {
        let half = self.block_size / 2;
        (
            (bx * self.block_size + half).min(self.width - 1),
            (by * self.block_size + half).min(self.height - 1),
        )
    }

    /// Normalized values upsampled to pixel resolution.
    pub fn upsample(&self) -> Raster<T> {
        Raster::from_fn(self.width, self.height, |x, y| {
            self.value_at(x / self.block_size, y / self.block_size)
        })
    }
}

/// Population variance `E|R − E R|²` over non-overlapping `(W/4)²` blocks, then min-max
/// normalized. For a real-valued response this is the ordinary variance.
pub fn variance_image<T: Scalar>(
    response: &Raster<Complex<T>>,
    window: usize,
) -> Result<VarianceImage<T>> {
    let block = window / 4;
    if block == 0 {
        return Err(invalid(format!(
            "filter window {window} too small for W/4 blocks"
        )));
    }
    let (w, h) = response.dims();
    if w < block || h < block {
        return Err(invalid(format!(
            "response {w}x{h} smaller than one {block}x{block} variance block"
        )));
    }
    let cols = w.div_ceil(block);
    let rows = h.div_ceil(block);
    let raw = Raster::from_fn(cols, rows, |bx, by| {
        let x1 = ((bx + 1) * block).min(w);
        let y1 = ((by + 1) * block).min(h);
        let n = T::from_usize_lossy((x1 - bx * block) * (y1 - by * block));
        let mut mean = Complex::new(T::zero(), T::zero());
        for y in by * block..y1 {
            for &v in &response.row(y)[bx * block..x1] {
                mean += v;
            }
        }
        mean /= n;
        let mut acc = T::zero();
        for y in by * block..y1 {
            for &v in &response.row(y)[bx * block..x1] {
                acc += (v - mean).norm_sqr();
            }
        }
        acc / n
    });
    let values = normalize_minmax(&raw)?.into_raster().into_vec();
    Ok(VarianceImage {
        block_size: block,
        cols,
        rows,
        width: w,
        height: h,
        raw: raw.into_vec(),
        values,
    })
}

/// Search constraints for [`locate_core`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoreSearch {
    /// Peak-to-mean ratio of raw block variance required to report a singularity.
    pub min_response: f64,
    /// Candidate blocks must be at least this many blocks inside the foreground.
    pub margin_blocks: usize,
}

/// Peak of one variance image.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SingularPeak {
    pub found: bool,
    /// Center pixel `(x, y)` of the peak block, if any block was searchable.
    pub location: Option<(usize, usize)>,
    /// Normalized variance at the peak, in `[0, 1]`.
    pub peak_response: f64,
    /// Raw peak variance over the mean raw variance of the searched blocks.
    pub relative_response: f64,
}

/// Core (m = +1) and delta (m = −1) peaks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoreDetection {
    pub core: SingularPeak,
    pub delta: SingularPeak,
}

/// Blocks eligible for the peak search: block center in the foreground, then eroded by
/// `margin_blocks` with everything outside the grid counted as background.
pub fn search_blocks<T: Scalar>(
    var: &VarianceImage<T>,
    mask: &SegmentationMask,
    margin_blocks: usize,
) -> Raster<bool> {
    let mut blocks = Raster::from_fn(var.cols, var.rows, |bx, by| {
        let (x, y) = var.block_center(bx, by);
        mask.is_foreground(x, y)
    });
    for _ in 0..margin_blocks {
        blocks = morph::erode(&blocks, Border::Background);
    }
    blocks
}

/// Highest-variance block inside the foreground interior; ties resolve to the first block in
/// row-major order.
pub fn locate_core<T: Scalar>(
    var: &VarianceImage<T>,
    mask: &SegmentationMask,
    search: CoreSearch,
) -> Result<SingularPeak> {
    if var.values.is_empty() {
        return Err(invalid("empty variance image"));
    }
    if (mask.width(), mask.height()) != (var.width, var.height) {
        return Err(invalid(format!(
            "mask {}x{} does not match variance image {}x{}",
            mask.width(),
            mask.height(),
            var.width,
            var.height
        )));
    }
    if mask.foreground_count() == 0 {
        return Err(Error::NoForeground);
    }
    let eligible = search_blocks(var, mask, search.margin_blocks);
    let mut best: Option<(usize, usize, T)> = None;
    let mut sum = 0.0;
    let mut count = 0usize;
    for by in 0..var.rows {
        for bx in 0..var.cols {
            if !eligible.get(bx, by) {
                continue;
            }
            let v = var.raw[by * var.cols + bx];
            sum += v.as_f64();
            count += 1;
            if best.is_none_or(|(_, _, b)| v > b) {
                best = Some((bx, by, v));
            }
        }
    }
    let Some((bx, by, peak)) = best else {
        return Ok(SingularPeak {
            found: false,
            location: None,
            peak_response: 0.0,
            relative_response: 0.0,
        });
    };
    let mean = sum / count as f64;
    let relative = if mean > 0.0 {
        peak.as_f64() / mean
    } else {
        0.0
    };
    Ok(SingularPeak {
        found: relative >= search.min_response,
        location: Some(var.block_center(bx, by)),
        peak_response: var.value_at(bx, by).as_f64(),
        relative_response: relative,
    })
}
