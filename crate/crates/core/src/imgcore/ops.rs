use crate::error::{invalid, Result};
use crate::scalar::Scalar;

use super::kernel::Kernel2D;
use super::raster::{GrayImage, Raster};

/// Horizontal and vertical derivative rasters of an image.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientPair<T> {
    pub fx: Raster<T>,
    pub fy: Raster<T>,
}

impl<T: Copy> GradientPair<T> {
    pub fn dims(&self) -> (usize, usize) {
        self.fx.dims()
    }
}

/// Min-max normalization `(I - min) / (max - min)`; a constant raster maps to all zeros.
pub fn normalize_minmax<T: Scalar>(img: &Raster<T>) -> Result<GrayImage<T>> {
    if img.is_empty() {
        return Err(invalid("cannot normalize an empty raster"));
    }
    let (lo, hi) =
        min_max(img.data()).ok_or_else(|| invalid("raster contains non-finite samples"))?;
    let range = hi - lo;
    let out = if range > T::zero() {
        img.map(|v| (v - lo) / range)
    } else {
        img.map(|_| T::zero())
    };
    GrayImage::new(out)
}

/// Linear remap of `[min, max]` onto `[0, 1]`.
pub fn contrast_stretch<T: Scalar>(img: &GrayImage<T>) -> Result<GrayImage<T>> {
    if img.is_empty() {
        return Err(invalid("cannot stretch an empty image"));
    }
    normalize_minmax(img.as_raster())
}

/// `(min, max)` of finite samples, `None` if any sample is non-finite or the slice is empty.
pub fn min_max<T: Scalar>(values: &[T]) -> Option<(T, T)> {
    let mut it = values.iter();
    let first = *it.next()?;
    if !first.is_finite() {
        return None;
    }
    let mut lo = first;
    let mut hi = first;
    for &v in it {
        if !v.is_finite() {
            return None;
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Some((lo, hi))
}

/// 3x3 Sobel kernels scaled by 1/8 so a unit-slope ramp yields derivative 1.
pub fn sobel_kernels<T: Scalar>() -> (Kernel2D<T>, Kernel2D<T>) {
    let eighth = T::lit(0.125);
    let sx = [-1.0, 0.0, 1.0, -2.0, 0.0, 2.0, -1.0, 0.0, 1.0];
    let sy = [-1.0, -2.0, -1.0, 0.0, 0.0, 0.0, 1.0, 2.0, 1.0];
    let build = |w: [f64; 9]| {
        Kernel2D::from_vec(3, w.iter().map(|&v| T::lit(v) * eighth).collect()).unwrap()
    };
    (build(sx), build(sy))
}

/// Sobel derivatives with replicated edges.
pub fn gradients<T: Scalar>(img: &Raster<T>) -> Result<GradientPair<T>> {
    if img.width() < 3 || img.height() < 3 {
        return Err(invalid(format!(
            "gradients need at least 3x3 pixels, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    // Differences first, then the [1 2 1] smoothing, so flat regions give exact zeros.
    // Equal to correlation with `sobel_kernels`.
    let (w, h) = img.dims();
    let eighth = T::lit(0.125);
    let two = T::lit(2.0);
    let at = |x: isize, y: isize| img.get_clamped(x, y);
    let dx = Raster::from_fn(w, h, |x, y| {
        let (x, y) = (x as isize, y as isize);
        at(x + 1, y) - at(x - 1, y)
    });
    let dy = Raster::from_fn(w, h, |x, y| {
        let (x, y) = (x as isize, y as isize);
        at(x, y + 1) - at(x, y - 1)
    });
    let fx = Raster::from_fn(w, h, |x, y| {
        let (x, y) = (x as isize, y as isize);
        (dx.get_clamped(x, y - 1) + two * dx.get_clamped(x, y) + dx.get_clamped(x, y + 1)) * eighth
    });
    let fy = Raster::from_fn(w, h, |x, y| {
        let (x, y) = (x as isize, y as isize);
        (dy.get_clamped(x - 1, y) + two * dy.get_clamped(x, y) + dy.get_clamped(x + 1, y)) * eighth
    });
    Ok(GradientPair { fx, fy })
}
