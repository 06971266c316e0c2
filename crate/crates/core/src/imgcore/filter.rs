use std::ops::{Add, Mul};

use num_traits::Zero;

use super::kernel::Kernel2D;
use super::raster::Raster;

/// Correlation of `img` with `kernel` (no kernel flip), replicated-edge boundaries.
///
/// `out(x, y) = Σ k(dx, dy) · img(x + dx, y + dy)`. Output has the input's dimensions.
/// Works for any tap/pixel combination with `K * A -> O`, which covers real and complex
/// kernels over real rasters and complex kernels over complex rasters.
pub fn correlate<A, K, O>(img: &Raster<A>, kernel: &Kernel2D<K>) -> Raster<O>
where
    A: Copy,
    K: Copy + Mul<A, Output = O>,
    O: Copy + Zero + Add<Output = O>,
{
    let (w, h) = img.dims();
    if img.is_empty() {
        return Raster::from_fn(w, h, |_, _| O::zero());
    }
    let r = kernel.radius();
    let size = kernel.size();
    let taps = kernel.taps();
    let interior = |x: usize, y: usize| {
        x as isize >= r
            && y as isize >= r
            && (x as isize) < w as isize - r
            && (y as isize) < h as isize - r
    };
    let data = img.data();
    Raster::from_fn(w, h, |x, y| {
        let mut acc = O::zero();
        if interior(x, y) {
            for ky in 0..size {
                let row = (y + ky - r as usize) * w + x - r as usize;
                let krow = &taps[ky * size..(ky + 1) * size];
                for (kx, &t) in krow.iter().enumerate() {
                    acc = acc + t * data[row + kx];
                }
            }
        } else {
            for dy in -r..=r {
                for dx in -r..=r {
                    acc = acc
                        + kernel.tap(dx, dy) * img.get_clamped(x as isize + dx, y as isize + dy);
                }
            }
        }
        acc
    })
}

/// Separable correlation: horizontal pass with `row`, then vertical pass with `col`.
///
/// Equivalent to [`correlate`] with the outer-product kernel `col[dy] · row[dx]`,
/// since replicated-edge clamping acts independently per axis.
pub fn correlate_separable<P, T>(img: &Raster<P>, row: &[T], col: &[T]) -> Raster<P>
where
    P: Copy + Zero + Add<Output = P> + Mul<T, Output = P>,
    T: Copy,
{
    debug_assert!(row.len() % 2 == 1 && col.len() % 2 == 1);
    let (w, h) = img.dims();
    if img.is_empty() {
        return img.clone();
    }
    let rr = (row.len() / 2) as isize;
    let horizontal = Raster::from_fn(w, h, |x, y| {
        let line = img.row(y);
        let mut acc = P::zero();
        for (i, &t) in row.iter().enumerate() {
            let sx = (x as isize + i as isize - rr).clamp(0, w as isize - 1) as usize;
            acc = acc + line[sx] * t;
        }
        acc
    });
    let cr = (col.len() / 2) as isize;
    Raster::from_fn(w, h, |x, y| {
        let mut acc = P::zero();
        for (i, &t) in col.iter().enumerate() {
            let sy = (y as isize + i as isize - cr).clamp(0, h as isize - 1) as usize;
            acc = acc + horizontal.get(x, sy) * t;
        }
        acc
    })
}
