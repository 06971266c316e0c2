//! Block orientation field from averaged squared gradients.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::imgcore::{gradients, Raster};
use crate::scalar::Scalar;

/// Per-block ridge angle in `[0, π)` and gradient coherence in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrientationField<T> {
    pub block_size: usize,
    pub cols: usize,
    pub rows: usize,
    /// Row-major ridge angles in radians.
    pub theta: Vec<T>,
    /// Row-major coherence values.
    pub coherence: Vec<T>,
}

impl<T: Scalar> OrientationField<T> {
    #[inline]
    pub fn theta_at(&self, bx: usize, by: usize) -> T {
        self.theta[by * self.cols + bx]
    }

    #[inline]
    pub fn coherence_at(&self, bx: usize, by: usize) -> T {
        self.coherence[by * self.cols + bx]
    }

    /// Block index covering pixel `(x, y)`.
    #[inline]
    pub fn block_of(&self, x: usize, y: usize) -> (usize, usize) {
        (x / self.block_size, y / self.block_size)
    }

    /// Whether the grid has exactly the shape `estimate_orientation` gives an image of this size.
    pub fn covers(&self, width: usize, height: usize) -> bool {
        self.block_size > 0
            && self.cols == width.div_ceil(self.block_size)
            && self.rows == height.div_ceil(self.block_size)
            && self.theta.len() == self.cols * self.rows
            && self.coherence.len() == self.cols * self.rows
    }
}

/// Circular distance between two axial angles (period π).
pub fn axial_distance<T: Scalar>(a: T, b: T) -> T {
    let pi = T::PI();
    let d = (a - b).abs() % pi;
    d.min(pi - d)
}

/// Averaged squared-gradient orientation per `block_size` tile.
///
/// θ = ½·atan2(Σ 2·fx·fy, Σ (fx² − fy²)) + π/2 (ridges run perpendicular to the dominant
/// gradient), coherence = |Σ (fx² − fy², 2·fx·fy)| / Σ (fx² + fy²). Flat tiles get θ = 0 and
/// coherence 0.
pub fn estimate_orientation<T: Scalar>(
    img: &Raster<T>,
    block_size: usize,
) -> Result<OrientationField<T>> {
    if block_size == 0 || img.width() < block_size || img.height() < block_size {
        return Err(invalid(format!(
            "image {}x{} smaller than one {block_size}x{block_size} orientation block",
            img.width(),
            img.height()
        )));
    }
    let grad = gradients(img)?;
    let cols = img.width().div_ceil(block_size);
    let rows = img.height().div_ceil(block_size);
    let mut theta = Vec::with_capacity(cols * rows);
    let mut coherence = Vec::with_capacity(cols * rows);
    let two = T::lit(2.0);
    let half_pi = T::FRAC_PI_2();
    for by in 0..rows {
        for bx in 0..cols {
            let (mut sxy, mut sdiff, mut energy) = (T::zero(), T::zero(), T::zero());
            for y in by * block_size..((by + 1) * block_size).min(img.height()) {
                for x in bx * block_size..((bx + 1) * block_size).min(img.width()) {
                    let gx = grad.fx.get(x, y);
                    let gy = grad.fy.get(x, y);
                    sxy += two * gx * gy;
                    sdiff += gx * gx - gy * gy;
                    energy += gx * gx + gy * gy;
                }
            }
            if energy > T::zero() {
                let t = sxy.atan2(sdiff) / two + half_pi;
                theta.push(wrap_axial(t));
                coherence.push((sxy.hypot(sdiff) / energy).min(T::one()));
            } else {
                theta.push(T::zero());
                coherence.push(T::zero());
            }
        }
    }
    Ok(OrientationField {
        block_size,
        cols,
        rows,
        theta,
        coherence,
    })
}

/// Maps any angle into `[0, π)`.
fn wrap_axial<T: Scalar>(t: T) -> T {
    let pi = T::PI();
    let mut w = t % pi;
    if w < T::zero() {
        w += pi;
    }
    if w >= pi {
        w = T::zero();
    }
    w
}

/// Renders one line segment per block over a dimmed copy of `background`.
pub fn render_field<T: Scalar>(field: &OrientationField<T>, background: &Raster<T>) -> Raster<u8> {
    let mut canvas = background.map(|v| (64.0 + v.as_f64().clamp(0.0, 1.0) * 150.0).round() as u8);
    let (w, h) = canvas.dims();
    let half = field.block_size as f64 * 0.4;
    for by in 0..field.rows {
        for bx in 0..field.cols {
            if field.coherence_at(bx, by) <= T::zero() {
                continue;
            }
            let cx = (bx * field.block_size) as f64 + field.block_size as f64 / 2.0;
            let cy = (by * field.block_size) as f64 + field.block_size as f64 / 2.0;
            let t = field.theta_at(bx, by).as_f64();
            let steps = (2.0 * half).ceil() as i32 * 2;
            for s in 0..=steps {
                let u = -half + 2.0 * half * s as f64 / steps as f64;
                let px = (cx + u * t.cos()).round();
                let py = (cy + u * t.sin()).round();
                if px >= 0.0 && py >= 0.0 && (px as usize) < w && (py as usize) < h {
                    canvas.set(px as usize, py as usize, 0);
                }
            }
        }
    }
    canvas
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ridges(w: usize, h: usize, angle: f64, period: f64) -> Raster<f64> {
        // Ridges run along `angle`; intensity varies along the normal.
        let (nx, ny) = (-angle.sin(), angle.cos());
        Raster::from_fn(w, h, |x, y| {
            let d = x as f64 * nx + y as f64 * ny;
            0.5 * (1.0 + (2.0 * std::f64::consts::PI * d / period).cos())
        })
    }

    #[test]
    fn vertical_ridges_give_half_pi() {
        let img = Raster::from_fn(96, 96, |x, _| {
            0.5 * (1.0 + (2.0 * std::f64::consts::PI * x as f64 / 9.0).cos())
        });
        let field = estimate_orientation(&img, 16).unwrap();
        for by in 1..field.rows - 1 {
            for bx in 1..field.cols - 1 {
                let t = field.theta_at(bx, by);
                assert!(axial_distance(t, std::f64::consts::FRAC_PI_2) < 0.02, "{t}");
            }
        }
    }

    #[test]
    fn rotated_patterns_track_angle() {
        for deg in [0.0f64, 30.0, 60.0, 90.0, 120.0, 150.0] {
            let angle = deg.to_radians();
            let img = ridges(128, 128, angle, 9.0);
            let field = estimate_orientation(&img, 16).unwrap();
            for by in 1..field.rows - 1 {
                for bx in 1..field.cols - 1 {
                    let t = field.theta_at(bx, by);
                    assert!(
                        axial_distance(t, angle) < 0.05,
                        "{deg}°: block ({bx},{by}) θ={t}"
                    );
                    assert!(field.coherence_at(bx, by) > 0.9);
                }
            }
        }
    }

    #[test]
    fn constant_image_is_flat() {
        let img = Raster::filled(40, 40, 0.3);
        let field = estimate_orientation(&img, 16).unwrap();
        assert_eq!((field.cols, field.rows), (3, 3));
        assert!(field.theta.iter().all(|&t| t == 0.0));
        assert!(field.coherence.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn negation_leaves_theta_unchanged() {
        let img = ridges(64, 64, 0.7, 8.0);
        let neg = img.map(|v| 1.0 - v);
        let a = estimate_orientation(&img, 16).unwrap();
        let b = estimate_orientation(&neg, 16).unwrap();
        for (x, y) in a.theta.iter().zip(&b.theta) {
            assert!(axial_distance(*x, *y) < 1e-12);
        }
    }

    #[test]
    fn affine_intensity_map_leaves_theta_unchanged() {
        let img = ridges(64, 64, 1.1, 10.0);
        let scaled = img.map(|v| 0.3 * v + 0.2);
        let a = estimate_orientation(&img, 16).unwrap();
        let b = estimate_orientation(&scaled, 16).unwrap();
        for (x, y) in a.theta.iter().zip(&b.theta) {
            assert!(axial_distance(*x, *y) < 1e-9);
        }
    }

    #[test]
    fn too_small_image_is_rejected() {
        assert!(estimate_orientation(&Raster::filled(8, 30, 0.0), 16).is_err());
    }
}
