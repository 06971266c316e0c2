use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Square kernel with an odd span; taps are addressed by signed offsets from the center.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel2D<K> {
    size: usize,
    taps: Vec<K>,
}

impl<K: Copy> Kernel2D<K> {
    /// Builds a kernel by evaluating `f(dx, dy)` for every offset in `-r..=r`.
    pub fn from_fn(size: usize, mut f: impl FnMut(isize, isize) -> K) -> Result<Self> {
        check_size(size)?;
        let r = (size / 2) as isize;
        let mut taps = Vec::with_capacity(size * size);
        for dy in -r..=r {
            for dx in -r..=r {
                taps.push(f(dx, dy));
            }
        }
        Ok(Self { size, taps })
    }

    pub fn from_vec(size: usize, taps: Vec<K>) -> Result<Self> {
        check_size(size)?;
        if taps.len() != size * size {
            return Err(invalid(format!(
                "kernel of size {size} needs {} taps, got {}",
                size * size,
                taps.len()
            )));
        }
        Ok(Self { size, taps })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn radius(&self) -> isize {
        (self.size / 2) as isize
    }

    /// Tap at offset `(dx, dy)` from the center.
    #[inline]
    pub fn tap(&self, dx: isize, dy: isize) -> K {
        let r = self.radius();
        self.taps[((dy + r) as usize) * self.size + (dx + r) as usize]
    }

    pub fn taps(&self) -> &[K] {
        &self.taps
    }

    pub fn map<Q: Copy>(&self, f: impl Fn(K) -> Q) -> Kernel2D<Q> {
        Kernel2D {
            size: self.size,
            taps: self.taps.iter().map(|&k| f(k)).collect(),
        }
    }
}

fn check_size(size: usize) -> Result<()> {
    if size < 3 || size.is_multiple_of(2) {
        return Err(invalid(format!(
            "kernel size must be odd and >= 3, got {size}"
        )));
    }
    Ok(())
}

/// One-dimensional Gaussian profile `exp(-t²/2σ²)` sampled at `-r..=r`, unnormalized.
pub fn gaussian_profile<T: Scalar>(sigma: T, size: usize) -> Result<Vec<T>> {
    if !sigma.is_finite() || sigma <= T::zero() {
        return Err(invalid(format!(
            "gaussian sigma must be positive, got {sigma}"
        )));
    }
    check_size(size)?;
    let r = (size / 2) as isize;
    let denom = T::lit(2.0) * sigma * sigma;
    Ok((-r..=r)
        .map(|t| {
            let t = T::lit(t as f64);
            (-(t * t) / denom).exp()
        })
        .collect())
}

/// Isotropic Gaussian window `g(x, y) = exp(-(x² + y²) / 2σ²)`; center tap is exactly 1.
pub fn gaussian_kernel<T: Scalar>(sigma: T, size: usize) -> Result<Kernel2D<T>> {
    if !sigma.is_finite() || sigma <= T::zero() {
        return Err(invalid(format!(
            "gaussian sigma must be positive, got {sigma}"
        )));
    }
    // Radial form rather than a product of 1-D factors keeps taps exactly dihedral-symmetric.
    let denom = T::lit(2.0) * sigma * sigma;
    Kernel2D::from_fn(size, |dx, dy| {
        let d2 = T::lit((dx * dx + dy * dy) as f64);
        (-d2 / denom).exp()
    })
}
