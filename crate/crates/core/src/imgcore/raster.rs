use std::ops::Deref;

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Row-major 2-D raster of arbitrary pixel values.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster<P> {
    width: usize,
    height: usize,
    data: Vec<P>,
}

impl<P: Copy> Raster<P> {
    pub fn from_vec(width: usize, height: usize, data: Vec<P>) -> Result<Self> {
        if data.len() != width * height {
            return Err(invalid(format!(
                "raster data length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: P) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> P) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[P] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [P] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<P> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> P {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: P) {
        self.data[y * self.width + x] = value;
    }

    /// Pixel lookup with replicated-edge extension outside the raster.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> P {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.data[cy * self.width + cx]
    }

    pub fn row(&self, y: usize) -> &[P] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn map<Q: Copy>(&self, f: impl Fn(P) -> Q) -> Raster<Q> {
        Raster {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&p| f(p)).collect(),
        }
    }

    pub fn zip_map<Q: Copy, R: Copy>(
        &self,
        other: &Raster<Q>,
        f: impl Fn(P, Q) -> R,
    ) -> Result<Raster<R>> {
        if self.dims() != other.dims() {
            return Err(invalid(format!(
                "raster dimensions differ: {:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        Ok(Raster {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn transpose(&self) -> Self {
        Raster::from_fn(self.height, self.width, |x, y| self.get(y, x))
    }

    /// Sub-rectangle copy; the rectangle must lie inside the raster.
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<Self> {
        if x0 + width > self.width || y0 + height > self.height {
            return Err(invalid("crop rectangle exceeds raster bounds"));
        }
        Ok(Raster::from_fn(width, height, |x, y| {
            self.get(x0 + x, y0 + y)
        }))
    }
}

/// Grayscale image with every sample finite and inside `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage<T = f64>(Raster<T>);

impl<T: Scalar> GrayImage<T> {
    /// Wraps a raster, rejecting samples that are non-finite or outside `[0, 1]`.
    pub fn new(raster: Raster<T>) -> Result<Self> {
        if let Some(bad) = raster
            .data()
            .iter()
            .find(|v| !v.is_finite() || **v < T::zero() || **v > T::one())
        {
            return Err(invalid(format!("gray sample {bad} outside [0, 1]")));
        }
        Ok(Self(raster))
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        Self::new(Raster::from_vec(width, height, data)?)
    }

    /// Clamps into `[0, 1]`; non-finite samples become 0.
    pub fn from_raster_clamped(raster: Raster<T>) -> Self {
        Self(raster.map(|v| {
            if v.is_finite() {
                v.max(T::zero()).min(T::one())
            } else {
                T::zero()
            }
        }))
    }

    /// 8-bit samples divided by 255.
    pub fn from_u8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        let scale = T::lit(255.0);
        let data = bytes.iter().map(|&b| T::lit(b as f64) / scale).collect();
        Ok(Self(Raster::from_vec(width, height, data)?))
    }

    pub fn to_u8(&self) -> Vec<u8> {
        self.0
            .data()
            .iter()
            .map(|v| (v.as_f64() * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect()
    }

    pub fn as_raster(&self) -> &Raster<T> {
        &self.0
    }

    pub fn into_raster(self) -> Raster<T> {
        self.0
    }

    pub fn cast<U: Scalar>(&self) -> GrayImage<U> {
        GrayImage(self.0.map(|v| U::lit(v.as_f64())))
    }
}

impl<T> Deref for GrayImage<T> {
    type Target = Raster<T>;

    fn deref(&self) -> &Raster<T> {
        &self.0
    }
}
