//! Raster primitives shared by every pipeline stage.

mod filter;
pub mod io;
mod kernel;
pub mod morph;
mod ops;
mod raster;

pub use filter::{correlate, correlate_separable};
pub use kernel::{gaussian_kernel, gaussian_profile, Kernel2D};
pub use ops::{
    contrast_stretch, gradients, min_max, normalize_minmax, sobel_kernels, GradientPair,
};
pub use raster::{GrayImage, Raster};
