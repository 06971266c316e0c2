//! Partial fingerprint detection from the core point location.
//!
//! The pipeline segments the print, enhances ridges with orientation-steered Gabor filters,
//! locates the core as the peak of the block variance of a first-order complex filter
//! response, and measures how far the foreground extends from the core along the four
//! axis directions. A capture whose shortest axis run is at most `T` times the longest is
//! flagged as partial.
//!
//! Stages:
//!
//! - [`imgcore`] – rasters, kernels, correlation, gradients, normalization, PGM I/O.
//! - [`segmentation`] – block-variance foreground mask.
//! - [`orientation`] – averaged squared-gradient orientation field.
//! - [`enhancement`] – Gabor filtering and local-mean binarization.
//! - [`corepoint`] – complex filtering, variance image, core search.
//! - [`partiality`] – axis counts and the partial verdict.
//! - [`pipeline`] – configuration and the end-to-end run.
//! - [`eval`] – labeled batch evaluation and confusion-matrix rates.
//! - [`synth`] – synthetic prints with known cores.
//!
//! All numeric stages are generic over [`Scalar`] (`f32` or `f64`); the aliases below fix
//! the common choices.

pub mod corepoint;
pub mod enhancement;
pub mod error;
pub mod eval;
pub mod imgcore;
pub mod orientation;
pub mod partiality;
pub mod pipeline;
pub mod scalar;
pub mod segmentation;
pub mod synth;

pub use error::{Error, Result};
pub use pipeline::{analyze, detect, detect_file, DetectionRecord, PipelineConfig};
pub use scalar::Scalar;

/// Double-precision gray image.
pub type GrayImage64 = imgcore::GrayImage<f64>;
/// Single-precision gray image.
pub type GrayImage32 = imgcore::GrayImage<f32>;
/// Double-precision complex raster (filter responses).
pub type ComplexRaster64 = imgcore::Raster<num_complex::Complex<f64>>;
/// Double-precision pipeline analysis.
pub type Analysis64 = pipeline::Analysis<f64>;
/// Single-precision pipeline analysis.
pub type Analysis32 = pipeline::Analysis<f32>;
