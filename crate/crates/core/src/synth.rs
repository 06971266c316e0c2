//! Synthetic ridge patterns with known singular points.
//!
//! Ridges are `½(1 + cos(2π·ψ/period))` for a phase function `ψ` chosen per pattern:
//! distance from the core for a whorl (concentric rings), a hairpin with a circular cap
//! over the core and straight legs below it for a loop, and a bumped set of horizontal
//! lines for a plain arch. Everything outside the foreground disk, which is centered in
//! the image, is flat 0.5.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::imgcore::{GrayImage, Raster};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    Whorl,
    Loop,
    PlainArch,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SynthSpec {
    pub width: usize,
    pub height: usize,
    pub pattern: Pattern,
    /// Pattern center; defaults to the image center.
    #[serde(default)]
    pub core: Option<Point2>,
    pub ridge_period: f64,
    #[serde(default)]
    pub noise_sigma: f64,
    pub foreground_radius: f64,
    #[serde(default)]
    pub seed: u64,
    /// Uniform per-seed displacement of the core in `[-jitter, jitter]` on each axis.
    #[serde(default)]
    pub core_jitter: f64,
}

impl SynthSpec {
    pub fn disk_center(&self) -> Point2 {
        Point2 {
            x: self.width as f64 / 2.0,
            y: self.height as f64 / 2.0,
        }
    }

    fn base_core(&self) -> Point2 {
        self.core.unwrap_or_else(|| self.disk_center())
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 16 || self.height < 16 {
            return Err(invalid("synthetic image must be at least 16x16"));
        }
        if self.ridge_period.is_nan() || self.ridge_period < 4.0 {
            return Err(invalid(format!(
                "ridge period {} below 4 px",
                self.ridge_period
            )));
        }
        if !(0.0..0.5).contains(&self.noise_sigma) {
            return Err(invalid(format!(
                "noise sigma {} outside [0, 0.5)",
                self.noise_sigma
            )));
        }
        if self.foreground_radius.is_nan() || self.foreground_radius <= 0.0 {
            return Err(invalid("foreground radius must be positive"));
        }
        if self.core_jitter.is_nan() || self.core_jitter < 0.0 {
            return Err(invalid("core jitter must be non-negative"));
        }
        let c = self.base_core();
        let d = self.disk_center();
        let reach = (c.x - d.x).hypot(c.y - d.y) + self.core_jitter * std::f64::consts::SQRT_2;
        if reach >= self.foreground_radius {
            return Err(invalid(
                "core (with jitter) must lie inside the foreground disk",
            ));
        }
        Ok(())
    }
}

/// Renders `spec`; returns the image and the core location (`None` for plain arches).
pub fn generate<T: Scalar>(spec: &SynthSpec) -> Result<(GrayImage<T>, Option<Point2>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let base = spec.base_core();
    let core = if spec.core_jitter > 0.0 {
        Point2 {
            x: base.x + rng.gen_range(-spec.core_jitter..=spec.core_jitter),
            y: base.y + rng.gen_range(-spec.core_jitter..=spec.core_jitter),
        }
    } else {
        base
    };
    let noise = Normal::new(0.0, spec.noise_sigma).map_err(|e| invalid(e.to_string()))?;
    let disk = spec.disk_center();
    let radius = spec.foreground_radius;
    let bump = 0.15 * radius;
    let bump_width = 0.35 * radius;
    let omega = 2.0 * std::f64::consts::PI / spec.ridge_period;
    let raster = Raster::from_fn(spec.width, spec.height, |x, y| {
        let (px, py) = (x as f64, y as f64);
        if (px - disk.x).hypot(py - disk.y) > radius {
            return T::lit(0.5);
        }
        let (dx, dy) = (px - core.x, py - core.y);
        let phase = match spec.pattern {
            Pattern::Whorl => dx.hypot(dy),
            Pattern::Loop => dx.hypot(dy.min(0.0)),
            Pattern::PlainArch => dy + bump * (-(dx * dx) / (2.0 * bump_width * bump_width)).exp(),
        };
        let mut v = 0.5 * (1.0 + (omega * phase).cos());
        if spec.noise_sigma > 0.0 {
            v += noise.sample(&mut rng);
        }
        T::lit(v.clamp(0.0, 1.0))
    });
    let truth = match spec.pattern {
        Pattern::PlainArch => None,
        _ => Some(core),
    };
    Ok((GrayImage::new(raster)?, truth))
}

/// Rows kept below the core by the half-crop convention.
pub const HALF_CROP_MARGIN: usize = 32;

/// Keeps rows `0..=core_y + margin`, cutting away the foreground below the core.
pub fn crop_below<T: Scalar>(
    img: &GrayImage<T>,
    core_y: f64,
    margin: usize,
) -> Result<GrayImage<T>> {
    let keep = ((core_y.round().max(0.0) as usize) + margin + 1).min(img.height());
    GrayImage::new(img.crop(0, 0, img.width(), keep)?)
}

/// Spec used by the test suites and the CLI examples: a 300x300 print with a 120 px disk.
pub fn reference_spec(pattern: Pattern, seed: u64, noise_sigma: f64) -> SynthSpec {
    SynthSpec {
        width: 300,
        height: 300,
        pattern,
        core: None,
        ridge_period: 9.0,
        noise_sigma,
        foreground_radius: 120.0,
        seed,
        core_jitter: if pattern == Pattern::PlainArch {
            0.0
        } else {
            20.0
        },
    }
}
