//! End-to-end detection: segmentation, enhancement, core search and the partial verdict.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::corepoint::{
    complex_filter_kernel, filter_response, locate_core, tensor_field, variance_image, window_taps,
    CoreDetection, CoreSearch, SingularPeak, TensorMode, VarianceImage,
};
use crate::enhancement::{binarize, binary_to_gray, gabor_enhance, GaborParams};
use crate::error::{invalid, Error, Result};
use crate::imgcore::{
    contrast_stretch, gradients, io, normalize_minmax, GradientPair, GrayImage, Raster,
};
use crate::orientation::{estimate_orientation, render_field, OrientationField};
use crate::partiality::{axis_counts, classify, AxisCounts, NormalizedCounts, PartialityResult};
use crate::scalar::Scalar;
use crate::segmentation::{segment, BinaryImage, SegmentationMask};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientBlocks {
    /// Block size for the field that steers the Gabor filters.
    pub coarse: usize,
    /// Block size for the field re-estimated from the binary image.
    pub fine: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PipelineConfig {
    /// Complex filter window `W`; variance blocks are `W/4`.
    pub window: usize,
    pub sigma_filter: f64,
    pub gabor: GaborParams,
    pub seg_block: usize,
    pub binarize_block: usize,
    pub orient_blocks: OrientBlocks,
    /// Partiality threshold `T`.
    pub threshold: f64,
    /// Minimum peak-to-mean block variance ratio for a core to count as found.
    pub min_response: f64,
    pub core_margin_blocks: usize,
    pub tensor_mode: TensorMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            window: 32,
            sigma_filter: 8.0,
            gabor: GaborParams::default(),
            seg_block: 16,
            binarize_block: 16,
            orient_blocks: OrientBlocks {
                coarse: 16,
                fine: 8,
            },
            threshold: crate::partiality::DEFAULT_THRESHOLD,
            min_response: 15.0,
            core_margin_blocks: 3,
            tensor_mode: TensorMode::Magnitude,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 4 {
            return Err(invalid(format!(
                "filter window {} must be at least 4",
                self.window
            )));
        }
        if self.sigma_filter.is_nan() || self.sigma_filter <= 0.0 {
            return Err(invalid("sigmaFilter must be positive"));
        }
        self.gabor.validate()?;
        if self.seg_block == 0
            || self.binarize_block == 0
            || self.orient_blocks.coarse == 0
            || self.orient_blocks.fine == 0
        {
            return Err(invalid("block sizes must be positive"));
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(invalid(format!(
                "threshold {} outside (0, 1]",
                self.threshold
            )));
        }
        if self.min_response.is_nan() || self.min_response <= 0.0 {
            return Err(invalid("minResponse must be positive"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Pretty JSON, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn core_search(&self) -> CoreSearch {
        CoreSearch {
            min_response: self.min_response,
            margin_blocks: self.core_margin_blocks,
        }
    }
}

/// Every intermediate raster of one run.
#[derive(Clone, Debug)]
pub struct Analysis<T> {
    pub mask: SegmentationMask,
    pub stretched: GrayImage<T>,
    pub coarse_field: OrientationField<T>,
    pub enhanced: GrayImage<T>,
    pub binary: BinaryImage,
    pub fine_field: OrientationField<T>,
    pub gradients: GradientPair<T>,
    pub response: Raster<Complex<T>>,
    pub variance: VarianceImage<T>,
    pub detection: CoreDetection,
    pub verdict: Verdict,
}

/// Outcome of the partiality stage; anything but `Classified` is reported as partial.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Classified(PartialityResult),
    NoCore,
    DegenerateCore,
}

/// Runs every stage and keeps the intermediates.
pub fn analyze<T: Scalar>(img: &GrayImage<T>, cfg: &PipelineConfig) -> Result<Analysis<T>> {
    cfg.validate()?;
    let mask = segment(img, cfg.seg_block)?;
    let stretched = contrast_stretch(img)?;
    let coarse_field = estimate_orientation(stretched.as_raster(), cfg.orient_blocks.coarse)?;
    let enhanced = gabor_enhance(&stretched, &coarse_field, &cfg.gabor)?;
    let binary = binarize(enhanced.as_raster(), cfg.binarize_block);
    let fine_field = estimate_orientation(
        binary_to_gray::<T>(&binary).as_raster(),
        cfg.orient_blocks.fine,
    )?;

    let grads = gradients(enhanced.as_raster())?;
    let field = tensor_field(&grads)?;
    let taps = window_taps(cfg.window);
    let sigma = T::lit(cfg.sigma_filter);
    let core_kernel = complex_filter_kernel(1, sigma, taps)?;
    let delta_kernel = complex_filter_kernel(-1, sigma, taps)?;
    let response = filter_response(&field, &core_kernel, cfg.tensor_mode)?;
    let delta_response = filter_response(&field, &delta_kernel, cfg.tensor_mode)?;
    let variance = variance_image(&response, cfg.window)?;
    let delta_variance = variance_image(&delta_response, cfg.window)?;
    let search = cfg.core_search();
    let detection = CoreDetection {
        core: locate_core(&variance, &mask, search)?,
        delta: locate_core(&delta_variance, &mask, search)?,
    };

    let verdict = match (&detection.core, detection.core.location) {
        (SingularPeak { found: true, .. }, Some(loc)) => {
            match classify(axis_counts(&mask, loc)?, cfg.threshold) {
                Ok(r) => Verdict::Classified(r),
                Err(Error::DegenerateCore) => Verdict::DegenerateCore,
                Err(e) => return Err(e),
            }
        }
        _ => Verdict::NoCore,
    };

    Ok(Analysis {
        mask,
        stretched,
        coarse_field,
        enhanced,
        binary,
        fine_field,
        gradients: grads,
        response,
        variance,
        detection,
        verdict,
    })
}

impl<T: Scalar> Analysis<T> {
    /// 8-bit renderings of every stage, named for file output.
    ///
    /// Signed and unbounded stages (gradients, |R|, variance) are min-max stretched. The core
    /// overlay draws the counted axis runs in white and marks the core with a black square.
    pub fn intermediates(&self) -> Result<Vec<(&'static str, Raster<u8>)>> {
        let to_u8 = |img: &GrayImage<T>| Raster::from_vec(img.width(), img.height(), img.to_u8());
        let stretch = |r: &Raster<T>| -> Result<Raster<u8>> { to_u8(&normalize_minmax(r)?) };
        let magnitude = self.response.map(|c| c.norm());
        let mut out = vec![
            (
                "mask",
                Raster::from_vec(self.mask.width(), self.mask.height(), self.mask.to_u8())?,
            ),
            ("stretched", to_u8(&self.stretched)?),
            ("gabor", to_u8(&self.enhanced)?),
            ("binary", self.binary.map(|b| if b { 255 } else { 0 })),
            (
                "orientation",
                render_field(&self.fine_field, self.stretched.as_raster()),
            ),
            ("gradient_x", stretch(&self.gradients.fx)?),
            ("gradient_y", stretch(&self.gradients.fy)?),
            ("response_magnitude", stretch(&magnitude)?),
            ("variance", stretch(&self.variance.upsample())?),
        ];
        out.push(("core_overlay", self.core_overlay()));
        Ok(out)
    }

    fn core_overlay(&self) -> Raster<u8> {
        let mut canvas = self
            .stretched
            .map(|v| (v.as_f64().clamp(0.0, 1.0) * 160.0).round() as u8);
        let Some((cx, cy)) = self.detection.core.location else {
            return canvas;
        };
        if let Verdict::Classified(r) = &self.verdict {
            let c = r.counts;
            for x in (cx + 1 - c.left.max(1))..(cx + c.right.max(1)) {
                canvas.set(x, cy, 255);
            }
            for y in (cy + 1 - c.up.max(1))..(cy + c.down.max(1)) {
                canvas.set(cx, y, 255);
            }
        }
        let (w, h) = canvas.dims();
        for y in cy.saturating_sub(3)..(cy + 4).min(h) {
            for x in cx.saturating_sub(3)..(cx + 4).min(w) {
                canvas.set(x, y, 0);
            }
        }
        canvas
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoreRecord {
    pub x: Option<usize>,
    pub y: Option<usize>,
    pub found: bool,
    #[serde(rename = "relativeResponse")]
    pub relative_response: f64,
}

/// Serialized outcome for one image.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DetectionRecord {
    pub file: String,
    pub core: CoreRecord,
    pub counts: AxisCounts,
    pub normalized: NormalizedCounts,
    pub min_ratio: f64,
    pub threshold: f64,
    pub partial: bool,
    pub diagnostic: Option<String>,
}

impl DetectionRecord {
    fn failed(file: &str, threshold: f64, core: CoreRecord, diagnostic: String) -> Self {
        Self {
            file: file.to_string(),
            core,
            counts: AxisCounts::default(),
            normalized: NormalizedCounts::default(),
            min_ratio: 0.0,
            threshold,
            partial: true,
            diagnostic: Some(diagnostic),
        }
    }

    /// Verdict at another threshold; records with a diagnostic stay partial.
    pub fn partial_at(&self, threshold: f64) -> bool {
        self.diagnostic.is_some() || self.min_ratio <= threshold
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("record serializes");
        s.push('\n');
        s
    }
}

impl<T: Scalar> Analysis<T> {
    pub fn record(&self, file: &str, threshold: f64) -> DetectionRecord {
        let peak = &self.detection.core;
        let core = CoreRecord {
            x: peak.location.map(|l| l.0),
            y: peak.location.map(|l| l.1),
            found: peak.found,
            relative_response: peak.relative_response,
        };
        match &self.verdict {
            Verdict::Classified(r) => DetectionRecord {
                file: file.to_string(),
                core,
                counts: r.counts,
                normalized: r.normalized,
                min_ratio: r.min_ratio,
                threshold: r.threshold,
                partial: r.is_partial,
                diagnostic: None,
            },
            Verdict::NoCore => DetectionRecord::failed(file, threshold, core, "no-core".into()),
            Verdict::DegenerateCore => {
                DetectionRecord::failed(file, threshold, core, "degenerate-core".into())
            }
        }
    }
}

/// Partial record for an image the pipeline could not process.
pub fn failure_record(file: &str, threshold: f64, err: &Error) -> DetectionRecord {
    let core = CoreRecord {
        x: None,
        y: None,
        found: false,
        relative_response: 0.0,
    };
    let diagnostic = match err {
        Error::NoForeground => "no-foreground".to_string(),
        other => format!("error: {other}"),
    };
    DetectionRecord::failed(file, threshold, core, diagnostic)
}

/// Runs the pipeline; failures become partial records carrying a diagnostic.
pub fn detect<T: Scalar>(img: &GrayImage<T>, cfg: &PipelineConfig, file: &str) -> DetectionRecord {
    match analyze(img, cfg) {
        Ok(a) => a.record(file, cfg.threshold),
        Err(e) => failure_record(file, cfg.threshold, &e),
    }
}

/// Loads and runs; decode failures surface as errors, pipeline failures as diagnostics.
pub fn detect_file(path: &Path, cfg: &PipelineConfig) -> Result<DetectionRecord> {
    let img = io::load_gray::<f64>(path)?;
    Ok(detect(&img, cfg, &path.display().to_string()))
}
