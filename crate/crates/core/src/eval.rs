//! Labeled-dataset evaluation: batch detection, confusion matrix and rates.
//!
//! The positive class is "partial".

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::imgcore::io;
use crate::pipeline::{detect_file, failure_record, DetectionRecord, PipelineConfig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledSample {
    pub image_path: PathBuf,
    pub is_partial: bool,
}

/// Reads `filename,partial` rows (partial ∈ {0, 1}) resolved against `image_root`.
///
/// An optional `filename,partial` header is skipped. Every malformed row and every image
/// that is missing or fails to decode is collected into one [`Error::Ingestion`].
pub fn load_labels(csv_path: &Path, image_root: &Path) -> Result<Vec<LabeledSample>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(csv_path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io {
                path: csv_path.to_path_buf(),
                source,
            },
            other => Error::Ingestion(vec![format!("{}: {other:?}", csv_path.display())]),
        })?;
    let mut samples = Vec::new();
    let mut problems = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 1;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                problems.push(format!("row {line}: {e}"));
                continue;
            }
        };
        if row.iter().all(|f| f.is_empty()) {
            continue;
        }
        if line == 1 && row.get(0) == Some("filename") {
            continue;
        }
        if row.len() != 2 {
            problems.push(format!("row {line}: expected 2 fields, got {}", row.len()));
            continue;
        }
        let is_partial = match &row[1] {
            "0" => false,
            "1" => true,
            other => {
                problems.push(format!(
                    "row {line}: partial flag must be 0 or 1, got {other:?}"
                ));
                continue;
            }
        };
        let image_path = image_root.join(&row[0]);
        match std::fs::read(&image_path) {
            Err(e) => problems.push(format!("row {line}: {}: {e}", image_path.display())),
            Ok(bytes) => {
                if let Err(e) = io::decode_gray::<f32>(&bytes) {
                    problems.push(format!("row {line}: {}: {e}", image_path.display()));
                }
            }
        }
        samples.push(LabeledSample {
            image_path,
            is_partial,
        });
    }
    if !problems.is_empty() {
        return Err(Error::Ingestion(problems));
    }
    Ok(samples)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn record(&mut self, truth_partial: bool, predicted_partial: bool) {
        match (truth_partial, predicted_partial) {
            (true, true) => self.tp += 1,
            (true, false) => self.fn_ += 1,
            (false, true) => self.fp += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Same counts with the positive and negative classes exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            tp: self.tn,
            fp: self.fn_,
            tn: self.tp,
            fn_: self.fp,
        }
    }
}

/// Rates in `[0, 1]`; `None` where the denominator is zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Metrics {
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub accuracy: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Sensitivity TP/(TP+FN), specificity TN/(TN+FP), accuracy (TP+TN)/total.
pub fn metrics(cm: &ConfusionMatrix) -> Metrics {
    Metrics {
        sensitivity: ratio(cm.tp, cm.tp + cm.fn_),
        specificity: ratio(cm.tn, cm.tn + cm.fp),
        accuracy: ratio(cm.tp + cm.tn, cm.total()),
    }
}

impl fmt::Display for Metrics {
    /// One table row: sensitivity, specificity, accuracy as percentages.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cell = |v: Option<f64>| {
            v.map_or_else(|| "undefined".to_string(), |v| format!("{:.1}%", v * 100.0))
        };
        write!(
            f,
            "{:>12} {:>12} {:>12}",
            cell(self.sensitivity),
            cell(self.specificity),
            cell(self.accuracy)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub truth: bool,
    #[serde(flatten)]
    pub detection: DetectionRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub threshold: f64,
    pub matrix: ConfusionMatrix,
    pub metrics: Metrics,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub config: PipelineConfig,
    pub matrix: ConfusionMatrix,
    pub metrics: Metrics,
    pub samples: Vec<SampleRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepRow>>,
}

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Confusion matrix of the stored records re-thresholded at `threshold`.
    pub fn matrix_at(&self, threshold: f64) -> ConfusionMatrix {
        let mut cm = ConfusionMatrix::default();
        for s in &self.samples {
            cm.record(s.truth, s.detection.partial_at(threshold));
        }
        cm
    }

    pub fn with_sweep(mut self, thresholds: &[f64]) -> Self {
        self.sweep = Some(
            thresholds
                .iter()
                .map(|&t| {
                    let matrix = self.matrix_at(t);
                    SweepRow {
                        threshold: t,
                        matrix,
                        metrics: metrics(&matrix),
                    }
                })
                .collect(),
        );
        self
    }

    /// Per-sample rows: file, truth, predicted, core, min ratio, diagnostic.
    pub fn samples_csv(&self) -> String {
        let mut out =
            String::from("file,truth,predicted,core_x,core_y,core_found,min_ratio,diagnostic\n");
        let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
        for s in &self.samples {
            let d = &s.detection;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                d.file,
                s.truth as u8,
                d.partial as u8,
                opt(d.core.x),
                opt(d.core.y),
                d.core.found,
                d.min_ratio,
                d.diagnostic.as_deref().unwrap_or("")
            ));
        }
        out
    }
}

/// Runs the pipeline over every sample and tallies the confusion matrix.
///
/// Samples run in parallel on `jobs` threads (all cores when `None`). Records keep input
/// order; unreadable images and pipeline failures become partial records with a diagnostic.
pub fn evaluate(
    samples: &[LabeledSample],
    cfg: &PipelineConfig,
    jobs: Option<usize>,
) -> Result<EvaluationReport> {
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    cfg.validate()?;
    let run_one = |s: &LabeledSample| {
        let detection = detect_file(&s.image_path, cfg).unwrap_or_else(|e| {
            failure_record(&s.image_path.display().to_string(), cfg.threshold, &e)
        });
        SampleRecord {
            truth: s.is_partial,
            detection,
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let records: Vec<SampleRecord> = pool.install(|| samples.par_iter().map(run_one).collect());
    let mut matrix = ConfusionMatrix::default();
    for r in &records {
        matrix.record(r.truth, r.detection.partial);
    }
    Ok(EvaluationReport {
        config: cfg.clone(),
        matrix,
        metrics: metrics(&matrix),
        samples: records,
        sweep: None,
    })
}
