use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use partialfp::eval::{evaluate, load_labels, Metrics};
use partialfp::imgcore::io;
use partialfp::pipeline::failure_record;
use partialfp::synth::{crop_below, generate, SynthSpec, HALF_CROP_MARGIN};
use partialfp::{analyze, GrayImage64, PipelineConfig};

/// Partial fingerprint detection from core point location.
#[derive(Parser, Debug)]
#[command(name = "partialfp", version, about)]
struct Cli {
    /// Pipeline configuration file (JSON); defaults are used when absent.
    #[arg(long, global = true, env = "PARTIALFP_CONFIG")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify one image. Exit 0 = full capture, 2 = partial, 1 = error.
    Detect {
        image: PathBuf,
        /// Write every intermediate stage as PGM into this directory.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Partiality threshold T in (0, 1].
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Run a labeled dataset and print sensitivity, specificity and accuracy.
    Evaluate {
        root: PathBuf,
        labels: PathBuf,
        /// Write the full JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Re-threshold the results over LO:HI:STEP.
        #[arg(long, value_name = "LO:HI:STEP")]
        threshold_sweep: Option<String>,
        /// Write per-sample rows as CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generate synthetic prints with ground-truth sidecars and a labels CSV.
    Synth {
        spec: PathBuf,
        outdir: PathBuf,
        /// Number of prints; seeds run from the spec seed upward.
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Also write a copy cut off just below the core, labeled partial.
        #[arg(long, value_enum, default_value_t = Crop::None)]
        crop: Crop,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Crop {
    Half,
    None,
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => {
            PipelineConfig::load(p).with_context(|| format!("loading config {}", p.display()))
        }
        None => Ok(PipelineConfig::default()),
    }
}

fn cmd_detect(cfg: PipelineConfig, image: &Path, dump: Option<&Path>) -> Result<bool> {
    let img: GrayImage64 = io::load_gray(image)?;
    let file = image.display().to_string();
    let record = match analyze(&img, &cfg) {
        Ok(analysis) => {
            if let Some(dir) = dump {
                for (name, raster) in analysis.intermediates()? {
                    let path = dir.join(format!("{name}.pgm"));
                    io::save_pgm_u8(&path, raster.width(), raster.height(), raster.data())?;
                }
            }
            analysis.record(&file, cfg.threshold)
        }
        Err(e) => failure_record(&file, cfg.threshold, &e),
    };
    print!("{}", record.to_json());
    Ok(record.partial)
}

fn parse_sweep(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("threshold sweep {text:?} must be LO:HI:STEP"))?;
    let [lo, hi, step] = parts[..] else {
        bail!("threshold sweep {text:?} must be LO:HI:STEP");
    };
    ensure!(
        step > 0.0 && lo <= hi,
        "threshold sweep needs LO <= HI and STEP > 0"
    );
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

fn table_row(label: &str, m: &Metrics) -> String {
    format!("{label:<24} {m}")
}

fn cmd_evaluate(
    cfg: PipelineConfig,
    root: &Path,
    labels: &Path,
    report_path: Option<&Path>,
    jobs: Option<usize>,
    sweep: Option<&str>,
    csv: Option<&Path>,
) -> Result<()> {
    let thresholds = sweep.map(parse_sweep).transpose()?;
    let samples = load_labels(labels, root)?;
    let mut report = evaluate(&samples, &cfg, jobs)?;
    if let Some(t) = &thresholds {
        report = report.with_sweep(t);
    }

    let cm = report.matrix;
    println!("{:<24} {:>12} {:>12}", "", "pred partial", "pred full");
    println!("{:<24} {:>12} {:>12}", "true partial", cm.tp, cm.fn_);
    println!("{:<24} {:>12} {:>12}", "true full", cm.fp, cm.tn);
    println!();
    println!(
        "{:<24} {:>12} {:>12} {:>12}",
        "Database", "Sensitivity", "Specificity", "Accuracy"
    );
    let name = root.file_name().map_or_else(
        || root.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    );
    println!("{}", table_row(&name, &report.metrics));
    if let Some(rows) = &report.sweep {
        println!();
        for row in rows {
            println!(
                "{}",
                table_row(&format!("T = {:.3}", row.threshold), &row.metrics)
            );
        }
    }

    if let Some(p) = report_path {
        write_file(p, report.to_json().as_bytes())?;
    }
    if let Some(p) = csv {
        write_file(p, report.samples_csv().as_bytes())?;
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn cmd_synth(spec_path: &Path, outdir: &Path, count: u64, crop: Crop) -> Result<()> {
    let text = fs::read_to_string(spec_path)
        .with_context(|| format!("reading {}", spec_path.display()))?;
    let base: SynthSpec =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", spec_path.display()))?;
    base.validate()?;
    fs::create_dir_all(outdir).with_context(|| format!("creating {}", outdir.display()))?;

    let mut labels = String::from("filename,partial\n");
    for i in 0..count {
        let spec = SynthSpec {
            seed: base.seed + i,
            ..base.clone()
        };
        let (img, core) = generate::<f64>(&spec)?;
        let stem = format!("synth_{i:04}");
        let mut variants = vec![(format!("{stem}.pgm"), img.clone(), false)];
        if crop == Crop::Half {
            let cut_y = core.unwrap_or_else(|| spec.disk_center()).y;
            variants.push((
                format!("{stem}_half.pgm"),
                crop_below(&img, cut_y, HALF_CROP_MARGIN)?,
                true,
            ));
        }
        for (file, image, partial) in variants {
            io::save_pgm(&outdir.join(&file), &image)?;
            let sidecar = serde_json::json!({
                "file": file,
                "spec": spec,
                "core": core,
                "width": image.width(),
                "height": image.height(),
                "partial": partial,
            });
            let mut json = serde_json::to_string_pretty(&sidecar)?;
            json.push('\n');
            write_file(&outdir.join(file.replace(".pgm", ".json")), json.as_bytes())?;
            labels.push_str(&format!("{file},{}\n", u8::from(partial)));
        }
    }
    write_file(&outdir.join("labels.csv"), labels.as_bytes())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Detect {
            image,
            dump,
            threshold,
        } => {
            if let Some(t) = threshold {
                cfg.threshold = t;
                cfg.validate()?;
            }
            let partial = cmd_detect(cfg, &image, dump.as_deref())?;
            Ok(ExitCode::from(if partial { 2 } else { 0 }))
        }
        Command::Evaluate {
            root,
            labels,
            report,
            jobs,
            threshold_sweep,
            csv,
        } => {
            cmd_evaluate(
                cfg,
                &root,
                &labels,
                report.as_deref(),
                jobs,
                threshold_sweep.as_deref(),
                csv.as_deref(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth {
            spec,
            outdir,
            count,
            crop,
        } => {
            cmd_synth(&spec, &outdir, count, crop)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parses_inclusive_grid() {
        let t = parse_sweep("0.4:0.8:0.1").unwrap();
        assert_eq!(t.len(), 5);
        assert!((t[4] - 0.8).abs() < 1e-12);
        assert!(parse_sweep("0.4:0.8").is_err());
        assert!(parse_sweep("0.8:0.4:0.1").is_err());
        assert!(parse_sweep("a:b:c").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
