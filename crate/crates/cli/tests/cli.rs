use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn partialfp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_partialfp"))
        .args(args)
        .env_remove("PARTIALFP_CONFIG")
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_spec(dir: &Path, pattern: &str) -> std::path::PathBuf {
    let spec = dir.join(format!("{pattern}.json"));
    let body = format!(
        r#"{{"width": 300, "height": 300, "pattern": "{pattern}", "ridgePeriod": 9.0, "noiseSigma": 0.02,
            "foregroundRadius": 120.0, "seed": 40, "coreJitter": 20.0}}"#
    );
    fs::write(&spec, body).unwrap();
    spec
}

/// Generates `count` whorls plus their half crops into `dir/out`.
fn synth_suite(dir: &Path, count: u32) -> std::path::PathBuf {
    let spec = write_spec(dir, "whorl");
    let out = dir.join("out");
    let o = partialfp(&[
        "synth",
        p(&spec),
        p(&out),
        "--count",
        &count.to_string(),
        "--crop",
        "half",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn synth_writes_images_sidecars_and_labels() {
    let dir = tempfile::tempdir().unwrap();
    let out = synth_suite(dir.path(), 2);
    let labels = fs::read_to_string(out.join("labels.csv")).unwrap();
    assert_eq!(
        labels,
        "filename,partial\nsynth_0000.pgm,0\nsynth_0000_half.pgm,1\nsynth_0001.pgm,0\nsynth_0001_half.pgm,1\n"
    );
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("synth_0001.json")).unwrap()).unwrap();
    assert!(sidecar["core"]["x"].is_number() && sidecar["core"]["y"].is_number());
    assert_eq!(sidecar["spec"]["seed"], 41);
    assert_eq!(sidecar["partial"], false);
    let half: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("synth_0000_half.json")).unwrap())
            .unwrap();
    assert_eq!(half["partial"], true);
    assert!(half["height"].as_u64().unwrap() < 300);
}

#[test]
fn synth_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let out_a = synth_suite(a.path(), 3);
    let out_b = synth_suite(b.path(), 3);
    for i in 0..3 {
        for ext in ["pgm", "json"] {
            let name = format!("synth_{i:04}.{ext}");
            assert_eq!(
                fs::read(out_a.join(&name)).unwrap(),
                fs::read(out_b.join(&name)).unwrap(),
                "{name}"
            );
        }
    }
}

#[test]
fn synth_rejects_invalid_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    fs::write(&spec, r#"{"width": 300, "bogus": 1}"#).unwrap();
    let o = partialfp(&["synth", p(&spec), p(&dir.path().join("out"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn detect_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = synth_suite(dir.path(), 1);

    let full = partialfp(&["detect", p(&out.join("synth_0000.pgm"))]);
    assert_eq!(
        full.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&full.stderr)
    );
    let stdout = String::from_utf8(full.stdout).unwrap();
    assert!(stdout.ends_with('\n'));
    let rec: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(rec["partial"], false);
    assert_eq!(rec["core"]["found"], true);

    let half = partialfp(&["detect", p(&out.join("synth_0000_half.pgm"))]);
    assert_eq!(half.status.code(), Some(2));
    let rec: serde_json::Value = serde_json::from_slice(&half.stdout).unwrap();
    assert_eq!(rec["partial"], true);

    let missing = partialfp(&["detect", p(&dir.path().join("nope.pgm"))]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(!missing.stderr.is_empty());
}

#[test]
fn detect_threshold_flag_and_config_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = synth_suite(dir.path(), 1);
    let img = out.join("synth_0000.pgm");

    // T = 1 flags every classified capture.
    let o = partialfp(&["detect", p(&img), "--threshold", "1.0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = partialfp(&["detect", p(&img), "--threshold", "1.5"]);
    assert_eq!(o.status.code(), Some(1));

    let cfg = dir.path().join("cfg.json");
    let text = partialfp_config_with_threshold(1.0);
    fs::write(&cfg, text).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_partialfp"))
        .args(["detect", p(&img)])
        .env("PARTIALFP_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    fs::write(&cfg, r#"{"window": 32, "unknownKey": true}"#).unwrap();
    let o = partialfp(&["--config", p(&cfg), "detect", p(&img)]);
    assert_eq!(o.status.code(), Some(1));
}

fn partialfp_config_with_threshold(t: f64) -> String {
    partialfp::PipelineConfig {
        threshold: t,
        ..Default::default()
    }
    .to_json()
}

#[test]
fn detect_dump_writes_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let out = synth_suite(dir.path(), 1);
    let dump = dir.path().join("dump");
    let o = partialfp(&["detect", p(&out.join("synth_0000.pgm")), "--dump", p(&dump)]);
    assert_eq!(o.status.code(), Some(0));
    for stage in [
        "mask",
        "stretched",
        "gabor",
        "binary",
        "orientation",
        "gradient_x",
        "gradient_y",
        "response_magnitude",
        "variance",
        "core_overlay",
    ] {
        let bytes = fs::read(dump.join(format!("{stage}.pgm"))).unwrap();
        assert!(bytes.starts_with(b"P5"), "{stage}");
    }
}

#[test]
fn evaluate_generator_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = synth_suite(dir.path(), 50);
    let report = dir.path().join("reports/report.json");
    let csv = dir.path().join("rows.csv");
    let o = partialfp(&[
        "evaluate",
        p(&out),
        p(&out.join("labels.csv")),
        "--report",
        p(&report),
        "--csv",
        p(&csv),
        "--threshold-sweep",
        "0.5:0.7:0.1",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(
        stdout.contains("Sensitivity")
            && stdout.contains("Specificity")
            && stdout.contains("Accuracy")
    );
    assert!(stdout.contains("T = 0.700"));

    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let m = &v["matrix"];
    let total: u64 = ["tp", "fp", "tn", "fn"]
        .iter()
        .map(|k| m[k].as_u64().unwrap())
        .sum();
    assert_eq!(total, 100);
    assert!(
        m["tp"].as_u64().unwrap() >= 45 && m["tn"].as_u64().unwrap() >= 45,
        "{m}"
    );
    assert_eq!(v["sweep"].as_array().unwrap().len(), 3);
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 101);
}

#[test]
fn evaluate_reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = synth_suite(dir.path(), 3);
    let run = |name: &str, jobs: &str| {
        let report = dir.path().join(name);
        let o = partialfp(&[
            "evaluate",
            p(&out),
            p(&out.join("labels.csv")),
            "--report",
            p(&report),
            "--jobs",
            jobs,
        ]);
        assert_eq!(o.status.code(), Some(0));
        fs::read(report).unwrap()
    };
    assert_eq!(run("a.json", "1"), run("b.json", "4"));
}

#[test]
fn evaluate_fails_on_missing_or_empty_labels() {
    let dir = tempfile::tempdir().unwrap();
    let o = partialfp(&[
        "evaluate",
        p(dir.path()),
        p(&dir.path().join("missing.csv")),
    ]);
    assert_eq!(o.status.code(), Some(1));

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "filename,partial\n").unwrap();
    let o = partialfp(&["evaluate", p(dir.path()), p(&empty)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty"));
}
