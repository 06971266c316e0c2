use partialfp::imgcore::io;
use partialfp::pipeline::Verdict;
use partialfp::synth::{crop_below, generate, reference_spec, Pattern, HALF_CROP_MARGIN};
use partialfp::{analyze, detect, detect_file, GrayImage32, GrayImage64, PipelineConfig};

fn whorl(seed: u64) -> (GrayImage64, (f64, f64)) {
    let (img, core) = generate::<f64>(&reference_spec(Pattern::Whorl, seed, 0.02)).unwrap();
    let core = core.unwrap();
    (img, (core.x, core.y))
}

#[test]
fn full_whorl_is_not_partial() {
    let (img, (cx, cy)) = whorl(3);
    let a = analyze(&img, &PipelineConfig::default()).unwrap();
    let (x, y) = a.detection.core.location.unwrap();
    assert!(a.detection.core.found);
    assert!((x as f64 - cx).abs() <= 8.0 && (y as f64 - cy).abs() <= 8.0);
    match a.verdict {
        Verdict::Classified(r) => {
            assert!(!r.is_partial, "{r:?}");
            assert!(r.min_ratio > 0.6 && r.min_ratio <= 1.0);
        }
        other => panic!("unexpected verdict {other:?}"),
    }
}

#[test]
fn cropped_whorl_is_partial() {
    let (img, (_, cy)) = whorl(3);
    let cropped = crop_below(&img, cy, HALF_CROP_MARGIN).unwrap();
    let rec = detect(&cropped, &PipelineConfig::default(), "cropped");
    assert!(rec.partial, "{rec:?}");
    assert!(rec.diagnostic.is_none());
    assert!(rec.counts.down < rec.counts.up);
}

#[test]
fn intermediates_share_the_image_size() {
    let (img, _) = whorl(1);
    let a = analyze(&img, &PipelineConfig::default()).unwrap();
    let dims = img.dims();
    assert_eq!(a.mask.as_raster().dims(), dims);
    assert_eq!(a.stretched.dims(), dims);
    assert_eq!(a.enhanced.dims(), dims);
    assert_eq!(a.binary.dims(), dims);
    assert_eq!(a.gradients.fx.dims(), dims);
    assert_eq!(a.response.dims(), dims);
    assert_eq!(a.variance.upsample().dims(), dims);
    assert!(a.variance.values.iter().all(|v| (0.0..=1.0).contains(v)));
    assert_eq!(a.variance.block_size, 8);
}

#[test]
fn single_and_double_precision_agree() {
    let cfg = PipelineConfig::default();
    for seed in [2, 7, 11] {
        let (img, _) = whorl(seed);
        let img32: GrayImage32 = img.cast();
        let a = detect(&img, &cfg, "f64");
        let b = detect(&img32, &cfg, "f32");
        assert_eq!(a.partial, b.partial);
        let (ax, ay) = (a.core.x.unwrap() as f64, a.core.y.unwrap() as f64);
        let (bx, by) = (b.core.x.unwrap() as f64, b.core.y.unwrap() as f64);
        assert!(
            (ax - bx).abs() <= 8.0 && (ay - by).abs() <= 8.0,
            "seed {seed}: {a:?} vs {b:?}"
        );
    }
}

#[test]
fn plain_arch_reports_no_core() {
    let (img, _) = generate::<f64>(&reference_spec(Pattern::PlainArch, 4, 0.02)).unwrap();
    let rec = detect(&img, &PipelineConfig::default(), "arch");
    assert!(!rec.core.found);
    assert!(rec.partial);
    assert_eq!(rec.diagnostic.as_deref(), Some("no-core"));
}

#[test]
fn detection_is_deterministic() {
    let (img, _) = whorl(5);
    let cfg = PipelineConfig::default();
    assert_eq!(
        detect(&img, &cfg, "a").to_json(),
        detect(&img, &cfg, "a").to_json()
    );
}

#[test]
fn record_json_uses_camel_case_and_ends_with_newline() {
    let (img, _) = whorl(6);
    let json = detect(&img, &PipelineConfig::default(), "x.pgm").to_json();
    assert!(json.ends_with('\n'));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in [
        "file",
        "core",
        "counts",
        "normalized",
        "minRatio",
        "threshold",
        "partial",
        "diagnostic",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["core"]["relativeResponse"].is_number());
}

#[test]
fn files_round_trip_through_pgm_and_tiff() {
    let dir = tempfile::tempdir().unwrap();
    let (img, _) = whorl(8);
    let pgm = dir.path().join("nested/w.pgm");
    io::save_pgm(&pgm, &img).unwrap();
    let tif = dir.path().join("w.tif");
    image::GrayImage::from_raw(img.width() as u32, img.height() as u32, img.to_u8())
        .unwrap()
        .save(&tif)
        .unwrap();
    let cfg = PipelineConfig::default();
    let a = detect_file(&pgm, &cfg).unwrap();
    let b = detect_file(&tif, &cfg).unwrap();
    assert_eq!((a.core, a.counts, a.partial), (b.core, b.counts, b.partial));
    assert!(!a.partial);
}

#[test]
fn unreadable_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pgm");
    std::fs::write(&bad, b"not an image").unwrap();
    assert!(detect_file(&bad, &PipelineConfig::default()).is_err());
    assert!(detect_file(&dir.path().join("missing.pgm"), &PipelineConfig::default()).is_err());
}

#[test]
fn blank_image_is_partial_with_diagnostic() {
    let img = GrayImage64::from_vec(64, 64, vec![0.5; 64 * 64]).unwrap();
    let rec = detect(&img, &PipelineConfig::default(), "blank");
    assert!(rec.partial);
    assert_eq!(rec.diagnostic.as_deref(), Some("no-foreground"));
}

#[test]
fn localization_holds_at_higher_noise() {
    let cfg = PipelineConfig::default();
    let mut hits = 0;
    for seed in 300..320 {
        let (img, core) = generate::<f64>(&reference_spec(Pattern::Whorl, seed, 0.05)).unwrap();
        let core = core.unwrap();
        let peak = analyze(&img, &cfg).unwrap().detection.core;
        if let (true, Some((x, y))) = (peak.found, peak.location) {
            if (x as f64 - core.x).abs().max((y as f64 - core.y).abs()) <= 8.0 {
                hits += 1;
            }
        }
    }
    assert!(hits >= 19, "{hits}/20");
}
