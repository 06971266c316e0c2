//! Partial-capture verdict from foreground runs along the axes through the core.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::segmentation::SegmentationMask;

pub const DEFAULT_THRESHOLD: f64 = 0.6;

/// Contiguous foreground pixel runs from the core, core pixel included in each.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxisCounts {
    pub left: usize,
    pub right: usize,
    pub up: usize,
    pub down: usize,
}

impl AxisCounts {
    pub fn as_array(&self) -> [usize; 4] {
        [self.left, self.right, self.up, self.down]
    }

    pub fn max(&self) -> usize {
        self.as_array().into_iter().max().unwrap_or(0)
    }
}

/// Axis counts normalized by their maximum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct NormalizedCounts {
    pub left: f64,
    pub right: f64,
    pub up: f64,
    pub down: f64,
}

impl NormalizedCounts {
    pub fn as_array(&self) -> [f64; 4] {
        [self.left, self.right, self.up, self.down]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PartialityResult {
    pub counts: AxisCounts,
    pub normalized: NormalizedCounts,
    pub min_ratio: f64,
    pub threshold: f64,
    pub is_partial: bool,
}

/// Walks −x, +x, −y, +y from `core`, counting foreground pixels until the first background
/// pixel or the image edge. A background core pixel gives all zeros.
pub fn axis_counts(mask: &SegmentationMask, core: (usize, usize)) -> Result<AxisCounts> {
    let (cx, cy) = core;
    let (w, h) = (mask.width(), mask.height());
    if cx >= w || cy >= h {
        return Err(invalid(format!("core ({cx}, {cy}) outside {w}x{h} mask")));
    }
    let run = |xs: &mut dyn Iterator<Item = (usize, usize)>| {
        xs.take_while(|&(x, y)| mask.is_foreground(x, y)).count()
    };
    Ok(AxisCounts {
        left: run(&mut (0..=cx).rev().map(|x| (x, cy))),
        right: run(&mut (cx..w).map(|x| (x, cy))),
        up: run(&mut (0..=cy).rev().map(|y| (cx, y))),
        down: run(&mut (cy..h).map(|y| (cx, y))),
    })
}

/// Normalizes by the largest count and flags the capture as partial when the smallest
/// normalized count is at most `threshold`.
pub fn classify(counts: AxisCounts, threshold: f64) -> Result<PartialityResult> {
    let max = counts.max();
    if max == 0 {
        return Err(Error::DegenerateCore);
    }
    let norm = |c: usize| c as f64 / max as f64;
    let normalized = NormalizedCounts {
        left: norm(counts.left),
        right: norm(counts.right),
        up: norm(counts.up),
        down: norm(counts.down),
    };
    let min_ratio = normalized
        .as_array()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(PartialityResult {
        counts,
        normalized,
        min_ratio,
        threshold,
        is_partial: min_ratio <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::Raster;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-3
    }

    #[test]
    fn full_mask_counts_are_border_limited() {
        let mask = SegmentationMask::new(Raster::filled(100, 100, true));
        let c = axis_counts(&mask, (50, 50)).unwrap();
        assert_eq!(
            c,
            AxisCounts {
                left: 51,
                right: 50,
                up: 51,
                down: 50
            }
        );
    }

    #[test]
    fn background_core_gives_zero_counts() {
        let mask = SegmentationMask::new(Raster::from_fn(20, 20, |x, _| x != 10));
        let c = axis_counts(&mask, (10, 10)).unwrap();
        assert_eq!(c, AxisCounts::default());
        assert!(matches!(classify(c, 0.6), Err(Error::DegenerateCore)));
    }

    #[test]
    fn counting_stops_at_first_background_pixel() {
        let mask = SegmentationMask::new(Raster::from_fn(20, 20, |x, y| x != 3 && y != 15));
        let c = axis_counts(&mask, (10, 10)).unwrap();
        assert_eq!((c.left, c.right, c.up, c.down), (7, 10, 11, 5));
    }

    #[test]
    fn out_of_bounds_core_is_rejected() {
        let mask = SegmentationMask::new(Raster::filled(10, 10, true));
        assert!(axis_counts(&mask, (10, 0)).is_err());
    }

    #[test]
    fn classify_examples() {
        let r = classify(
            AxisCounts {
                left: 51,
                right: 50,
                up: 51,
                down: 49,
            },
            DEFAULT_THRESHOLD,
        )
        .unwrap();
        let n = r.normalized;
        assert!(
            close(n.left, 1.0) && close(n.right, 0.980) && close(n.up, 1.0) && close(n.down, 0.961)
        );
        assert!(close(r.min_ratio, 0.961));
        assert!(!r.is_partial);

        let r = classify(
            AxisCounts {
                left: 100,
                right: 100,
                up: 100,
                down: 30,
            },
            DEFAULT_THRESHOLD,
        )
        .unwrap();
        assert_eq!(r.min_ratio, 0.3);
        assert!(r.is_partial);
    }

    #[test]
    fn threshold_is_inclusive() {
        let counts = AxisCounts {
            left: 10,
            right: 6,
            up: 10,
            down: 10,
        };
        assert!(classify(counts, 0.6).unwrap().is_partial);
        assert!(!classify(counts, 0.59).unwrap().is_partial);
    }

    fn counts() -> impl Strategy<Value = AxisCounts> {
        (0usize..500, 0usize..500, 0usize..500, 1usize..500).prop_map(|(l, r, u, d)| AxisCounts {
            left: l,
            right: r,
            up: u,
            down: d,
        })
    }

    proptest! {
        #[test]
        fn max_normalized_is_one(c in counts()) {
            let r = classify(c, 0.6).unwrap();
            prop_assert_eq!(r.normalized.as_array().into_iter().fold(0.0, f64::max), 1.0);
            prop_assert_eq!(r.is_partial, r.min_ratio <= 0.6);
        }

        #[test]
        fn permutation_leaves_verdict(c in counts(), t in 0.0f64..1.0) {
            let a = classify(c, t).unwrap();
            let p = classify(AxisCounts { left: c.down, right: c.up, up: c.left, down: c.right }, t).unwrap();
            prop_assert_eq!(a.min_ratio, p.min_ratio);
            prop_assert_eq!(a.is_partial, p.is_partial);
            prop_assert_eq!(a.normalized.left, p.normalized.up);
            prop_assert_eq!(a.normalized.down, p.normalized.left);
        }
    }
}
