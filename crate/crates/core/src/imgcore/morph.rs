//! Binary morphology on boolean rasters with a 3x3 structuring element.

use std::collections::VecDeque;

use super::raster::Raster;

/// How pixels outside the raster are treated by erosion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Border {
    /// Out-of-bounds neighbours are ignored.
    Ignore,
    /// Out-of-bounds neighbours count as background.
    Background,
}

pub fn dilate(mask: &Raster<bool>) -> Raster<bool> {
    let (w, h) = mask.dims();
    Raster::from_fn(w, h, |x, y| {
        neighbours8(x, y, w, h).any(|(nx, ny)| mask.get(nx, ny)) || mask.get(x, y)
    })
}

pub fn erode(mask: &Raster<bool>, border: Border) -> Raster<bool> {
    let (w, h) = mask.dims();
    Raster::from_fn(w, h, |x, y| {
        if !mask.get(x, y) {
            return false;
        }
        let on_edge = x == 0 || y == 0 || x + 1 == w || y + 1 == h;
        if border == Border::Background && on_edge {
            return false;
        }
        neighbours8(x, y, w, h).all(|(nx, ny)| mask.get(nx, ny))
    })
}

/// Closing as on an unbounded plane: the grid is padded with background so shapes near the
/// edge shrink back exactly as they grew.
pub fn close(mask: &Raster<bool>, iterations: usize) -> Raster<bool> {
    let (w, h) = mask.dims();
    let pad = iterations;
    let mut out = Raster::from_fn(w + 2 * pad, h + 2 * pad, |x, y| {
        x >= pad && y >= pad && x - pad < w && y - pad < h && mask.get(x - pad, y - pad)
    });
    for _ in 0..iterations {
        out = dilate(&out);
    }
    for _ in 0..iterations {
        out = erode(&out, Border::Background);
    }
    out.crop(pad, pad, w, h)
        .expect("padding contains the original grid")
}

/// Labels 4-connected foreground components; returns labels (0 = background) and component sizes.
pub fn label4(mask: &Raster<bool>) -> (Raster<u32>, Vec<usize>) {
    let (w, h) = mask.dims();
    let mut labels = Raster::filled(w, h, 0u32);
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) || labels.get(x, y) != 0 {
                continue;
            }
            let id = sizes.len() as u32 + 1;
            let mut size = 0;
            labels.set(x, y, id);
            queue.push_back((x, y));
            while let Some((cx, cy)) = queue.pop_front() {
                size += 1;
                for (nx, ny) in neighbours4(cx, cy, w, h) {
                    if mask.get(nx, ny) && labels.get(nx, ny) == 0 {
                        labels.set(nx, ny, id);
                        queue.push_back((nx, ny));
                    }
                }
            }
            sizes.push(size);
        }
    }
    (labels, sizes)
}

/// Keeps the largest 4-connected component; ties go to the first in row-major order.
pub fn largest_component(mask: &Raster<bool>) -> Raster<bool> {
    let (labels, sizes) = label4(mask);
    let mut best = None;
    for (i, &s) in sizes.iter().enumerate() {
        if best.is_none_or(|(_, bs)| s > bs) {
            best = Some((i as u32 + 1, s));
        }
    }
    match best {
        Some((id, _)) => labels.map(|l| l == id),
        None => mask.map(|_| false),
    }
}

/// Fills background regions not 8-connected to the raster border.
pub fn fill_holes(mask: &Raster<bool>) -> Raster<bool> {
    let (w, h) = mask.dims();
    let mut outside = Raster::filled(w, h, false);
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            let on_edge = x == 0 || y == 0 || x + 1 == w || y + 1 == h;
            if on_edge && !mask.get(x, y) {
                outside.set(x, y, true);
                queue.push_back((x, y));
            }
        }
    }
    while let Some((cx, cy)) = queue.pop_front() {
        for (nx, ny) in neighbours8(cx, cy, w, h) {
            if !mask.get(nx, ny) && !outside.get(nx, ny) {
                outside.set(nx, ny, true);
                queue.push_back((nx, ny));
            }
        }
    }
    outside.map(|o| !o)
}

fn neighbours4(x: usize, y: usize, w: usize, h: usize) -> impl Iterator<Item = (usize, usize)> {
    const D: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
    offsets(x, y, w, h, &D)
}

fn neighbours8(x: usize, y: usize, w: usize, h: usize) -> impl Iterator<Item = (usize, usize)> {
    const D: [(isize, isize); 8] = [
        (-1, -1),
        (0, -1),
        (1, -1),
        (-1, 0),
        (1, 0),
        (-1, 1),
        (0, 1),
        (1, 1),
    ];
    offsets(x, y, w, h, &D)
}

fn offsets(
    x: usize,
    y: usize,
    w: usize,
    h: usize,
    d: &'static [(isize, isize)],
) -> impl Iterator<Item = (usize, usize)> {
    d.iter().filter_map(move |&(dx, dy)| {
        let nx = x as isize + dx;
        let ny = y as isize + dy;
        (nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h)
            .then_some((nx as usize, ny as usize))
    })
}
