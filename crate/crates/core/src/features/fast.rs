//! FAST-9 segment-test corners and the pyramid keypoint count.

use crate::error::{Error, Result};
use crate::imgproc::{resize_area, Plane};

/// A detected corner. Coordinates are in the raster that was searched;
/// `level` records the pyramid level for pyramid runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub x: usize,
    pub y: usize,
    pub level: usize,
    pub score: f64,
}

/// The 16-pixel Bresenham circle of radius 3, clockwise from (0, -3).
const RING: [(i64, i64); 16] = [
    (0, -3),
    (1, -3),
    (2, -2),
    (3, -1),
    (3, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 3),
    (-1, 3),
    (-2, 2),
    (-3, 1),
    (-3, 0),
    (-3, -1),
    (-2, -2),
    (-1, -3),
];

/// Longest circular run of `true` in a 16-slot ring.
fn max_circular_run(flags: &[bool; 16]) -> usize {
    if flags.iter().all(|&f| f) {
        return 16;
    }
    let mut best = 0;
    let mut run = 0;
    // doubling the ring handles wraparound; the all-true case is out already
    for i in 0..32 {
        if flags[i % 16] {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

/// FAST-9 segment test at one pixel: at least 9 contiguous ring pixels all
/// brighter than `center + t` or all darker than `center - t`.
fn segment_test(plane: &Plane, x: usize, y: usize, t: f64) -> bool {
    let c = plane.get(x, y);
    let mut bright = [false; 16];
    let mut dark = [false; 16];
    for (i, &(dx, dy)) in RING.iter().enumerate() {
        let v = plane.get((x as i64 + dx) as usize, (y as i64 + dy) as usize);
        bright[i] = v > c + t;
        dark[i] = v < c - t;
    }
    max_circular_run(&bright) >= 9 || max_circular_run(&dark) >= 9
}

/// Corner strength: the ring's absolute deviations beyond the threshold,
/// summed in ascending order so the score depends only on the multiset of
/// ring values and is exactly invariant under raster rotation.
fn corner_score(plane: &Plane, x: usize, y: usize, t: f64) -> f64 {
    let c = plane.get(x, y);
    let mut devs: Vec<f64> = RING
        .iter()
        .map(|&(dx, dy)| {
            let v = plane.get((x as i64 + dx) as usize, (y as i64 + dy) as usize);
            ((v - c).abs() - t).max(0.0)
        })
        .collect();
    devs.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    devs.iter().sum()
}

/// FAST-9 corners with threshold `t`; `nms` applies 3x3 non-maximum
/// suppression on the corner score (ties keep the earliest pixel in raster
/// order). Planes must be at least 7x7 to fit the detection ring.
pub fn fast_keypoints(plane: &Plane, t: f64, nms: bool) -> Result<Vec<Keypoint>> {
    let (w, h) = (plane.width(), plane.height());
    if w < 7 || h < 7 {
        return Err(Error::InvalidInput(format!(
            "fast needs at least 7x7 for the ring margin, got {w}x{h}"
        )));
    }
    let mut found = Vec::new();
    for y in 3..h - 3 {
        for x in 3..w - 3 {
            if segment_test(plane, x, y, t) {
                found.push(Keypoint {
                    x,
                    y,
                    level: 0,
                    score: corner_score(plane, x, y, t),
                });
            }
        }
    }
    if !nms {
        return Ok(found);
    }

    let mut scores = vec![f64::NEG_INFINITY; w * h];
    for kp in &found {
        scores[kp.y * w + kp.x] = kp.score;
    }
    let kept = found
        .into_iter()
        .filter(|kp| {
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let nx = kp.x as i64 + dx;
                    let ny = kp.y as i64 + dy;
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let ns = scores[ny as usize * w + nx as usize];
                    if ns == f64::NEG_INFINITY {
                        continue;
                    }
                    // earlier raster position wins exact ties
                    let neighbor_earlier = ny < kp.y as i64 || (ny == kp.y as i64 && nx < kp.x as i64);
                    if ns > kp.score || (ns == kp.score && neighbor_earlier) {
                        return false;
                    }
                }
            }
            true
        })
        .collect();
    Ok(kept)
}

/// Pyramid keypoint-count parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbParams {
    /// Segment-test threshold on the plane's own intensity scale.
    pub threshold: f64,
    /// Number of pyramid levels including the base.
    pub levels: usize,
    /// Per-level downsampling factor, must exceed 1.
    pub scale_factor: f64,
}

impl Default for OrbParams {
    fn default() -> Self {
        OrbParams {
            threshold: 20.0 / 255.0,
            levels: 8,
            scale_factor: 1.2,
        }
    }
}

/// Total FAST-9 corner count (with suppression) over an area-averaged
/// scale pyramid. Levels too small for the detection ring are skipped.
/// Orientation and descriptors play no part in the count.
pub fn orb_count(plane: &Plane, params: &OrbParams) -> Result<usize> {
    if params.levels < 1 {
        return Err(Error::InvalidParameter("pyramid needs at least one level".into()));
    }
    if !(params.scale_factor > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "scale factor must exceed 1, got {}",
            params.scale_factor
        )));
    }
    let mut total = 0usize;
    let mut level = plane.clone();
    for i in 0..params.levels {
        if level.width() >= 7 && level.height() >= 7 {
            total += fast_keypoints(&level, params.threshold, true)?.len();
        }
        if i + 1 < params.levels {
            let nw = (level.width() as f64 / params.scale_factor).floor() as usize;
            let nh = (level.height() as f64 / params.scale_factor).floor() as usize;
            if nw < 1 || nh < 1 {
                break;
            }
            level = resize_area(&level, nw, nh)?;
        }
    }
    Ok(total)
}
