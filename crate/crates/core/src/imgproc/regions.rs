//! Connected components, morphological closing and hole filling.

use crate::error::Result;
use crate::imgproc::raster::{BinaryMask, LabelMap};

/// Neighborhood used when growing components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(i64, i64)] {
        match self {
            Connectivity::Four => &[(0, -1), (-1, 0), (1, 0), (0, 1)],
            Connectivity::Eight => &[
                (-1, -1),
                (0, -1),
                (1, -1),
                (-1, 0),
                (1, 0),
                (-1, 1),
                (0, 1),
                (1, 1),
            ],
        }
    }
}

/// Labels foreground components deterministically: components are numbered
/// from 1 in order of first raster-scan encounter, 0 is background.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> LabelMap {
    let (w, h) = (mask.width(), mask.height());
    let mut labels = vec![0u32; w * h];
    let mut next = 0u32;
    let mut queue = std::collections::VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) || labels[y * w + x] != 0 {
                continue;
            }
            next += 1;
            labels[y * w + x] = next;
            queue.push_back((x, y));
            while let Some((cx, cy)) = queue.pop_front() {
                for &(dx, dy) in connectivity.offsets() {
                    let nx = cx as i64 + dx;
                    let ny = cy as i64 + dy;
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let (nx, ny) = (nx as usize, ny as usize);
                    if mask.get(nx, ny) && labels[ny * w + nx] == 0 {
                        labels[ny * w + nx] = next;
                        queue.push_back((nx, ny));
                    }
                }
            }
        }
    }
    LabelMap::new(w, h, labels, next as usize)
}

/// Pixel centers within `radius + 0.5` of the origin; the radius-1 disk is
/// the full 3x3 neighborhood.
fn disk_offsets(radius: usize) -> Vec<(i64, i64)> {
    let r = radius as i64;
    let limit = (radius as f64 + 0.5) * (radius as f64 + 0.5);
    let mut offs = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if (dx * dx + dy * dy) as f64 <= limit {
                offs.push((dx, dy));
            }
        }
    }
    offs
}

/// Morphological closing (dilate then erode) with a disk structuring
/// element. Probes falling outside the raster are ignored during erosion,
/// which keeps closing extensive at the borders.
pub fn morph_close(mask: &BinaryMask, radius: usize) -> Result<BinaryMask> {
    if radius == 0 {
        return Err(crate::error::Error::InvalidParameter(
            "closing radius must be at least 1".into(),
        ));
    }
    let offs = disk_offsets(radius);
    let (w, h) = (mask.width(), mask.height());

    let mut dilated = BinaryMask::empty(w, h);
    for y in 0..h {
        for x in 0..w {
            let hit = offs.iter().any(|&(dx, dy)| {
                let nx = x as i64 + dx;
                let ny = y as i64 + dy;
                nx >= 0
                    && ny >= 0
                    && nx < w as i64
                    && ny < h as i64
                    && mask.get(nx as usize, ny as usize)
            });
            if hit {
                dilated.set(x, y, true);
            }
        }
    }

    let mut closed = BinaryMask::empty(w, h);
    for y in 0..h {
        for x in 0..w {
            let all = offs.iter().all(|&(dx, dy)| {
                let nx = x as i64 + dx;
                let ny = y as i64 + dy;
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    return true;
                }
                dilated.get(nx as usize, ny as usize)
            });
            if all {
                closed.set(x, y, true);
            }
        }
    }
    Ok(closed)
}

/// Turns enclosed background into foreground: background pixels with no
/// 4-connected path to the raster border become foreground.
pub fn fill_holes(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let mut reachable = vec![false; w * h];
    let mut stack = Vec::new();
    let seed = |x: usize, y: usize, stack: &mut Vec<(usize, usize)>, reach: &mut Vec<bool>| {
        if !mask.get(x, y) && !reach[y * w + x] {
            reach[y * w + x] = true;
            stack.push((x, y));
        }
    };
    for x in 0..w {
        seed(x, 0, &mut stack, &mut reachable);
        seed(x, h - 1, &mut stack, &mut reachable);
    }
    for y in 0..h {
        seed(0, y, &mut stack, &mut reachable);
        seed(w - 1, y, &mut stack, &mut reachable);
    }
    while let Some((cx, cy)) = stack.pop() {
        for &(dx, dy) in Connectivity::Four.offsets() {
            let nx = cx as i64 + dx;
            let ny = cy as i64 + dy;
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let (nx, ny) = (nx as usize, ny as usize);
            if !mask.get(nx, ny) && !reachable[ny * w + nx] {
                reachable[ny * w + nx] = true;
                stack.push((nx, ny));
            }
        }
    }
    BinaryMask::from_fn(w, h, |x, y| mask.get(x, y) || !reachable[y * w + x])
}
