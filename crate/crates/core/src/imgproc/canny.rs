//! Canny edge detection: smoothing, Sobel gradients, non-maximum
//! suppression and double-threshold hysteresis.

use crate::error::{Error, Result};
use crate::imgproc::filter::{gaussian_smooth, gradient_magnitude, otsu_threshold, sobel_gradients};
use crate::imgproc::raster::{BinaryMask, Plane};

/// Hysteresis thresholds: explicit values or Otsu-derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CannyThresholds {
    /// `high` from Otsu on the gradient-magnitude histogram, `low = 0.5 high`.
    Auto,
    /// Explicit thresholds in gradient-magnitude units; `0 <= low <= high`.
    Manual { low: f64, high: f64 },
}

/// Canny tunables. `sigma = None` skips the smoothing pass (input already
/// smoothed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyParams {
    pub sigma: Option<f64>,
    pub thresholds: CannyThresholds,
}

impl Default for CannyParams {
    fn default() -> Self {
        CannyParams {
            sigma: Some(1.0),
            thresholds: CannyThresholds::Auto,
        }
    }
}

/// Runs Canny edge detection and returns the binary edge mask.
pub fn canny(plane: &Plane, params: &CannyParams) -> Result<BinaryMask> {
    let smoothed = match params.sigma {
        Some(sigma) => gaussian_smooth(plane, sigma)?,
        None => plane.clone(),
    };
    let (gx, gy) = sobel_gradients(&smoothed)?;
    let mag = gradient_magnitude(&gx, &gy)?;

    let (low, high) = match params.thresholds {
        CannyThresholds::Auto => {
            let high = otsu_threshold(&mag);
            (0.5 * high, high)
        }
        CannyThresholds::Manual { low, high } => {
            if low < 0.0 || low > high {
                return Err(Error::InvalidParameter(format!(
                    "canny thresholds need 0 <= low <= high, got low={low} high={high}"
                )));
            }
            (low, high)
        }
    };

    let thinned = non_maximum_suppression(&mag, &gx, &gy);
    Ok(hysteresis(&thinned, low, high))
}

/// Thins ridges to one pixel by keeping only pixels that dominate their two
/// neighbors along the quantized gradient direction.
///
/// The comparison is `>=` against the first neighbor and `>` against the
/// second, so an exactly tied two-pixel ridge keeps exactly one pixel.
/// Border pixels are suppressed.
fn non_maximum_suppression(mag: &Plane, gx: &Plane, gy: &Plane) -> Plane {
    let (w, h) = (mag.width(), mag.height());
    let mut out = vec![0.0; w * h];
    if w < 3 || h < 3 {
        return Plane::new(w, h, out).expect("dimensions unchanged");
    }
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let m = mag.get(x, y);
            if m <= 0.0 {
                continue;
            }
            let angle = gy.get(x, y).atan2(gx.get(x, y)).to_degrees();
            let angle = if angle < 0.0 { angle + 180.0 } else { angle };
            let (n1, n2) = if !(22.5..157.5).contains(&angle) {
                (mag.get(x - 1, y), mag.get(x + 1, y))
            } else if angle < 67.5 {
                (mag.get(x + 1, y + 1), mag.get(x - 1, y - 1))
            } else if angle < 112.5 {
                (mag.get(x, y - 1), mag.get(x, y + 1))
            } else {
                (mag.get(x - 1, y + 1), mag.get(x + 1, y - 1))
            };
            if m >= n1 && m > n2 {
                out[y * w + x] = m;
            }
        }
    }
    Plane::new(w, h, out).expect("dimensions unchanged")
}

/// Double-threshold hysteresis: strong pixels seed a flood through
/// 8-connected weak pixels.
fn hysteresis(thinned: &Plane, low: f64, high: f64) -> BinaryMask {
    let (w, h) = (thinned.width(), thinned.height());
    let mut mask = BinaryMask::empty(w, h);
    if w < 3 || h < 3 {
        return mask;
    }
    let mut stack = Vec::new();
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let v = thinned.get(x, y);
            if v >= high && v > 0.0 && !mask.get(x, y) {
                mask.set(x, y, true);
                stack.push((x, y));
                while let Some((cx, cy)) = stack.pop() {
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            if dx == 0 && dy == 0 {
                                continue;
                            }
                            let nx = cx as i64 + dx;
                            let ny = cy as i64 + dy;
                            if nx < 1 || ny < 1 || nx >= w as i64 - 1 || ny >= h as i64 - 1 {
                                continue;
                            }
                            let (nx, ny) = (nx as usize, ny as usize);
                            let nv = thinned.get(nx, ny);
                            if nv >= low && nv > 0.0 && !mask.get(nx, ny) {
                                mask.set(nx, ny, true);
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
            }
        }
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgproc::regions::connected_components;
    use crate::imgproc::Connectivity;

    #[test]
    fn constant_plane_yields_empty_mask() {
        let p = Plane::filled(16, 16, 0.5).unwrap();
        let m = canny(&p, &CannyParams::default()).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn rejects_inverted_thresholds() {
        let p = Plane::filled(8, 8, 0.0).unwrap();
        let params = CannyParams {
            sigma: Some(1.0),
            thresholds: CannyThresholds::Manual { low: 2.0, high: 1.0 },
        };
        assert!(matches!(canny(&p, &params), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn vertical_step_gives_one_pixel_wide_line() {
        // step at column 8 of a 16x12 plane
        let p = Plane::from_fn(16, 12, |x, _| if x < 8 { 0.0 } else { 1.0 }).unwrap();
        let m = canny(&p, &CannyParams::default()).unwrap();
        let mut edge_col = None;
        for y in 1..11 {
            let cols: Vec<usize> = (0..16).filter(|&x| m.get(x, y)).collect();
            assert_eq!(cols.len(), 1, "row {y} should hold exactly one edge pixel");
            assert!(
                cols[0] == 7 || cols[0] == 8,
                "edge at column {} is off the step",
                cols[0]
            );
            match edge_col {
                None => edge_col = Some(cols[0]),
                Some(c) => assert_eq!(c, cols[0], "edge line must be straight"),
            }
        }
    }

    #[test]
    fn filled_disk_gives_single_closed_ring() {
        let (w, h, r) = (48, 48, 14.0);
        let p = Plane::from_fn(w, h, |x, y| {
            let dx = x as f64 - 23.5;
            let dy = y as f64 - 23.5;
            if (dx * dx + dy * dy).sqrt() <= r {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let edges = canny(&p, &CannyParams::default()).unwrap();
        assert!(!edges.is_empty());

        // the ring is one 8-connected component...
        let comps = connected_components(&edges, Connectivity::Eight);
        assert_eq!(comps.count(), 1, "edges must form a single component");

        // ...and it separates the plane: the complement has inside + outside
        let complement = BinaryMask::from_fn(w, h, |x, y| !edges.get(x, y));
        let comp_labels = connected_components(&complement, Connectivity::Four);
        assert_eq!(comp_labels.count(), 2, "closed ring separates inside from outside");
    }

    #[test]
    fn output_is_subset_of_low_threshold_pixels() {
        let p = Plane::from_fn(20, 20, |x, y| {
            (((x * 37 + y * 101) % 13) as f64 / 13.0).sin().abs()
        })
        .unwrap();
        let low = 0.4;
        let params = CannyParams {
            sigma: None,
            thresholds: CannyThresholds::Manual { low, high: 1.0 },
        };
        let m = canny(&p, &params).unwrap();
        let (gx, gy) = sobel_gradients(&p).unwrap();
        let mag = gradient_magnitude(&gx, &gy).unwrap();
        for y in 0..20 {
            for x in 0..20 {
                if m.get(x, y) {
                    assert!(mag.get(x, y) >= low);
                }
            }
        }
    }
}
