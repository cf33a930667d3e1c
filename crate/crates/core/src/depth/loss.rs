//! Closed-form scale/shift alignment, the aligned squared loss, and the
//! multi-scale gradient-matching regularizer.

use crate::error::{Error, Result};
use crate::imgproc::Plane;

use super::InverseDepthMap;

/// The affine alignment `aligned = s * pred + t` minimizing the squared
/// residual against the ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleShift {
    pub s: f64,
    pub t: f64,
}

/// Per-pixel residual of the aligned prediction; invalid pixels hold 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualMap {
    pub plane: Plane,
    pub valid: Vec<bool>,
}

/// Sums needed by the 2x2 normal equations, over jointly valid pixels.
struct AlignmentSums {
    a11: f64, // sum d^2
    a12: f64, // sum d
    a22: f64, // valid count
    b1: f64,  // sum d d'
    b2: f64,  // sum d'
}

fn alignment_sums(pred: &InverseDepthMap, gt: &InverseDepthMap) -> AlignmentSums {
    let mut s = AlignmentSums {
        a11: 0.0,
        a12: 0.0,
        a22: 0.0,
        b1: 0.0,
        b2: 0.0,
    };
    for i in 0..pred.values().len() {
        if pred.is_valid(i) && gt.is_valid(i) {
            let d = pred.values()[i];
            let g = gt.values()[i];
            s.a11 += d * d;
            s.a12 += d;
            s.a22 += 1.0;
            s.b1 += d * g;
            s.b2 += g;
        }
    }
    s
}

/// Solves the 2x2 normal equations for the scale and shift that minimize
/// `sum (s d + t - d')^2` over jointly valid pixels.
///
/// A constant prediction makes the system singular; the determinant guard
/// is scaled by the matrix magnitude so the test survives large maps.
pub fn fit_scale_shift(pred: &InverseDepthMap, gt: &InverseDepthMap) -> Result<ScaleShift> {
    pred.check_pair(gt)?;
    let s = alignment_sums(pred, gt);
    if s.a22 < 2.0 {
        return Err(Error::DegenerateInput(format!(
            "alignment needs at least 2 valid pixels, got {}",
            s.a22
        )));
    }
    let det = s.a11 * s.a22 - s.a12 * s.a12;
    if det.abs() < 1e-12 * (s.a11 * s.a22).max(1.0) {
        return Err(Error::DegenerateInput(
            "prediction is constant on the valid set; scale/shift is unidentifiable".into(),
        ));
    }
    Ok(ScaleShift {
        s: (s.a22 * s.b1 - s.a12 * s.b2) / det,
        t: (s.a11 * s.b2 - s.a12 * s.b1) / det,
    })
}

/// Scale-and-shift-invariant loss: `(1/2N) sum (s d + t - d')^2` at the
/// fitted alignment, `N` the number of jointly valid pixels. Equals the
/// minimum of the quadratic over all alignments.
pub fn ssi_loss(pred: &InverseDepthMap, gt: &InverseDepthMap) -> Result<f64> {
    let p = fit_scale_shift(pred, gt)?;
    let mut sum = 0.0;
    let mut n = 0usize;
    for i in 0..pred.values().len() {
        if pred.is_valid(i) && gt.is_valid(i) {
            let r = p.s * pred.values()[i] + p.t - gt.values()[i];
            sum += r * r;
            n += 1;
        }
    }
    Ok(sum / (2.0 * n as f64))
}

/// Per-pixel residual `s d + t - d'` under the given alignment; pixels
/// invalid in either map are set to 0.
pub fn residual_map(
    pred: &InverseDepthMap,
    gt: &InverseDepthMap,
    p: &ScaleShift,
) -> Result<ResidualMap> {
    pred.check_pair(gt)?;
    let valid = pred.joint_valid(gt);
    let values = (0..pred.values().len())
        .map(|i| {
            if valid[i] {
                p.s * pred.values()[i] + p.t - gt.values()[i]
            } else {
                0.0
            }
        })
        .collect();
    Ok(ResidualMap {
        plane: Plane::new(pred.width(), pred.height(), values)?,
        valid,
    })
}

/// Multi-scale gradient-matching regularizer.
///
/// The alignment is fitted once at full resolution; each scale halves the
/// inputs by 2x2 area averaging before the residual and its forward
/// differences are taken. Gradient terms count only where both involved
/// pixels are valid, and the sum is normalized by the full-resolution valid
/// pixel count.
pub fn gradient_matching_loss(
    pred: &InverseDepthMap,
    gt: &InverseDepthMap,
    k_scales: usize,
) -> Result<f64> {
    pred.check_pair(gt)?;
    if k_scales < 1 {
        return Err(Error::InvalidParameter(
            "gradient matching needs at least one scale".into(),
        ));
    }
    let coarsest = 1usize << (k_scales - 1);
    if pred.width() / coarsest < 2 || pred.height() / coarsest < 2 {
        return Err(Error::InvalidParameter(format!(
            "{}x{} map cannot support {} scales (coarsest level must be at least 2x2)",
            pred.width(),
            pred.height(),
            k_scales
        )));
    }
    let p = fit_scale_shift(pred, gt)?;
    let n_full = pred
        .joint_valid(gt)
        .iter()
        .filter(|&&b| b)
        .count();

    let mut sum = 0.0;
    let mut cur_pred = pred.clone();
    let mut cur_gt = gt.clone();
    for k in 0..k_scales {
        if k > 0 {
            cur_pred = cur_pred.downsample_half();
            cur_gt = cur_gt.downsample_half();
        }
        let q = residual_map(&cur_pred, &cur_gt, &p)?;
        let (w, h) = (q.plane.width(), q.plane.height());
        for y in 0..h {
            for x in 0..w {
                if !q.valid[y * w + x] {
                    continue;
                }
                if x + 1 < w && q.valid[y * w + x + 1] {
                    sum += (q.plane.get(x + 1, y) - q.plane.get(x, y)).abs();
                }
                if y + 1 < h && q.valid[(y + 1) * w + x] {
                    sum += (q.plane.get(x, y + 1) - q.plane.get(x, y)).abs();
                }
            }
        }
    }
    Ok(sum / n_full as f64)
}

/// Batched loss: the mean over pairs of `ssi + alpha * gradient_matching`.
pub fn total_loss(
    pairs: &[(InverseDepthMap, InverseDepthMap)],
    alpha: f64,
    k_scales: usize,
) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("loss needs at least one pair".into()));
    }
    let mut sum = 0.0;
    for (pred, gt) in pairs {
        sum += ssi_loss(pred, gt)? + alpha * gradient_matching_loss(pred, gt, k_scales)?;
    }
    Ok(sum / pairs.len() as f64)
}
