//! Per-frame scalar criteria: Hu-moment shape signature and distance,
//! edge-density score, and pyramid keypoint count.

mod fast;
mod moments;

pub use fast::{fast_keypoints, orb_count, Keypoint, OrbParams};
pub use moments::{
    central_moments, hu_from_moments, hu_moments, moment_distance, CentralMoments, HuVector,
};

use crate::error::Result;
use crate::imgproc::{gaussian_smooth, gradient_magnitude, sobel_gradients, Plane};

/// Edge-density score: the mean gradient magnitude of the Gaussian-smoothed
/// plane. Scales linearly with image contrast and is resolution-independent.
pub fn edge_score(plane: &Plane, sigma: f64) -> Result<f64> {
    let smoothed = gaussian_smooth(plane, sigma)?;
    let (gx, gy) = sobel_gradients(&smoothed)?;
    let mag = gradient_magnitude(&gx, &gy)?;
    Ok(mag.mean())
}
