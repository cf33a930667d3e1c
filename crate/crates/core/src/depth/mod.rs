//! Scale-and-shift-invariant depth alignment and loss metrics, plus
//! depth-map file I/O. Evaluates externally produced inverse-depth maps;
//! no estimation happens here.

mod io;
mod loss;

pub use io::{read_depth_png16, read_pfm, write_pfm};
pub use loss::{
    fit_scale_shift, gradient_matching_loss, residual_map, ssi_loss, total_loss, ResidualMap,
    ScaleShift,
};

use crate::error::{Error, Result};
use crate::imgproc::Plane;

/// Per-pixel relative inverse depth (larger = nearer) with an optional
/// validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseDepthMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
    valid: Option<Vec<bool>>,
}

impl InverseDepthMap {
    /// Wraps a fully valid row-major buffer.
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<InverseDepthMap> {
        Self::with_mask(width, height, values, None)
    }

    /// Wraps a buffer with a validity mask. Valid pixels must be finite.
    pub fn with_mask(
        width: usize,
        height: usize,
        values: Vec<f64>,
        valid: Option<Vec<bool>>,
    ) -> Result<InverseDepthMap> {
        if values.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "depth buffer holds {} values, expected {}",
                values.len(),
                width * height
            )));
        }
        if let Some(mask) = &valid {
            if mask.len() != values.len() {
                return Err(Error::InvalidInput("mask length differs from buffer".into()));
            }
            for (v, &ok) in values.iter().zip(mask) {
                if ok && !v.is_finite() {
                    return Err(Error::InvalidInput(
                        "valid pixels must hold finite values".into(),
                    ));
                }
            }
        } else if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "unmasked map must be finite everywhere".into(),
            ));
        }
        Ok(InverseDepthMap {
            width,
            height,
            values,
            valid,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        f: impl Fn(usize, usize) -> f64,
    ) -> Result<InverseDepthMap> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        InverseDepthMap::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.valid.as_deref()
    }

    #[inline]
    pub fn is_valid(&self, idx: usize) -> bool {
        self.valid.as_ref().map_or(true, |m| m[idx])
    }

    /// Number of valid pixels.
    pub fn valid_count(&self) -> usize {
        match &self.valid {
            None => self.values.len(),
            Some(m) => m.iter().filter(|&&b| b).count(),
        }
    }

    /// The values as a plane, with invalid pixels set to 0.
    pub fn to_plane(&self) -> Plane {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| if self.is_valid(i) { v } else { 0.0 })
            .collect();
        Plane::new(self.width, self.height, values).expect("dimensions are valid")
    }

    fn same_dims(&self, other: &InverseDepthMap) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::InvalidInput(format!(
                "depth maps differ: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(())
    }

    /// Joint validity: pixels valid in both maps.
    pub(crate) fn joint_valid(&self, other: &InverseDepthMap) -> Vec<bool> {
        (0..self.values.len())
            .map(|i| self.is_valid(i) && other.is_valid(i))
            .collect()
    }

    pub(crate) fn check_pair(&self, other: &InverseDepthMap) -> Result<()> {
        self.same_dims(other)
    }

    /// 2x2 area-average downsampling; a coarse pixel is valid only when all
    /// four constituents are. Trailing odd rows and columns are dropped.
    pub(crate) fn downsample_half(&self) -> InverseDepthMap {
        let nw = (self.width / 2).max(1);
        let nh = (self.height / 2).max(1);
        let mut values = Vec::with_capacity(nw * nh);
        let mut valid = Vec::with_capacity(nw * nh);
        for j in 0..nh {
            for i in 0..nw {
                let (x, y) = (2 * i, 2 * j);
                let idx = [
                    y * self.width + x,
                    y * self.width + (x + 1).min(self.width - 1),
                    (y + 1).min(self.height - 1) * self.width + x,
                    (y + 1).min(self.height - 1) * self.width + (x + 1).min(self.width - 1),
                ];
                let ok = idx.iter().all(|&k| self.is_valid(k));
                if ok {
                    let sum: f64 = idx.iter().map(|&k| self.values[k]).sum();
                    values.push(sum / 4.0);
                } else {
                    values.push(0.0);
                }
                valid.push(ok);
            }
        }
        InverseDepthMap {
            width: nw,
            height: nh,
            values,
            valid: Some(valid),
        }
    }
}
