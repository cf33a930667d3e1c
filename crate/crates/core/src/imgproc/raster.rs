//! Raster containers: RGB frames, scalar planes, binary masks and label maps.

use crate::error::{Error, Result};

/// An RGB video frame with its position in the sequence.
///
/// Channel values are reals in `[0, 1]`, stored row-major as `[r, g, b]`
/// triples.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    index: usize,
    width: usize,
    height: usize,
    rgb: Vec<[f64; 3]>,
}

impl Frame {
    /// Builds a frame from row-major RGB triples.
    ///
    /// Frames must be at least 3x3 and every channel value must lie in
    /// `[0, 1]`.
    pub fn new(index: usize, width: usize, height: usize, rgb: Vec<[f64; 3]>) -> Result<Frame> {
        if width < 3 || height < 3 {
            return Err(Error::InvalidInput(format!(
                "frame must be at least 3x3, got {width}x{height}"
            )));
        }
        if rgb.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "frame buffer holds {} pixels, expected {}",
                rgb.len(),
                width * height
            )));
        }
        for px in &rgb {
            for &c in px {
                if !(0.0..=1.0).contains(&c) {
                    return Err(Error::InvalidInput(format!(
                        "channel value {c} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(Frame {
            index,
            width,
            height,
            rgb,
        })
    }

    /// Builds a frame by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        index: usize,
        width: usize,
        height: usize,
        f: impl Fn(usize, usize) -> [f64; 3],
    ) -> Result<Frame> {
        let mut rgb = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                rgb.push(f(x, y));
            }
        }
        Frame::new(index, width, height, rgb)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        self.rgb[y * self.width + x]
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.rgb
    }
}

/// A single-channel raster of finite reals; the working type for all
/// filters, moments and scores.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl Plane {
    /// Wraps a row-major buffer. All values must be finite.
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Plane> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput("plane dimensions must be nonzero".into()));
        }
        if values.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "plane buffer holds {} values, expected {}",
                values.len(),
                width * height
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("plane contains non-finite values".into()));
        }
        Ok(Plane {
            width,
            height,
            values,
        })
    }

    /// A plane filled with a single value.
    pub fn filled(width: usize, height: usize, value: f64) -> Result<Plane> {
        Plane::new(width, height, vec![value; width * height])
    }

    /// Builds a plane by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Plane> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Plane::new(width, height, values)
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

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.values[y * self.width + x] = v;
    }

    /// Reads with reflect padding: out-of-range coordinates mirror back into
    /// the raster (`d c b a | a b c d | d c b a`).
    #[inline]
    pub fn get_reflect(&self, x: i64, y: i64) -> f64 {
        let rx = reflect_index(x, self.width);
        let ry = reflect_index(y, self.height);
        self.values[ry * self.width + rx]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in &self.values {
            min = min.min(v);
            max = max.max(v);
        }
        (min, max)
    }

    /// Arithmetic mean over all pixels, accumulated in raster order.
    pub fn mean(&self) -> f64 {
        let sum: f64 = self.values.iter().sum();
        sum / self.values.len() as f64
    }
}

/// Mirror an index back into `0..size` (reflect padding).
#[inline]
pub(crate) fn reflect_index(i: i64, size: usize) -> usize {
    let s = size as i64;
    if i < 0 {
        ((-i - 1).rem_euclid(s)) as usize
    } else if i >= s {
        ((2 * s - i - 1).rem_euclid(s)) as usize
    } else {
        i as usize
    }
}

/// Color-opponent decomposition of a frame; all three planes share the
/// source dimensions.
#[derive(Debug, Clone)]
pub struct CocImage {
    pub o1: Plane,
    pub o2: Plane,
    pub o3: Plane,
}

/// A per-pixel boolean raster: edges, regions, IoU operands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<BinaryMask> {
        if bits.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "mask buffer holds {} bits, expected {}",
                bits.len(),
                width * height
            )));
        }
        Ok(BinaryMask {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: usize, height: usize) -> BinaryMask {
        BinaryMask {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> BinaryMask {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        BinaryMask {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of foreground pixels.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }
}

/// Per-pixel component labels; 0 is background, components are numbered
/// from 1 in order of first raster-scan encounter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    count: usize,
}

impl LabelMap {
    pub(crate) fn new(width: usize, height: usize, labels: Vec<u32>, count: usize) -> LabelMap {
        LabelMap {
            width,
            height,
            labels,
            count,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Number of components (the maximum label).
    pub fn count(&self) -> usize {
        self.count
    }

    /// Pixel count of every component, indexed by `label - 1`.
    pub fn component_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.count];
        for &l in &self.labels {
            if l > 0 {
                sizes[(l - 1) as usize] += 1;
            }
        }
        sizes
    }

    /// Mask of the pixels carrying the given label.
    pub fn component_mask(&self, label: u32) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.labels.iter().map(|&l| l == label).collect(),
        }
    }
}
