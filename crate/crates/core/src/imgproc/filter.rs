//! Color conversion, smoothing, gradients and intensity rescaling.
//!
//! Every convolution uses reflect padding so frame borders do not fabricate
//! edges, and accumulates in fixed raster order so results are
//! bit-deterministic.

use crate::error::{Error, Result};
use crate::imgproc::raster::{CocImage, Frame, Plane};

/// Rec. 601 luma weights.
const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

/// Default color-opponent basis: O1 = (R-G)/sqrt(2), O2 = (R+G-2B)/sqrt(6),
/// O3 = (R+G+B)/sqrt(3). Rows are the channel coefficients.
pub const COC_BASIS: [[f64; 3]; 3] = [
    [std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2, 0.0],
    [0.4082482904638631, 0.4082482904638631, -0.8164965809277261],
    [0.5773502691896258, 0.5773502691896258, 0.5773502691896258],
];

/// Per-pixel luminance `0.299 R + 0.587 G + 0.114 B`.
pub fn to_grayscale(frame: &Frame) -> Plane {
    let values = frame
        .pixels()
        .iter()
        .map(|&[r, g, b]| LUMA[0] * r + LUMA[1] * g + LUMA[2] * b)
        .collect();
    Plane::new(frame.width(), frame.height(), values).expect("frame dimensions are valid")
}

/// Converts a frame to the default color-opponent space.
pub fn rgb_to_coc(frame: &Frame) -> CocImage {
    rgb_to_coc_with(frame, &COC_BASIS)
}

/// Converts a frame with a caller-supplied 3x3 opponent basis.
pub fn rgb_to_coc_with(frame: &Frame, basis: &[[f64; 3]; 3]) -> CocImage {
    let (w, h) = (frame.width(), frame.height());
    let mut planes: [Vec<f64>; 3] = [
        Vec::with_capacity(w * h),
        Vec::with_capacity(w * h),
        Vec::with_capacity(w * h),
    ];
    for &[r, g, b] in frame.pixels() {
        for (k, row) in basis.iter().enumerate() {
            planes[k].push(row[0] * r + row[1] * g + row[2] * b);
        }
    }
    let [v1, v2, v3] = planes;
    CocImage {
        o1: Plane::new(w, h, v1).expect("frame dimensions are valid"),
        o2: Plane::new(w, h, v2).expect("frame dimensions are valid"),
        o3: Plane::new(w, h, v3).expect("frame dimensions are valid"),
    }
}

/// Normalized 1-D Gaussian taps at offsets `-r..=r` with `r = ceil(3 sigma)`.
pub(crate) fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

/// Separable Gaussian smoothing with kernel size `2 ceil(3 sigma) + 1` and
/// reflect padding; output dimensions match the input.
pub fn gaussian_smooth(plane: &Plane, sigma: f64) -> Result<Plane> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gaussian sigma must be positive, got {sigma}"
        )));
    }
    let taps = gaussian_kernel(sigma);
    let radius = (taps.len() / 2) as i64;
    let (w, h) = (plane.width(), plane.height());

    // horizontal pass
    let mut horiz = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, &t) in taps.iter().enumerate() {
                acc += t * plane.get_reflect(x as i64 + i as i64 - radius, y as i64);
            }
            horiz[y * w + x] = acc;
        }
    }
    let horiz = Plane::new(w, h, horiz)?;

    // vertical pass
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, &t) in taps.iter().enumerate() {
                acc += t * horiz.get_reflect(x as i64, y as i64 + i as i64 - radius);
            }
            out[y * w + x] = acc;
        }
    }
    Plane::new(w, h, out)
}

const SOBEL_X: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
const SOBEL_Y: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];

/// Horizontal and vertical Sobel responses (3x3 correlation, reflect padding).
pub fn sobel_gradients(plane: &Plane) -> Result<(Plane, Plane)> {
    if plane.width() < 3 || plane.height() < 3 {
        return Err(Error::InvalidInput(format!(
            "sobel needs at least 3x3, got {}x{}",
            plane.width(),
            plane.height()
        )));
    }
    let (w, h) = (plane.width(), plane.height());
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut ax = 0.0;
            let mut ay = 0.0;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let v = plane.get_reflect(x as i64 + dx, y as i64 + dy);
                    ax += SOBEL_X[(dy + 1) as usize][(dx + 1) as usize] * v;
                    ay += SOBEL_Y[(dy + 1) as usize][(dx + 1) as usize] * v;
                }
            }
            gx[y * w + x] = ax;
            gy[y * w + x] = ay;
        }
    }
    Ok((Plane::new(w, h, gx)?, Plane::new(w, h, gy)?))
}

/// Per-pixel `sqrt(sx^2 + sy^2)`.
pub fn gradient_magnitude(sx: &Plane, sy: &Plane) -> Result<Plane> {
    if sx.width() != sy.width() || sx.height() != sy.height() {
        return Err(Error::InvalidInput(format!(
            "gradient planes differ: {}x{} vs {}x{}",
            sx.width(),
            sx.height(),
            sy.width(),
            sy.height()
        )));
    }
    let values = sx
        .values()
        .iter()
        .zip(sy.values())
        .map(|(&a, &b)| (a * a + b * b).sqrt())
        .collect();
    Plane::new(sx.width(), sx.height(), values)
}

/// Affine rescale of `[min, max]` onto `[0, 255]`. A constant plane maps to
/// all zeros so that degenerate inputs stay edge-free.
pub fn normalize_to_u8(plane: &Plane) -> Plane {
    let (min, max) = plane.min_max();
    let values = if max == min {
        vec![0.0; plane.values().len()]
    } else {
        // quotient form so min and max land on exactly 0 and 255
        let range = max - min;
        plane
            .values()
            .iter()
            .map(|&v| (v - min) / range * 255.0)
            .collect()
    };
    Plane::new(plane.width(), plane.height(), values).expect("dimensions unchanged")
}

/// Otsu threshold of a 256-bin histogram over `[0, max]`.
///
/// Returns the lower edge of the first bin above the optimal split, in the
/// plane's own units. A constant plane yields 0.
pub fn otsu_threshold(plane: &Plane) -> f64 {
    let (min, max) = plane.min_max();
    if max == min {
        return 0.0;
    }
    // histogram over [0, max]; planes fed here (gradient magnitudes) are nonnegative
    let mut hist = [0u64; 256];
    for &v in plane.values() {
        let bin = ((v / max * 256.0) as usize).min(255);
        hist[bin] += 1;
    }
    let total = plane.values().len() as f64;
    let sum_all: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum();

    let mut w0 = 0.0;
    let mut sum0 = 0.0;
    let mut best_t = 0usize;
    let mut best_var = -1.0;
    for t in 0..255 {
        w0 += hist[t] as f64;
        if w0 == 0.0 {
            continue;
        }
        let w1 = total - w0;
        if w1 == 0.0 {
            break;
        }
        sum0 += t as f64 * hist[t] as f64;
        let m0 = sum0 / w0;
        let m1 = (sum_all - sum0) / w1;
        let var = w0 * w1 * (m0 - m1) * (m0 - m1);
        if var > best_var {
            best_var = var;
            best_t = t;
        }
    }
    (best_t as f64 + 1.0) * max / 256.0
}

/// Area-averaging resample to the given dimensions.
///
/// Each output pixel integrates the source box it covers, with fractional
/// source pixels weighted by their overlap, so constants are preserved
/// exactly and downsampling acts as a proper box filter.
pub fn resize_area(plane: &Plane, new_w: usize, new_h: usize) -> Result<Plane> {
    if new_w == 0 || new_h == 0 {
        return Err(Error::InvalidParameter("resize target must be nonzero".into()));
    }
    let (w, h) = (plane.width(), plane.height());
    let rx = w as f64 / new_w as f64;
    let ry = h as f64 / new_h as f64;
    let mut out = Vec::with_capacity(new_w * new_h);
    for j in 0..new_h {
        let y0 = j as f64 * ry;
        let y1 = ((j + 1) as f64 * ry).min(h as f64);
        let sy0 = y0.floor() as usize;
        let sy1 = (y1.ceil() as usize).min(h);
        for i in 0..new_w {
            let x0 = i as f64 * rx;
            let x1 = ((i + 1) as f64 * rx).min(w as f64);
            let sx0 = x0.floor() as usize;
            let sx1 = (x1.ceil() as usize).min(w);
            let mut acc = 0.0;
            let mut area = 0.0;
            for sy in sy0..sy1 {
                let wy = (y1.min((sy + 1) as f64) - y0.max(sy as f64)).max(0.0);
                for sx in sx0..sx1 {
                    let wx = (x1.min((sx + 1) as f64) - x0.max(sx as f64)).max(0.0);
                    let wgt = wx * wy;
                    acc += wgt * plane.get(sx, sy);
                    area += wgt;
                }
            }
            out.push(acc / area);
        }
    }
    Plane::new(new_w, new_h, out)
}
