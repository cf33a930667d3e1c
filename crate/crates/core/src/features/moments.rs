//! Image moments: central moment table, the seven Hu invariants and the
//! squared distance between invariant vectors.

use crate::error::{Error, Result};
use crate::imgproc::Plane;

/// Central moments of a plane up to order 3, about the intensity centroid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralMoments {
    /// Total mass (the raw moment m00).
    pub mu00: f64,
    pub mu11: f64,
    pub mu20: f64,
    pub mu02: f64,
    pub mu21: f64,
    pub mu12: f64,
    pub mu30: f64,
    pub mu03: f64,
    /// Intensity centroid (x, y).
    pub centroid: (f64, f64),
}

/// The seven Hu invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HuVector {
    pub phi: [f64; 7],
}

impl HuVector {
    /// Signed-log rescaling `sign(phi) * log10|phi|` with zero mapped to
    /// zero; balances the invariants' wildly different magnitudes.
    pub fn signed_log(&self) -> HuVector {
        let phi = self.phi.map(|v| {
            if v == 0.0 {
                0.0
            } else {
                v.signum() * v.abs().log10()
            }
        });
        HuVector { phi }
    }
}

/// Computes raw and central moments with x as the column coordinate and y
/// as the row coordinate. Planes with nonpositive total mass are rejected.
pub fn central_moments(plane: &Plane) -> Result<CentralMoments> {
    let (w, h) = (plane.width(), plane.height());
    let mut m00 = 0.0;
    let mut m10 = 0.0;
    let mut m01 = 0.0;
    for y in 0..h {
        for x in 0..w {
            let v = plane.get(x, y);
            m00 += v;
            m10 += x as f64 * v;
            m01 += y as f64 * v;
        }
    }
    if !(m00 > 0.0) {
        return Err(Error::DegenerateInput(format!(
            "plane has nonpositive total mass {m00}"
        )));
    }
    let cx = m10 / m00;
    let cy = m01 / m00;

    let mut mu = [[0.0f64; 4]; 4];
    for y in 0..h {
        for x in 0..w {
            let v = plane.get(x, y);
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            let dx2 = dx * dx;
            let dy2 = dy * dy;
            mu[1][1] += dx * dy * v;
            mu[2][0] += dx2 * v;
            mu[0][2] += dy2 * v;
            mu[2][1] += dx2 * dy * v;
            mu[1][2] += dx * dy2 * v;
            mu[3][0] += dx2 * dx * v;
            mu[0][3] += dy2 * dy * v;
        }
    }
    Ok(CentralMoments {
        mu00: m00,
        mu11: mu[1][1],
        mu20: mu[2][0],
        mu02: mu[0][2],
        mu21: mu[2][1],
        mu12: mu[1][2],
        mu30: mu[3][0],
        mu03: mu[0][3],
        centroid: (cx, cy),
    })
}

/// The seven Hu invariants from scale-normalized central moments
/// `eta_pq = mu_pq / mu00^(1 + (p+q)/2)`.
pub fn hu_moments(plane: &Plane) -> Result<HuVector> {
    let m = central_moments(plane)?;
    Ok(hu_from_moments(&m))
}

/// Hu invariants from a precomputed moment table.
pub fn hu_from_moments(m: &CentralMoments) -> HuVector {
    let n2 = m.mu00.powf(2.0);
    let n3 = m.mu00.powf(2.5);
    let e20 = m.mu20 / n2;
    let e02 = m.mu02 / n2;
    let e11 = m.mu11 / n2;
    let e30 = m.mu30 / n3;
    let e03 = m.mu03 / n3;
    let e21 = m.mu21 / n3;
    let e12 = m.mu12 / n3;

    let p1 = e30 + e12;
    let p2 = e21 + e03;
    let q1 = e30 - 3.0 * e12;
    let q2 = 3.0 * e21 - e03;

    let phi = [
        e20 + e02,
        (e20 - e02) * (e20 - e02) + 4.0 * e11 * e11,
        q1 * q1 + q2 * q2,
        p1 * p1 + p2 * p2,
        q1 * p1 * (p1 * p1 - 3.0 * p2 * p2) + q2 * p2 * (3.0 * p1 * p1 - p2 * p2),
        (e20 - e02) * (p1 * p1 - p2 * p2) + 4.0 * e11 * p1 * p2,
        q2 * p1 * (p1 * p1 - 3.0 * p2 * p2) - q1 * p2 * (3.0 * p1 * p1 - p2 * p2),
    ];
    HuVector { phi }
}

/// Squared Euclidean distance between two invariant vectors:
/// `sum_i (a_i - b_i)^2`.
pub fn moment_distance(a: &HuVector, b: &HuVector) -> f64 {
    a.phi
        .iter()
        .zip(&b.phi)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Brute-force oracle: raw moments by double sum, central moments via
    /// the binomial expansion formulas rather than direct centered sums.
    fn oracle_moments(plane: &Plane) -> CentralMoments {
        let raw = |p: u32, q: u32| -> f64 {
            let mut acc = 0.0;
            for y in 0..plane.height() {
                for x in 0..plane.width() {
                    acc += (x as f64).powi(p as i32) * (y as f64).powi(q as i32) * plane.get(x, y);
                }
            }
            acc
        };
        let m00 = raw(0, 0);
        let cx = raw(1, 0) / m00;
        let cy = raw(0, 1) / m00;
        let m10 = raw(1, 0);
        let m01 = raw(0, 1);
        let m11 = raw(1, 1);
        let m20 = raw(2, 0);
        let m02 = raw(0, 2);
        let m21 = raw(2, 1);
        let m12 = raw(1, 2);
        let m30 = raw(3, 0);
        let m03 = raw(0, 3);
        CentralMoments {
            mu00: m00,
            mu11: m11 - cx * m01,
            mu20: m20 - cx * m10,
            mu02: m02 - cy * m01,
            mu21: m21 - 2.0 * cx * m11 - cy * m20 + 2.0 * cx * cx * m01,
            mu12: m12 - 2.0 * cy * m11 - cx * m02 + 2.0 * cy * cy * m10,
            mu30: m30 - 3.0 * cx * m20 + 2.0 * cx * cx * m10,
            mu03: m03 - 3.0 * cy * m02 + 2.0 * cy * cy * m01,
            centroid: (cx, cy),
        }
    }

    fn pseudo_plane(w: usize, h: usize, seed: u64) -> Plane {
        Plane::from_fn(w, h, |x, y| {
            let k = (x as u64)
                .wrapping_mul(2654435761)
                .wrapping_add((y as u64).wrapping_mul(40503))
                .wrapping_add(seed.wrapping_mul(97));
            ((k % 1000) as f64) / 1000.0 + 0.01
        })
        .unwrap()
    }

    #[test]
    fn point_mass_has_zero_central_moments() {
        let mut p = Plane::filled(7, 7, 0.0).unwrap();
        p.set(3, 3, 1.0);
        let m = central_moments(&p).unwrap();
        assert_eq!(m.mu00, 1.0);
        assert_eq!(m.centroid, (3.0, 3.0));
        for v in [m.mu11, m.mu20, m.mu02, m.mu21, m.mu12, m.mu30, m.mu03] {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn two_point_mass_hand_sum() {
        // equal pixels at (0,0) and (2,0): centroid (1,0), mu20 = 2 v
        let v = 0.6;
        let mut p = Plane::filled(3, 1, 0.0).unwrap();
        p.set(0, 0, v);
        p.set(2, 0, v);
        let m = central_moments(&p).unwrap();
        assert_eq!(m.centroid, (1.0, 0.0));
        assert_abs_diff_eq!(m.mu20, 2.0 * v, epsilon = 1e-15);
        assert_abs_diff_eq!(m.mu02, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_mass_plane_is_degenerate() {
        let p = Plane::filled(4, 4, 0.0).unwrap();
        assert!(matches!(
            central_moments(&p),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn moments_match_expansion_oracle() {
        for seed in 0..8 {
            let p = pseudo_plane(3, 3, seed);
            let got = central_moments(&p).unwrap();
            let want = oracle_moments(&p);
            assert_abs_diff_eq!(got.mu00, want.mu00, epsilon = 1e-12);
            assert_abs_diff_eq!(got.mu11, want.mu11, epsilon = 1e-12);
            assert_abs_diff_eq!(got.mu20, want.mu20, epsilon = 1e-12);
            assert_abs_diff_eq!(got.mu02, want.mu02, epsilon = 1e-12);
            assert_abs_diff_eq!(got.mu21, want.mu21, epsilon = 1e-11);
            assert_abs_diff_eq!(got.mu12, want.mu12, epsilon = 1e-11);
            assert_abs_diff_eq!(got.mu30, want.mu30, epsilon = 1e-11);
            assert_abs_diff_eq!(got.mu03, want.mu03, epsilon = 1e-11);
        }
    }

    #[test]
    fn single_pixel_hu_is_zero() {
        let mut p = Plane::filled(9, 9, 0.0).unwrap();
        p.set(4, 4, 1.0);
        let hu = hu_moments(&p).unwrap();
        for v in hu.phi {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn hu_matches_formula_oracle_on_random_planes() {
        for seed in 0..8 {
            let p = pseudo_plane(8, 8, seed);
            let got = hu_moments(&p).unwrap();
            let want = hu_from_moments(&oracle_moments(&p));
            for i in 0..7 {
                assert_abs_diff_eq!(got.phi[i], want.phi[i], epsilon = 1e-12);
            }
        }
    }

    fn rotate90(p: &Plane) -> Plane {
        let (w, h) = (p.width(), p.height());
        Plane::from_fn(h, w, |x, y| p.get(w - 1 - y, x)).unwrap()
    }

    #[test]
    fn hu_invariant_under_quarter_rotation() {
        let p = pseudo_plane(11, 11, 3);
        let a = hu_moments(&p).unwrap();
        let b = hu_moments(&rotate90(&p)).unwrap();
        for i in 0..7 {
            assert_abs_diff_eq!(a.phi[i], b.phi[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn moment_distance_identity_and_symmetry() {
        let a = HuVector {
            phi: [0.3, -0.2, 0.01, 0.0, 1e-5, -1e-7, 2e-9],
        };
        let b = HuVector {
            phi: [0.1, 0.4, -0.02, 0.3, 0.0, 1e-6, -1e-8],
        };
        assert_eq!(moment_distance(&a, &a), 0.0);
        assert_eq!(moment_distance(&a, &b), moment_distance(&b, &a));
        assert!(moment_distance(&a, &b) > 0.0);
    }

    #[test]
    fn moment_distance_unit_vectors() {
        let a = HuVector {
            phi: [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        };
        let b = HuVector {
            phi: [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        };
        assert_eq!(moment_distance(&a, &b), 2.0);
    }

    #[test]
    fn moment_distance_matches_scalar_loop() {
        let a = HuVector {
            phi: [0.5, -1.25, 3.0, 0.125, -0.75, 2.5, -0.0625],
        };
        let b = HuVector {
            phi: [-0.5, 0.25, 1.0, 0.625, 0.25, -1.5, 0.9375],
        };
        let mut want = 0.0;
        for i in 0..7 {
            want += (a.phi[i] - b.phi[i]) * (a.phi[i] - b.phi[i]);
        }
        assert_eq!(moment_distance(&a, &b), want);
    }

    #[test]
    fn signed_log_maps_zero_to_zero() {
        let a = HuVector {
            phi: [100.0, -0.01, 0.0, 1.0, -1.0, 1e-12, -1e12],
        };
        let t = a.signed_log();
        assert_eq!(t.phi[0], 2.0);
        // sign(-0.01) * log10(0.01) = (-1) * (-2)
        assert_eq!(t.phi[1], 2.0);
        assert_eq!(t.phi[2], 0.0);
        assert_eq!(t.phi[3], 0.0);
        assert_eq!(t.phi[4], 0.0);
        assert_abs_diff_eq!(t.phi[5], -12.0, epsilon = 1e-9);
        assert_abs_diff_eq!(t.phi[6], -12.0, epsilon = 1e-9);
    }
}
