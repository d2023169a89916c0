//! Correlator region of energy-restricted prepare-and-measure models
//! without entanglement.
//!
//! In the rotated coordinates `x = E0 + E1`, `y = E0 - E1` the region is the
//! convex hull of `(+-2, 0)` and the axis-aligned ellipse with semi-axes
//! `2|gamma|` and `2 sqrt(1 - gamma^2)`, `gamma = 2 omega - 1`. Its upper
//! boundary is the ellipse arc between the two tangent points seen from
//! `(+-2, 0)`, closed by straight segments.

use crate::error::{Error, Result};
use crate::quantum::EnergyBound;

/// Upper boundary `y <= h(x)` of the hull (the region is symmetric in `y`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PmHull {
    /// Semi-axis along `x = E0 + E1`.
    pub a: f64,
    /// Semi-axis along `y = E0 - E1`.
    pub b: f64,
}

/// Hull profile at energy `omega` (energies above 1/2 behave as 1/2).
pub fn pm_hull_profile(omega: EnergyBound) -> PmHull {
    let gamma = 2.0 * omega.value().min(0.5) - 1.0;
    PmHull {
        a: 2.0 * gamma.abs(),
        b: 2.0 * (1.0 - gamma * gamma).max(0.0).sqrt(),
    }
}

impl PmHull {
    /// Half-height of the region at `x`; negative outside `[-2, 2]`.
    pub fn height(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax > 2.0 {
            return -1.0;
        }
        let x_t = self.a * self.a / 2.0;
        if ax <= x_t && self.a > 0.0 {
            self.b * (1.0 - (ax / self.a).powi(2)).max(0.0).sqrt()
        } else if x_t >= 2.0 {
            0.0
        } else {
            let y_t = self.b * (1.0 - self.a * self.a / 4.0).max(0.0).sqrt();
            y_t * (2.0 - ax) / (2.0 - x_t)
        }
    }

    /// `h(x) - |y|`, nonnegative inside the region.
    pub fn margin(&self, e0: f64, e1: f64) -> f64 {
        self.height(e0 + e1) - (e0 - e1).abs()
    }
}

/// Extreme values `(E1_max, E1_min)` compatible with `E0 = e0` in the
/// prepare-and-measure region at energy `omega`.
pub fn pm_ellipse_max_correlator(omega: EnergyBound, e0: f64) -> Result<(f64, f64)> {
    if !(e0.abs() <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "|E0| must be at most 1, got {e0}"
        )));
    }
    let hull = pm_hull_profile(omega);
    Ok((hull.e1_max(e0), -hull.e1_max(-e0)))
}

impl PmHull {
    /// Largest `E1` on the vertical line `E0 = e0`.
    ///
    /// The closing segments from `(+-2, 0)` to the tangent points have unit
    /// slope and lie on `E0 = +-1`; the upper tangent point touches `E1 = 1`
    /// at `x = a^2 / 2`. To the right of it `E1 = 1` is reachable, to the left
    /// the lower ellipse arc `x - 2 e0 = b sqrt(1 - x^2 / a^2)` binds.
    fn e1_max(&self, e0: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        if b == 0.0 {
            return e0;
        }
        let x_t = a * a / 2.0;
        if a == 0.0 || 1.0 + e0 >= x_t {
            return 1.0;
        }
        // (x - 2 e0)^2 = b^2 (1 - x^2 / a^2), larger root. With a^2 + b^2 = 4
        // the discriminant reduces to (4 b / a)^2 (1 - e0^2).
        let k = 1.0 + b * b / (a * a);
        let x = (4.0 * e0 + 4.0 * b / a * (1.0 - e0 * e0).max(0.0).sqrt()) / (2.0 * k);
        (x - e0).min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn om(w: f64) -> EnergyBound {
        EnergyBound::new(w).unwrap()
    }

    #[test]
    fn vertex_and_threshold() {
        let (hi, lo) = pm_ellipse_max_correlator(om(0.2), 1.0).unwrap();
        assert_eq!(hi, 1.0);
        // the closing segments run along E0 = +-1 down to the tangent point
        let h = pm_hull_profile(om(0.2));
        let x_t = h.a * h.a / 2.0;
        assert!((lo - (x_t - h.height(x_t)) / 2.0).abs() < 1e-9);
        let (hi, lo) = pm_ellipse_max_correlator(om(0.5), 0.0).unwrap();
        assert!((hi - 1.0).abs() < 1e-12 && (lo + 1.0).abs() < 1e-12);
        assert!(pm_ellipse_max_correlator(om(0.2), 1.5).is_err());
    }

    #[test]
    fn zero_energy_collapses_to_diagonal() {
        for e0 in [-0.7, 0.0, 0.4] {
            let (hi, lo) = pm_ellipse_max_correlator(om(0.0), e0).unwrap();
            assert!((hi - e0).abs() < 1e-12 && (lo - e0).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_points_lie_on_boundary() {
        let hull = pm_hull_profile(om(0.2));
        for i in 0..=20 {
            let e0 = -1.0 + i as f64 * 0.1;
            let (hi, lo) = pm_ellipse_max_correlator(om(0.2), e0).unwrap();
            for t in [hi, lo] {
                if t.abs() < 1.0 {
                    assert!(hull.margin(e0, t).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn tangent_points_are_on_the_ellipse() {
        let h = pm_hull_profile(om(0.2));
        let x_t = h.a * h.a / 2.0;
        let y = h.height(x_t);
        assert!(((x_t / h.a).powi(2) + (y / h.b).powi(2) - 1.0).abs() < 1e-12);
        // the segment direction matches the ellipse slope at the tangent point
        let slope_seg = -y / (2.0 - x_t);
        let slope_ell = -(h.b * h.b * x_t) / (h.a * h.a * y);
        assert!((slope_seg - slope_ell).abs() < 1e-12);
    }
}
