//! Tilted-plate phase adjustment: displacement `x` of the movable plate to
//! injected relative phase.
//!
//! The plate of thickness `d` rotates about a radius `r`, so `sin θi = x / r`.
//! Snell's law `n0 sin θi = n sin θr` gives the refraction angle and the extra
//! optical path yields
//! `φ = (2π/λ)·n·d·(1/√(1 − (n0 x / (n r))²) − 1)`.
//! Phases are zeroed at normal incidence (`φ(0) = 0`).

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateGeometry {
    /// Plate thickness, meters.
    pub d: f64,
    /// Plate refractive index.
    pub n: f64,
    /// Ambient refractive index.
    pub n0: f64,
    /// Rotation radius, meters.
    pub r: f64,
    /// Photon wavelength, meters.
    pub lambda: f64,
}

impl Default for PlateGeometry {
    /// Fitted experimental geometry with degenerate 800 nm down-converted photons.
    fn default() -> Self {
        Self { d: 199.94e-6, n: 1.5, n0: 1.0, r: 102.36e-3, lambda: 800e-9 }
    }
}

impl PlateGeometry {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.d, self.n, self.n0, self.r, self.lambda]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.d <= 0.0 || self.r <= 0.0 || self.lambda <= 0.0 {
            return invalid(format!("plate geometry {self:?} needs positive d, r, lambda"));
        }
        if !(self.n > self.n0 && self.n0 >= 1.0) {
            return invalid(format!("plate indices need n > n0 ≥ 1 (n = {}, n0 = {})", self.n, self.n0));
        }
        Ok(())
    }

    /// Displacements with `|x|` at or above this have no refracted solution.
    pub fn domain_limit(&self) -> f64 {
        self.r * self.n / self.n0
    }

    fn phase_scale(&self) -> f64 {
        TAU / self.lambda * self.n * self.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlatePhase {
    pub unwrapped: f64,
    /// Reflected into `[0, π]`.
    pub wrapped: f64,
    /// `|x| > r/2`, outside the small-angle regime where `x ≈ r sin θi` holds.
    pub beyond_small_angle: bool,
}

/// Reflects a phase into `[0, π]` using `φ ≡ −φ` and 2π periodicity.
pub fn wrap_to_half_turn(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w > PI {
        TAU - w
    } else {
        w
    }
}

pub fn phase_from_displacement(x: f64, geom: &PlateGeometry) -> Result<PlatePhase> {
    geom.validate()?;
    let limit = geom.domain_limit();
    if !x.is_finite() || x.abs() >= limit {
        return Err(Error::PlateDomain { x, limit });
    }
    let ratio = geom.n0 * x / (geom.n * geom.r);
    let unwrapped = geom.phase_scale() * (1.0 / (1.0 - ratio * ratio).sqrt() - 1.0);
    Ok(PlatePhase {
        unwrapped,
        wrapped: wrap_to_half_turn(unwrapped),
        beyond_small_angle: x.abs() > 0.5 * geom.r,
    })
}

/// Same phase computed step by step through the refraction angle.
pub fn phase_via_snell(x: f64, geom: &PlateGeometry) -> Result<f64> {
    geom.validate()?;
    let limit = geom.domain_limit();
    if !x.is_finite() || x.abs() >= limit {
        return Err(Error::PlateDomain { x, limit });
    }
    let sin_incidence = x / geom.r;
    let sin_refraction = geom.n0 * sin_incidence / geom.n;
    let cos_refraction = (1.0 - sin_refraction * sin_refraction).sqrt();
    // path inside the tilted plate d / cos θr versus d at normal incidence
    let extra_path = geom.n * geom.d * (1.0 / cos_refraction - 1.0);
    Ok(TAU * extra_path / geom.lambda)
}

/// Non-negative displacement producing the unwrapped phase `phi_raw ≥ 0`.
pub fn displacement_from_phase(phi_raw: f64, geom: &PlateGeometry) -> Result<f64> {
    geom.validate()?;
    if !(phi_raw >= 0.0) || !phi_raw.is_finite() {
        return invalid(format!("phase {phi_raw} must be finite and non-negative"));
    }
    let g = 1.0 + phi_raw / geom.phase_scale();
    Ok(geom.domain_limit() * (1.0 - 1.0 / (g * g)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn geom() -> PlateGeometry {
        PlateGeometry::default()
    }

    /// Bisection on the closed form, independent of the algebraic inverse.
    fn bisect_displacement(target: f64, g: &PlateGeometry) -> f64 {
        let (mut lo, mut hi) = (0.0, 0.5 * g.r);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phase_from_displacement(mid, g).unwrap().unwrapped < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn zero_displacement_zero_phase() {
        let p = phase_from_displacement(0.0, &geom()).unwrap();
        assert_eq!(p.unwrapped, 0.0);
        assert_eq!(p.wrapped, 0.0);
        assert_eq!(displacement_from_phase(0.0, &geom()).unwrap(), 0.0);
    }

    #[test]
    fn half_turn_displacement() {
        let g = geom();
        let x_oracle = bisect_displacement(PI, &g);
        let x = displacement_from_phase(PI, &g).unwrap();
        assert_abs_diff_eq!(x, x_oracle, epsilon = 1e-12);
        let back = phase_from_displacement(x, &g).unwrap().unwrapped;
        assert_abs_diff_eq!(back, PI, epsilon = 1e-9);
        // about 7.9 mm, within the few-millimetre span of the calibration curve
        assert!(x > 5e-3 && x < 12e-3, "x = {x}");
    }

    #[test]
    fn snell_path_agrees_with_closed_form() {
        let g = geom();
        for i in 0..=400 {
            let x = -0.05 + 1e-4 * i as f64;
            let a = phase_from_displacement(x, &g).unwrap().unwrapped;
            let b = phase_via_snell(x, &g).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{x}: {a} vs {b}");
        }
    }

    #[test]
    fn even_and_strictly_increasing() {
        let g = geom();
        let mut prev = 0.0;
        for i in 1..=4000 {
            let x = 1e-5 * i as f64;
            let p = phase_from_displacement(x, &g).unwrap().unwrapped;
            assert!(p > prev);
            let m = phase_from_displacement(-x, &g).unwrap().unwrapped;
            assert_eq!(p, m);
            prev = p;
        }
    }

    #[test]
    fn domain_and_geometry_errors() {
        let g = geom();
        assert!(matches!(
            phase_from_displacement(g.r * g.n, &g),
            Err(Error::PlateDomain { .. })
        ));
        assert!(phase_from_displacement(f64::NAN, &g).is_err());
        assert!(phase_from_displacement(0.6 * g.r, &g).unwrap().beyond_small_angle);
        assert!(!phase_from_displacement(0.4 * g.r, &g).unwrap().beyond_small_angle);
        let bad = PlateGeometry { n: 0.9, ..g };
        assert!(phase_from_displacement(0.0, &bad).is_err());
        let bad = PlateGeometry { d: 0.0, ..g };
        assert!(bad.validate().is_err());
        assert!(displacement_from_phase(-0.1, &g).is_err());
    }

    #[test]
    fn wrapping_reflects() {
        assert_abs_diff_eq!(wrap_to_half_turn(1.5 * PI), 0.5 * PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_to_half_turn(2.0 * PI + 0.3), 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(wrap_to_half_turn(PI), PI);
    }

    proptest! {
        #[test]
        fn inverse_round_trip(phi in 0.0..(4.0 * PI)) {
            let g = geom();
            let x = displacement_from_phase(phi, &g).unwrap();
            let p = phase_from_displacement(x, &g).unwrap();
            prop_assert!((p.unwrapped - phi).abs() <= 1e-9);
            prop_assert!((0.0..=PI).contains(&p.wrapped));
        }
    }
}
