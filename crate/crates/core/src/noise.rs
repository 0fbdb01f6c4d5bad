//! Convex noise model `ρe = F ρi + (1 − F)(a ρn1 + b ρn2)` and its fit.
//!
//! `ρn1 = I/4` is white noise from accidental coincidences and
//! `ρn2 = (|L↑R↓⟩⟨L↑R↓| + |L↓R↑⟩⟨L↓R↑|)/2` is full dephasing of the
//! coincidence sector. After the π/4 rotation neither contributes to
//! `⟨σz⊗σz⟩`, so the measured expectation is `F` times the ideal one.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measurement::{expectation_o, rotate_density};
use crate::slocc::{prepare_lr, PreparationSettings};
use crate::states::{ket_to_density, DensityMatrix4};

pub const DEFAULT_VISIBILITY: f64 = 0.977;
pub const DEFAULT_WHITE_WEIGHT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Probability of the ideal state.
    #[serde(rename = "F")]
    pub f: f64,
    /// White-noise weight.
    pub a: f64,
    /// Dephasing weight, `1 − a`.
    pub b: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::new(DEFAULT_VISIBILITY, DEFAULT_WHITE_WEIGHT).expect("valid defaults")
    }
}

impl NoiseModel {
    /// Model with `b = 1 − a`.
    pub fn new(f: f64, a: f64) -> Result<Self> {
        let m = Self { f, a, b: 1.0 - a };
        m.validate()?;
        Ok(m)
    }

    pub fn ideal() -> Self {
        Self { f: 1.0, a: DEFAULT_WHITE_WEIGHT, b: 1.0 - DEFAULT_WHITE_WEIGHT }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("F", self.f), ("a", self.a), ("b", self.b)] {
            if !(0.0..=1.0).contains(&v) {
                return invalid(format!("noise parameter {name} = {v} outside [0, 1]"));
            }
        }
        if (self.a + self.b - 1.0).abs() > 1e-12 {
            return invalid(format!("a + b = {} differs from 1", self.a + self.b));
        }
        Ok(())
    }
}

fn real_diag(d: [f64; 4]) -> Matrix4<Complex64> {
    Matrix4::from_diagonal(&Vector4::from(d.map(|x| Complex64::new(x, 0.0))))
}

/// White-noise component `I/4`.
pub fn white_noise() -> DensityMatrix4 {
    DensityMatrix4::from_matrix_unchecked(real_diag([0.25; 4]))
}

/// Dephasing component `diag(0, 1, 1, 0)/2`.
pub fn dephasing_noise() -> DensityMatrix4 {
    DensityMatrix4::from_matrix_unchecked(real_diag([0.0, 0.5, 0.5, 0.0]))
}

pub fn noisy_state(ideal: &DensityMatrix4, model: &NoiseModel) -> Result<DensityMatrix4> {
    model.validate()?;
    if model.f == 1.0 {
        return Ok(*ideal);
    }
    let noise = white_noise().matrix().scale(model.a) + dephasing_noise().matrix().scale(model.b);
    let m = ideal.matrix().scale(model.f) + noise.scale(1.0 - model.f);
    Ok(DensityMatrix4::from_matrix_unchecked(m))
}

/// Rotated noisy expectation, checked against `F` times the rotated ideal one.
pub fn noisy_expectation_scaling(ideal: &DensityMatrix4, model: &NoiseModel) -> Result<f64> {
    let noisy = expectation_o(&rotate_density(&noisy_state(ideal, model)?))?;
    let clean = expectation_o(&rotate_density(ideal))?;
    let dev = (noisy - model.f * clean).abs();
    if dev > 1e-12 {
        return Err(Error::Invariant(format!(
            "noisy expectation {noisy} deviates from F·ideal = {} by {dev:e}",
            model.f * clean
        )));
    }
    Ok(noisy)
}

fn frob_inner(x: &Matrix4<Complex64>, y: &Matrix4<Complex64>) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Least-squares fit of `(F, a)` to tomographic reconstructions.
///
/// Minimizes `Σ ‖ρ_rec − noisy_state(ρ_ideal(settings), (F, a))‖²_F` over
/// `F, a ∈ [0, 1]`. In the variables `s = F`, `t = (1 − F) a` the model is
/// linear, `ρ = ρn2 + s (ρi − ρn2) + t (ρn1 − ρn2)`, and the box becomes the
/// triangle `s, t ≥ 0`, `s + t ≤ 1`, so the problem is a convex quadratic.
/// When the fit lands on `F = 1` the split `a` is unobservable and the default
/// is returned.
pub fn fit_noise(reconstructions: &[(DensityMatrix4, PreparationSettings)]) -> Result<NoiseModel> {
    if reconstructions.is_empty() {
        return invalid("fit_noise needs reconstructions");
    }
    if reconstructions.len() < 2 {
        return invalid("fit_noise needs at least two reconstructions");
    }
    let n1 = *white_noise().matrix();
    let n2 = *dephasing_noise().matrix();
    let b_dir = n1 - n2;
    let (mut gaa, mut gab, mut gbb, mut ha, mut hb) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (rho, settings) in reconstructions {
        let ideal = ket_to_density(&prepare_lr(settings))?;
        let a_dir = ideal.matrix() - n2;
        let resid = rho.matrix() - n2;
        gaa += frob_inner(&a_dir, &a_dir);
        gab += frob_inner(&a_dir, &b_dir);
        gbb += frob_inner(&b_dir, &b_dir);
        ha += frob_inner(&a_dir, &resid);
        hb += frob_inner(&b_dir, &resid);
    }
    let det = gaa * gbb - gab * gab;
    if gaa <= 1e-12 || det <= 1e-12 * gaa * gbb {
        return Err(Error::AmbiguousFit(format!(
            "objective is flat along F (gram determinant {det:e})"
        )));
    }
    // Q(s,t) up to a constant: s²gaa + 2st·gab + t²gbb − 2s·ha − 2t·hb
    let q = |s: f64, t: f64| s * s * gaa + 2.0 * s * t * gab + t * t * gbb - 2.0 * s * ha - 2.0 * t * hb;
    let feasible = |s: f64, t: f64| s >= 0.0 && t >= 0.0 && s + t <= 1.0;

    let s_free = (gbb * ha - gab * hb) / det;
    let t_free = (gaa * hb - gab * ha) / det;
    let (s, t) = if feasible(s_free, t_free) {
        (s_free, t_free)
    } else {
        let edges = [
            // t = 0, s ∈ [0, 1]
            ((ha / gaa).clamp(0.0, 1.0), 0.0),
            // s = 0, t ∈ [0, 1]
            (0.0, (hb / gbb).clamp(0.0, 1.0)),
            // t = 1 − s: minimize over s ∈ [0, 1]
            {
                let curv = gaa - 2.0 * gab + gbb;
                let slope = ha - hb - gab + gbb;
                let s = if curv > 0.0 { (slope / curv).clamp(0.0, 1.0) } else { 0.0 };
                (s, 1.0 - s)
            },
        ];
        edges
            .into_iter()
            .min_by(|x, y| q(x.0, x.1).total_cmp(&q(y.0, y.1)))
            .expect("three candidates")
    };
    let a = if 1.0 - s > 1e-12 {
        (t / (1.0 - s)).clamp(0.0, 1.0)
    } else {
        DEFAULT_WHITE_WEIGHT
    };
    NoiseModel::new(s.clamp(0.0, 1.0), a)
}
