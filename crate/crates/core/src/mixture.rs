//! Classical mixtures of two particle types with known exchange phases.

use std::f64::consts::FRAC_PI_2;

use crate::error::{invalid, Error, Result};
use crate::measurement::{
    check_visibility, estimate_o, sin_2beta_checked, std_dev, Bootstrap, CoincidenceCounts,
    MIN_BOOTSTRAP,
};
use crate::slocc::{prepare_lr, PreparationSettings};
use crate::states::{ket_to_density, wrap_two_pi, DensityMatrix4};

/// Minimum `|cos φ1 − cos φ2|` for the linear equation in `p` to be solvable.
pub const MIN_CONTRAST: f64 = 1e-6;

/// `p |ψ1⟩⟨ψ1| + (1 − p) |ψ2⟩⟨ψ2|` with `ψj = prepare_lr(β, φj)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureSpec {
    p: f64,
    phi1: f64,
    phi2: f64,
    beta: f64,
}

impl MixtureSpec {
    pub fn new(p: f64, phi1: f64, phi2: f64, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return invalid(format!("mixing probability p = {p} outside [0, 1]"));
        }
        if !(0.0..=FRAC_PI_2).contains(&beta) {
            return invalid(format!("beta = {beta} outside [0, π/2]"));
        }
        if !phi1.is_finite() || !phi2.is_finite() {
            return invalid("mixture phases must be finite");
        }
        Ok(Self { p, phi1: wrap_two_pi(phi1), phi2: wrap_two_pi(phi2), beta })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn phi1(&self) -> f64 {
        self.phi1
    }

    pub fn phi2(&self) -> f64 {
        self.phi2
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

pub fn mixed_state(spec: &MixtureSpec) -> DensityMatrix4 {
    let pure = |phi: f64| {
        let s = PreparationSettings::new(spec.beta, phi).expect("validated in MixtureSpec");
        ket_to_density(&prepare_lr(&s)).expect("prepare_lr is normalized")
    };
    let m = pure(spec.phi1).matrix().scale(spec.p) + pure(spec.phi2).matrix().scale(1.0 - spec.p);
    DensityMatrix4::from_matrix_unchecked(m)
}

/// `sin(2β) (p cos φ1 + (1 − p) cos φ2)`.
pub fn mixture_expectation(spec: &MixtureSpec) -> f64 {
    (2.0 * spec.beta).sin() * (spec.p * spec.phi1.cos() + (1.0 - spec.p) * spec.phi2.cos())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureEstimate {
    /// Solution of the linear equation, possibly outside `[0, 1]` from shot noise.
    pub p_hat_raw: f64,
    /// `p_hat_raw` clamped to `[0, 1]`.
    pub p_hat: f64,
    /// Bootstrap standard deviation of `p_hat_raw`.
    pub sigma: f64,
}

fn p_from_expectation(o_hat: f64, cos1: f64, cos2: f64, scale: f64) -> f64 {
    (o_hat / scale - cos2) / (cos1 - cos2)
}

/// Solves `o_hat = F sin(2β) (p cos φ1 + (1 − p) cos φ2)` for `p`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_p(
    o_hat: f64,
    phi1: f64,
    phi2: f64,
    beta: f64,
    f: f64,
    counts: &CoincidenceCounts,
    n_boot: usize,
    seed: u64,
) -> Result<MixtureEstimate> {
    estimate_p_with(o_hat, phi1, phi2, beta, f, counts, &Bootstrap::new(n_boot, seed))
}

pub fn estimate_p_with(
    o_hat: f64,
    phi1: f64,
    phi2: f64,
    beta: f64,
    f: f64,
    counts: &CoincidenceCounts,
    bootstrap: &Bootstrap,
) -> Result<MixtureEstimate> {
    let (cos1, cos2) = (phi1.cos(), phi2.cos());
    let contrast = (cos1 - cos2).abs();
    if !(contrast > MIN_CONTRAST) {
        return Err(Error::IndistinguishablePhases { contrast });
    }
    let s = sin_2beta_checked(beta)?;
    check_visibility(f)?;
    if bootstrap.resamples < MIN_BOOTSTRAP {
        return invalid(format!("need at least {MIN_BOOTSTRAP} bootstrap resamples"));
    }
    let scale = f * s;
    let p_hat_raw = p_from_expectation(o_hat, cos1, cos2, scale);
    let reps = bootstrap.replicate(counts, |c| {
        Ok(p_from_expectation(estimate_o(c)?, cos1, cos2, scale))
    })?;
    Ok(MixtureEstimate { p_hat_raw, p_hat: p_hat_raw.clamp(0.0, 1.0), sigma: std_dev(&reps) })
}
