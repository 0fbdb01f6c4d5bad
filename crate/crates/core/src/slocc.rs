//! Deformation, sLOCC projection and spatial indistinguishability.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::states::{
    joint_amplitude, wrap_two_pi, DetectionMode, JointKet, Pseudospin, Region,
    SingleParticleState, StatisticsParameter,
};

/// Below this success probability no coincidences would ever be recorded.
pub const POST_SELECTION_THRESHOLD: f64 = 1e-12;

const PAIR_NORM_TOL: f64 = 1e-9;

/// Two particles `l|L⟩ + r|R⟩` (pseudospin ↑) and `l'|L⟩ + r'|R⟩` (pseudospin ↓).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformedPair {
    pub l: Complex64,
    pub r: Complex64,
    pub l_p: Complex64,
    pub r_p: Complex64,
    pub eta: StatisticsParameter,
}

impl DeformedPair {
    pub fn first(&self) -> SingleParticleState {
        SingleParticleState::new(self.l, self.r, Pseudospin::Up).expect("normalized by deform")
    }

    pub fn second(&self) -> SingleParticleState {
        SingleParticleState::new(self.l_p, self.r_p, Pseudospin::Down)
            .expect("normalized by deform")
    }

    /// `|l r'|²` and `|r l'|²`.
    fn path_weights(&self) -> (f64, f64) {
        ((self.l * self.r_p).norm_sqr(), (self.r * self.l_p).norm_sqr())
    }

    /// `P_LR = |l r'|² + |r l'|²`.
    pub fn p_lr(&self) -> f64 {
        let (a, b) = self.path_weights();
        a + b
    }
}

/// Balanced first photon and `sin β|L⟩ + cos β|R⟩` second photon with `η = e^{iφ}`.
///
/// This is the experimental preparation; `φ` plays the role of the exchange phase.
pub fn experimental_pair(beta: f64, phi: f64) -> Result<DeformedPair> {
    deform(
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::new(beta.sin(), 0.0),
        Complex64::new(beta.cos(), 0.0),
        StatisticsParameter::new(phi),
    )
}

/// Builds a deformed pair; each amplitude pair must be normalized within 1e-9.
pub fn deform(
    l: Complex64,
    r: Complex64,
    l_p: Complex64,
    r_p: Complex64,
    eta: StatisticsParameter,
) -> Result<DeformedPair> {
    for (a, b) in [(l, r), (l_p, r_p)] {
        let n2 = a.norm_sqr() + b.norm_sqr();
        if n2.sqrt() <= 1e-15 || !n2.is_finite() {
            return Err(Error::DegenerateState(format!("amplitude pair ({a}, {b}) has zero norm")));
        }
        if (n2 - 1.0).abs() > PAIR_NORM_TOL {
            return invalid(format!("amplitude pair ({a}, {b}) not normalized: |·|² = {n2}"));
        }
    }
    let (l, r) = crate::states::normalize_pair(l, r)?;
    let (l_p, r_p) = crate::states::normalize_pair(l_p, r_p)?;
    Ok(DeformedPair { l, r, l_p, r_p, eta })
}

/// Settings of the optical preparation: splitting angle β and injected phase φs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparationSettings {
    beta: f64,
    phi_s: f64,
}

impl PreparationSettings {
    /// `beta ∈ [0, π/2]`; `phi_s` is wrapped into `[0, 2π)`.
    pub fn new(beta: f64, phi_s: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2 + 1e-15).contains(&beta) {
            return invalid(format!("beta = {beta} outside [0, π/2]"));
        }
        if !phi_s.is_finite() {
            return invalid("phi_s is not finite");
        }
        Ok(Self {
            beta: beta.min(FRAC_PI_2),
            phi_s: wrap_two_pi(phi_s),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn phi_s(&self) -> f64 {
        self.phi_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SloccResult {
    /// Post-selected state `ψ_LR`.
    pub ket: JointKet,
    /// Post-selection success probability `P_LR`.
    pub p_lr: f64,
    /// Spatial indistinguishability `I`.
    pub indist: f64,
}

/// Projects onto one particle per region and renormalizes.
pub fn project_slocc(pair: &DeformedPair) -> Result<SloccResult> {
    let p_lr = pair.p_lr();
    if p_lr <= POST_SELECTION_THRESHOLD {
        return Err(Error::PostSelectionImpossible { p_lr });
    }
    let first = pair.first();
    let second = pair.second();
    let mut amps = [Complex64::new(0.0, 0.0); 4];
    for spin_l in [Pseudospin::Up, Pseudospin::Down] {
        for spin_r in [Pseudospin::Up, Pseudospin::Down] {
            let a = joint_amplitude(
                DetectionMode::new(Region::L, spin_l),
                DetectionMode::new(Region::R, spin_r),
                &first,
                &second,
                pair.eta,
            )?;
            amps[crate::states::basis_index(spin_l, spin_r)] = a / p_lr.sqrt();
        }
    }
    Ok(SloccResult {
        ket: JointKet::new(amps),
        p_lr,
        indist: indistinguishability(pair)?,
    })
}

/// `cos β|L↑R↓⟩ + e^{iφs} sin β|L↓R↑⟩`.
pub fn prepare_lr(settings: &PreparationSettings) -> JointKet {
    let (s, c) = settings.beta.sin_cos();
    JointKet::new([
        Complex64::new(0.0, 0.0),
        Complex64::new(c, 0.0),
        Complex64::from_polar(s, settings.phi_s),
        Complex64::new(0.0, 0.0),
    ])
}

/// Binary entropy of the normalized sLOCC path weights.
pub fn indistinguishability(pair: &DeformedPair) -> Result<f64> {
    let (a, b) = pair.path_weights();
    let total = a + b;
    if total <= POST_SELECTION_THRESHOLD {
        return Err(Error::PostSelectionImpossible { p_lr: total });
    }
    Ok(binary_entropy(a / total))
}

/// `−w log₂ w − (1−w) log₂(1−w)` with `0·log 0 = 0`.
pub fn binary_entropy(w: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    (term(w) + term(1.0 - w)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI, TAU};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    #[test]
    fn deform_examples() {
        let p = deform(c(1.0), c(0.0), c(0.0), c(1.0), StatisticsParameter::new(0.4)).unwrap();
        assert_eq!(p.p_lr(), 1.0);
        let h = FRAC_1_SQRT_2;
        let p = deform(c(h), c(h), c(h), c(h), StatisticsParameter::bosons()).unwrap();
        assert_abs_diff_eq!(p.p_lr(), 0.5, epsilon = 1e-15);
        let b = deg(30.0);
        let p = deform(c(h), c(h), c(b.sin()), c(b.cos()), StatisticsParameter::bosons()).unwrap();
        assert_abs_diff_eq!(p.l_p.re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn deform_rejects_bad_pairs() {
        let e = StatisticsParameter::bosons();
        assert!(matches!(
            deform(c(0.0), c(0.0), c(1.0), c(0.0), e),
            Err(Error::DegenerateState(_))
        ));
        assert!(deform(c(1.0), c(1.0), c(1.0), c(0.0), e).is_err());
        // within 1e-9 is accepted and renormalized to 1e-12
        let p = deform(c(1.0 + 1e-10), c(0.0), c(0.0), c(1.0), e).unwrap();
        assert!((p.l.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximal_overlap_gives_bell_state() {
        let h = FRAC_1_SQRT_2;
        let p = deform(c(h), c(h), c(h), c(h), StatisticsParameter::bosons()).unwrap();
        let res = project_slocc(&p).unwrap();
        assert_abs_diff_eq!(res.p_lr, 0.5, epsilon = 1e-15);
        let bell = JointKet::from_real([0.0, h, h, 0.0]);
        assert!(res.ket.same_ray(&bell, 1e-12));
        assert_abs_diff_eq!(res.indist, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn distinguishable_pair_projects_to_product() {
        let p = deform(c(1.0), c(0.0), c(0.0), c(1.0), StatisticsParameter::new(1.1)).unwrap();
        let res = project_slocc(&p).unwrap();
        assert_eq!(res.p_lr, 1.0);
        assert!(res.ket.same_ray(&JointKet::from_real([0.0, 1.0, 0.0, 0.0]), 1e-12));
        assert_eq!(res.indist, 0.0);
    }

    #[test]
    fn fermionic_projection_at_twenty_degrees() {
        let h = FRAC_1_SQRT_2;
        let b = deg(20.0);
        let p = deform(c(h), c(h), c(b.sin()), c(b.cos()), StatisticsParameter::fermions()).unwrap();
        let res = project_slocc(&p).unwrap();
        assert_abs_diff_eq!(res.p_lr, 0.5, epsilon = 1e-15);
        let a = res.ket.amps();
        assert_abs_diff_eq!(a[1].re, b.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(a[2].re, -b.sin(), epsilon = 1e-12);
        assert!(a[2].im.abs() < 1e-12);
        assert_eq!(a[0], c(0.0));
        assert_eq!(a[3], c(0.0));
    }

    #[test]
    fn no_one_per_region_component_is_rejected() {
        // both particles entirely in L
        let p = deform(c(1.0), c(0.0), c(1.0), c(0.0), StatisticsParameter::bosons()).unwrap();
        assert!(matches!(
            project_slocc(&p),
            Err(Error::PostSelectionImpossible { .. })
        ));
        assert!(indistinguishability(&p).is_err());
    }

    #[test]
    fn prepare_examples() {
        let h = FRAC_1_SQRT_2;
        let k = prepare_lr(&PreparationSettings::new(FRAC_PI_4, 0.0).unwrap());
        assert!(k.same_ray(&JointKet::from_real([0.0, h, h, 0.0]), 1e-12));
        let k = prepare_lr(&PreparationSettings::new(0.0, 2.0).unwrap());
        assert!(k.same_ray(&JointKet::from_real([0.0, 1.0, 0.0, 0.0]), 1e-12));
        let k = prepare_lr(&PreparationSettings::new(FRAC_PI_4, PI).unwrap());
        let a = k.amps();
        assert_abs_diff_eq!(a[1].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(a[2].re, -h, epsilon = 1e-15);
        assert!(PreparationSettings::new(-0.1, 0.0).is_err());
        assert!(PreparationSettings::new(2.0, 0.0).is_err());
    }

    #[test]
    fn indistinguishability_examples() {
        let i45 = indistinguishability(&experimental_pair(FRAC_PI_4, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(i45, 1.0, epsilon = 1e-12);
        let i0 = indistinguishability(&experimental_pair(0.0, 0.0).unwrap()).unwrap();
        assert_eq!(i0, 0.0);
        let w = deg(10.0).cos().powi(2);
        let want = -w * w.log2() - (1.0 - w) * (1.0 - w).log2();
        let i10 = indistinguishability(&experimental_pair(deg(10.0), 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(i10, want, epsilon = 1e-12);
        // sin²10° ≈ 0.0302 gives I ≈ 0.196
        assert!((i10 - 0.196).abs() < 1e-3);
    }

    #[test]
    fn binary_entropy_shape() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert_eq!(binary_entropy(0.5), 1.0);
        for i in 1..100 {
            let w = i as f64 / 100.0;
            assert_abs_diff_eq!(binary_entropy(w), binary_entropy(1.0 - w), epsilon = 1e-15);
            if i != 50 {
                assert!(binary_entropy(w) < 1.0);
            }
        }
    }

    proptest! {
        #[test]
        fn prepare_matches_pipeline(beta in 0.0..FRAC_PI_2, phi in 0.0..TAU) {
            let settings = PreparationSettings::new(beta, phi).unwrap();
            let direct = prepare_lr(&settings);
            let res = project_slocc(&experimental_pair(beta, phi).unwrap()).unwrap();
            prop_assert!(direct.same_ray(&res.ket, 1e-12));
            prop_assert!((res.p_lr - 0.5).abs() < 1e-12);
        }

        #[test]
        fn projection_is_normalized_with_empty_parallel_sectors(
            v in prop::array::uniform8(-1.0f64..1.0), phi in 0.0..TAU
        ) {
            let n1 = (v[0]*v[0] + v[1]*v[1] + v[2]*v[2] + v[3]*v[3]).sqrt();
            let n2 = (v[4]*v[4] + v[5]*v[5] + v[6]*v[6] + v[7]*v[7]).sqrt();
            prop_assume!(n1 > 1e-3 && n2 > 1e-3);
            let l = Complex64::new(v[0], v[1]) / n1;
            let r = Complex64::new(v[2], v[3]) / n1;
            let lp = Complex64::new(v[4], v[5]) / n2;
            let rp = Complex64::new(v[6], v[7]) / n2;
            let pair = deform(l, r, lp, rp, StatisticsParameter::new(phi)).unwrap();
            prop_assume!(pair.p_lr() > 1e-9);
            let res = project_slocc(&pair).unwrap();
            prop_assert!((res.ket.norm() - 1.0).abs() < 1e-12);
            prop_assert_eq!(res.ket.amp(0), Complex64::new(0.0, 0.0));
            prop_assert_eq!(res.ket.amp(3), Complex64::new(0.0, 0.0));
            let want = (l * rp).norm_sqr() + (r * lp).norm_sqr();
            prop_assert!((res.p_lr - want).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&res.indist));
        }
    }
}
