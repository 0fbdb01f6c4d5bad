//! Nine-setting Pauli tomography of the two-region pseudospin state.
//!
//! Each setting measures `P ⊗ Q` with `P, Q ∈ {X, Y, Z}` and records the four
//! joint eigenvalue sectors in the order `(+,+), (+,−), (−,+), (−,−)`.
//! Reconstruction is linear inversion followed by projection onto the nearest
//! physical state in Frobenius norm.

use std::fmt;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::measurement::multinomial;
use crate::rng::substream;
use crate::slocc::{prepare_lr, PreparationSettings};
use crate::states::{fidelity_pure, wrap_two_pi, DensityMatrix4, DOWN_UP, UP_DOWN};

/// Below this `|ρ[L↓R↑, L↑R↓]|` the extracted phase is flagged unreliable.
pub const LOW_COHERENCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Matrix2<Complex64> {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::X => Matrix2::new(o, one, one, o),
            Pauli::Y => Matrix2::new(o, -i, i, o),
            Pauli::Z => Matrix2::new(one, o, o, -one),
        }
    }

    fn index(self) -> usize {
        match self {
            Pauli::X => 0,
            Pauli::Y => 1,
            Pauli::Z => 2,
        }
    }

    /// Eigenprojector `(I ± P)/2`.
    fn projector(self, positive: bool) -> Matrix2<Complex64> {
        let sign = if positive { 1.0 } else { -1.0 };
        (Matrix2::identity() + self.matrix().scale(sign)).scale(0.5)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

/// Measurement of `left ⊗ right` on the L and R pseudospins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliSetting {
    pub left: Pauli,
    pub right: Pauli,
}

impl PauliSetting {
    pub fn new(left: Pauli, right: Pauli) -> Self {
        Self { left, right }
    }

    /// All nine settings in canonical order `XX, XY, …, ZZ`.
    pub fn all() -> [PauliSetting; 9] {
        let mut out = [PauliSetting::new(Pauli::X, Pauli::X); 9];
        for l in Pauli::ALL {
            for r in Pauli::ALL {
                out[3 * l.index() + r.index()] = PauliSetting::new(l, r);
            }
        }
        out
    }

    pub fn index(self) -> usize {
        3 * self.left.index() + self.right.index()
    }

    /// Outcome probabilities `[(+,+), (+,−), (−,+), (−,−)]` for `rho`.
    pub fn probabilities(self, rho: &DensityMatrix4) -> [f64; 4] {
        let mut p = [0.0; 4];
        for (k, (sl, sr)) in [(true, true), (true, false), (false, true), (false, false)]
            .into_iter()
            .enumerate()
        {
            let proj = self.left.projector(sl).kronecker(&self.right.projector(sr));
            p[k] = (rho.matrix() * proj).trace().re.max(0.0);
        }
        let s: f64 = p.iter().sum();
        p.map(|x| x / s)
    }
}

impl fmt::Display for PauliSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.left, self.right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SettingCounts {
    pub setting: PauliSetting,
    /// `[(+,+), (+,−), (−,+), (−,−)]`.
    pub counts: [u64; 4],
}

impl SettingCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TomographyData {
    pub records: Vec<SettingCounts>,
}

/// Outcome frequencies for all nine settings, indexed by [`PauliSetting::index`].
pub type SettingFrequencies = [[f64; 4]; 9];

pub fn simulate_tomography(
    rho: &DensityMatrix4,
    shots_per_setting: u64,
    seed: u64,
) -> Result<TomographyData> {
    DensityMatrix4::new(*rho.matrix())?;
    if shots_per_setting == 0 {
        return invalid("shots per setting must be at least 1");
    }
    let records = PauliSetting::all()
        .into_iter()
        .map(|setting| {
            let mut rng = substream(seed, setting.index() as u64);
            let counts = multinomial(&mut rng, &setting.probabilities(rho), shots_per_setting);
            SettingCounts { setting, counts }
        })
        .collect();
    Ok(TomographyData { records })
}

/// Infinite-shot outcome frequencies.
pub fn exact_frequencies(rho: &DensityMatrix4) -> SettingFrequencies {
    PauliSetting::all().map(|s| s.probabilities(rho))
}

pub fn frequencies(data: &TomographyData) -> Result<SettingFrequencies> {
    let mut out: [Option<[f64; 4]>; 9] = [None; 9];
    for rec in &data.records {
        let total = rec.total();
        if total == 0 {
            return invalid(format!("setting {} has no shots", rec.setting));
        }
        let slot = &mut out[rec.setting.index()];
        if slot.is_some() {
            return invalid(format!("setting {} recorded twice", rec.setting));
        }
        *slot = Some(rec.counts.map(|n| n as f64 / total as f64));
    }
    let mut freqs = [[0.0; 4]; 9];
    for (setting, slot) in PauliSetting::all().into_iter().zip(out) {
        freqs[setting.index()] = slot.ok_or_else(|| Error::MissingSetting(setting.to_string()))?;
    }
    Ok(freqs)
}

pub fn reconstruct(data: &TomographyData) -> Result<DensityMatrix4> {
    Ok(reconstruct_from_frequencies(&frequencies(data)?))
}

/// Linear inversion `ρ = ¼ Σ ⟨P⊗Q⟩ P⊗Q` followed by physical projection.
///
/// Single-sided moments `⟨P⊗I⟩`, `⟨I⊗Q⟩` average the marginals of the three
/// settings sharing that Pauli.
pub fn reconstruct_from_frequencies(freqs: &SettingFrequencies) -> DensityMatrix4 {
    let pauli4 = |k: usize| -> Matrix2<Complex64> {
        if k == 0 {
            Matrix2::identity()
        } else {
            Pauli::ALL[k - 1].matrix()
        }
    };
    let mut moments = [[0.0; 4]; 4];
    moments[0][0] = 1.0;
    for l in 0..3 {
        for r in 0..3 {
            let f = freqs[3 * l + r];
            moments[l + 1][r + 1] = f[0] - f[1] - f[2] + f[3];
            moments[l + 1][0] += (f[0] + f[1] - f[2] - f[3]) / 3.0;
            moments[0][r + 1] += (f[0] - f[1] + f[2] - f[3]) / 3.0;
        }
    }
    let mut m = Matrix4::zeros();
    for (a, row) in moments.iter().enumerate() {
        for (b, &t) in row.iter().enumerate() {
            m += pauli4(a).kronecker(&pauli4(b)).scale(0.25 * t);
        }
    }
    project_physical(&m)
}

/// Nearest unit-trace PSD matrix in Frobenius norm.
///
/// Eigenvalues are projected onto the probability simplex; matrices that are
/// already physical are returned unchanged (up to Hermitian symmetrization).
pub fn project_physical(m: &Matrix4<Complex64>) -> DensityMatrix4 {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let ev = eig.eigenvalues;
    let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let tr: f64 = ev.iter().sum();
    if min >= 0.0 && (tr - 1.0).abs() <= 1e-14 {
        return DensityMatrix4::from_matrix_unchecked(h);
    }
    let projected = project_to_simplex([ev[0], ev[1], ev[2], ev[3]]);
    let d = Vector4::from(projected.map(|x| Complex64::new(x, 0.0)));
    let v = eig.eigenvectors;
    let out = v * Matrix4::from_diagonal(&d) * v.adjoint();
    DensityMatrix4::from_matrix_unchecked((out + out.adjoint()).scale(0.5))
}

/// Euclidean projection of `x` onto `{λ ≥ 0, Σλ = 1}`.
pub fn project_to_simplex(x: [f64; 4]) -> [f64; 4] {
    let mut u = x;
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumulative += uk;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    x.map(|v| (v - theta).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractedParams {
    /// Relative phase in `[0, 2π)`.
    pub phi: f64,
    /// Splitting angle in `[0, π/2]`.
    pub beta: f64,
    /// Fidelity of the reconstruction with `prepare_lr(β, φ)`.
    pub fidelity_to_ideal: f64,
    /// The coherence was below [`LOW_COHERENCE`]; `phi` is then set to 0.
    pub low_coherence: bool,
}

impl ExtractedParams {
    pub fn settings(&self) -> PreparationSettings {
        PreparationSettings::new(self.beta, self.phi).expect("extracted values are in range")
    }
}

/// Reads β from the coincidence-sector populations and φ from their coherence.
pub fn extract_params(rho_hat: &DensityMatrix4) -> Result<ExtractedParams> {
    let pop_hv = rho_hat.get(UP_DOWN, UP_DOWN).re.max(0.0);
    let pop_vh = rho_hat.get(DOWN_UP, DOWN_UP).re.max(0.0);
    if !(pop_hv + pop_vh > 1e-6) {
        return Err(Error::Unextractable(format!(
            "one-per-region populations sum to {:e}",
            pop_hv + pop_vh
        )));
    }
    let beta = pop_vh.sqrt().atan2(pop_hv.sqrt());
    let coherence = rho_hat.get(DOWN_UP, UP_DOWN);
    let low_coherence = coherence.norm() < LOW_COHERENCE;
    let phi = if low_coherence { 0.0 } else { wrap_two_pi(coherence.arg()) };
    let settings = PreparationSettings::new(beta, phi)?;
    let fidelity_to_ideal = fidelity_pure(rho_hat, &prepare_lr(&settings))?;
    Ok(ExtractedParams { phi, beta, fidelity_to_ideal, low_coherence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{noisy_state, NoiseModel};
    use crate::states::{ket_to_density, JointKet};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, TAU};

    fn pure(beta: f64, phi: f64) -> DensityMatrix4 {
        ket_to_density(&prepare_lr(&PreparationSettings::new(beta, phi).unwrap())).unwrap()
    }

    fn counts_for(data: &TomographyData, s: PauliSetting) -> [u64; 4] {
        data.records.iter().find(|r| r.setting == s).unwrap().counts
    }

    #[test]
    fn product_state_zz_is_deterministic() {
        let rho = ket_to_density(&JointKet::from_real([0.0, 1.0, 0.0, 0.0])).unwrap();
        let data = simulate_tomography(&rho, 1000, 1).unwrap();
        assert_eq!(counts_for(&data, PauliSetting::new(Pauli::Z, Pauli::Z)), [0, 1000, 0, 0]);
    }

    #[test]
    fn mixed_state_sectors_are_uniform() {
        let n = 40_000u64;
        let data = simulate_tomography(&DensityMatrix4::maximally_mixed(), n, 2).unwrap();
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for rec in &data.records {
            for c in rec.counts {
                assert!((c as f64 - n as f64 / 4.0).abs() < 5.0 * sigma);
            }
        }
    }

    #[test]
    fn bell_xx_is_correlated() {
        // X⊗X on (|HV⟩+|VH⟩)/√2: the state is its +1 eigenvector, so only
        // sectors with equal signs appear.
        let rho = pure(FRAC_PI_4, 0.0);
        let data = simulate_tomography(&rho, 5000, 3).unwrap();
        let c = counts_for(&data, PauliSetting::new(Pauli::X, Pauli::X));
        assert_eq!(c[1] + c[2], 0);
        assert_eq!(c[0] + c[3], 5000);
    }

    #[test]
    fn exact_moments_invert_exactly() {
        let model = NoiseModel::new(0.9, 0.3).unwrap();
        for rho in [
            pure(0.3, 1.2),
            noisy_state(&pure(0.7, 2.9), &model).unwrap(),
            DensityMatrix4::maximally_mixed(),
        ] {
            let rec = reconstruct_from_frequencies(&exact_frequencies(&rho));
            assert!((rec.matrix() - rho.matrix()).camax() < 1e-12);
        }
    }

    #[test]
    fn missing_or_duplicate_settings_rejected() {
        let mut data = simulate_tomography(&pure(0.3, 0.2), 100, 1).unwrap();
        let dup = data.records[0];
        data.records.push(dup);
        assert!(reconstruct(&data).is_err());
        data.records.truncate(8);
        assert!(matches!(reconstruct(&data), Err(Error::MissingSetting(_))));
    }

    #[test]
    fn simplex_projection() {
        assert_eq!(project_to_simplex([0.5, 0.5, 0.0, 0.0]), [0.5, 0.5, 0.0, 0.0]);
        let p = project_to_simplex([1.1, 0.0, -0.1, 0.0]);
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert!(p.iter().all(|&x| x >= 0.0));
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn projection_is_idempotent_and_physical() {
        let mut m = *pure(FRAC_PI_4, 0.0).matrix();
        m[(0, 0)] = Complex64::new(-0.05, 0.0);
        m[(3, 3)] = Complex64::new(0.05, 0.0);
        let once = project_physical(&m);
        assert!(DensityMatrix4::new(*once.matrix()).is_ok());
        let twice = project_physical(once.matrix());
        assert!((once.matrix() - twice.matrix()).camax() < 1e-12);
        assert_abs_diff_eq!(once.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn finite_shot_bell_fidelity() {
        let rho = pure(FRAC_PI_4, 0.0);
        let rec = reconstruct(&simulate_tomography(&rho, 100_000, 5).unwrap()).unwrap();
        let bell = JointKet::from_real([0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
        assert!(fidelity_pure(&rec, &bell).unwrap() >= 0.999);
    }

    #[test]
    fn extraction_examples() {
        let p = extract_params(&pure(30f64.to_radians(), FRAC_PI_2)).unwrap();
        assert_abs_diff_eq!(p.phi, FRAC_PI_2, epsilon = 1e-10);
        assert_abs_diff_eq!(p.beta, 30f64.to_radians(), epsilon = 1e-10);
        assert_abs_diff_eq!(p.fidelity_to_ideal, 1.0, epsilon = 1e-12);

        let noisy = noisy_state(&pure(FRAC_PI_4, 0.0), &NoiseModel::default()).unwrap();
        let p = extract_params(&noisy).unwrap();
        assert_abs_diff_eq!(p.beta, FRAC_PI_4, epsilon = 1e-12);
        assert_abs_diff_eq!(p.phi, 0.0, epsilon = 1e-12);
        assert!(!p.low_coherence);

        let p = extract_params(&DensityMatrix4::maximally_mixed()).unwrap();
        assert!(p.low_coherence);
        assert_eq!(p.phi, 0.0);
    }

    #[test]
    fn extraction_needs_coincidence_population() {
        let rho = DensityMatrix4::from_real_diagonal([0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(matches!(extract_params(&rho), Err(Error::Unextractable(_))));
    }

    proptest! {
        #[test]
        fn extraction_inverts_preparation(beta in 1e-3..(FRAC_PI_2 - 1e-3), phi in 0.0..TAU) {
            let p = extract_params(&pure(beta, phi)).unwrap();
            prop_assert!((p.beta - beta).abs() < 1e-10);
            let dphi = (p.phi - phi).abs();
            prop_assert!(dphi.min(TAU - dphi) < 1e-10);
        }
    }
}
