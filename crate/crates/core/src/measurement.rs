//! Rotation, coincidence observable, shot-noise sampling and phase estimation.
//!
//! Detector numbering: 1 = L H-port, 2 = L V-port, 3 = R H-port, 4 = R V-port.
//! With this mapping `n13 + n24 − n14 − n23` is `σz⊗σz` after the polarizing
//! beam splitters, and `p13, p14, p23, p24` are the diagonal entries of the
//! rotated density matrix at `L↑R↑, L↑R↓, L↓R↑, L↓R↓`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::rng::substream;
use crate::states::{DensityMatrix4, JointKet};

/// Minimum `sin 2β` for which the observable carries phase information.
pub const MIN_SIN_2BETA: f64 = 1e-6;
pub const MIN_BOOTSTRAP: usize = 100;

/// Single-particle π/4 pseudospin rotation `(1/√2)[[1, −1], [1, 1]]`.
pub fn rotation_matrix() -> Matrix2<Complex64> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Matrix2::new(h, -h, h, h)
}

/// `M ⊗ M` in the fixed basis order.
pub fn rotation_operator() -> Matrix4<Complex64> {
    rotation_matrix().kronecker(&rotation_matrix())
}

pub fn apply_rotation(ket: &JointKet) -> JointKet {
    JointKet::from_vector(rotation_operator() * ket.vector())
}

/// `(M⊗M) ρ (M⊗M)†`.
pub fn rotate_density(rho: &DensityMatrix4) -> DensityMatrix4 {
    let u = rotation_operator();
    DensityMatrix4::from_matrix_unchecked(u * rho.matrix() * u.adjoint())
}

/// Probabilities of the four coincidence outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbs {
    pub p13: f64,
    pub p14: f64,
    pub p23: f64,
    pub p24: f64,
}

impl OutcomeProbs {
    pub fn new(p13: f64, p14: f64, p23: f64, p24: f64) -> Result<Self> {
        let p = Self { p13, p14, p23, p24 };
        let arr = p.as_array();
        if arr.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return invalid(format!("outcome probabilities {arr:?} outside [0, 1]"));
        }
        let sum: f64 = arr.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return invalid(format!("outcome probabilities sum to {sum}"));
        }
        Ok(p)
    }

    pub fn uniform() -> Self {
        Self { p13: 0.25, p14: 0.25, p23: 0.25, p24: 0.25 }
    }

    /// `[p13, p14, p23, p24]`.
    pub fn as_array(&self) -> [f64; 4] {
        [self.p13, self.p14, self.p23, self.p24]
    }

    pub fn expectation(&self) -> f64 {
        self.p13 + self.p24 - self.p14 - self.p23
    }
}

/// Reads the outcome probabilities off the diagonal of an already rotated state.
pub fn outcome_probs(rho: &DensityMatrix4) -> Result<OutcomeProbs> {
    let mut d = [0.0; 4];
    for (i, slot) in d.iter_mut().enumerate() {
        let z = rho.get(i, i);
        if z.im.abs() > 1e-12 || z.re < -1e-10 || !z.re.is_finite() {
            return invalid(format!("diagonal entry {i} = {z} is not a probability"));
        }
        *slot = z.re.clamp(0.0, 1.0);
    }
    let sum: f64 = d.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return invalid(format!("density matrix trace {sum} differs from 1"));
    }
    let d = d.map(|x| x / sum);
    OutcomeProbs::new(d[0], d[1], d[2], d[3])
}

/// `Tr[ρ σz⊗σz] = p13 + p24 − p14 − p23` of a rotated state.
pub fn expectation_o(rho: &DensityMatrix4) -> Result<f64> {
    Ok(outcome_probs(rho)?.expectation())
}

/// Coincidence tallies for one measurement setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoincidenceCounts {
    pub n13: u64,
    pub n14: u64,
    pub n23: u64,
    pub n24: u64,
    pub total: u64,
}

impl CoincidenceCounts {
    pub fn new(n13: u64, n14: u64, n23: u64, n24: u64) -> Self {
        Self { n13, n14, n23, n24, total: n13 + n14 + n23 + n24 }
    }

    pub fn from_array(n: [u64; 4]) -> Self {
        Self::new(n[0], n[1], n[2], n[3])
    }

    /// `[n13, n14, n23, n24]`.
    pub fn as_array(&self) -> [u64; 4] {
        [self.n13, self.n14, self.n23, self.n24]
    }

    /// Empirical outcome frequencies.
    pub fn frequencies(&self) -> Result<OutcomeProbs> {
        if self.total == 0 {
            return invalid("coincidence counts are empty");
        }
        let t = self.total as f64;
        let f = self.as_array().map(|n| n as f64 / t);
        Ok(OutcomeProbs { p13: f[0], p14: f[1], p23: f[2], p24: f[3] })
    }
}

/// How coincidence totals are drawn for a measurement setting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Fixed total, multinomial over the four outcomes.
    #[default]
    Multinomial,
    /// Independent Poisson tallies with means `N·p_ij`.
    Poisson,
}

/// Multinomial draw of `total` coincidences; deterministic for a fixed seed.
pub fn sample_counts(probs: &OutcomeProbs, total: u64, seed: u64) -> Result<CoincidenceCounts> {
    sample_counts_mode(probs, total, seed, SamplingMode::Multinomial)
}

pub fn sample_counts_mode(
    probs: &OutcomeProbs,
    total: u64,
    seed: u64,
    mode: SamplingMode,
) -> Result<CoincidenceCounts> {
    if total == 0 {
        return invalid("total coincidence count must be at least 1");
    }
    let mut rng = substream(seed, 0);
    Ok(draw_counts(&mut rng, &probs.as_array(), total, mode))
}

pub(crate) fn draw_counts<R: Rng + ?Sized>(
    rng: &mut R,
    probs: &[f64; 4],
    total: u64,
    mode: SamplingMode,
) -> CoincidenceCounts {
    match mode {
        SamplingMode::Multinomial => CoincidenceCounts::from_array(multinomial(rng, probs, total)),
        SamplingMode::Poisson => {
            let n = probs.map(|p| {
                let mean = p * total as f64;
                if mean <= 0.0 {
                    0
                } else {
                    Poisson::new(mean).expect("positive finite mean").sample(rng) as u64
                }
            });
            CoincidenceCounts::from_array(n)
        }
    }
}

/// Multinomial sampling through the chain of conditional binomials.
pub(crate) fn multinomial<R: Rng + ?Sized, const K: usize>(
    rng: &mut R,
    probs: &[f64; K],
    total: u64,
) -> [u64; K] {
    let mut out = [0u64; K];
    let mut remaining = total;
    let mut mass: f64 = probs.iter().sum();
    for k in 0..K {
        if remaining == 0 {
            break;
        }
        if k == K - 1 {
            out[k] = remaining;
            break;
        }
        let p = if mass > 0.0 { (probs[k] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let n = if p >= 1.0 {
            remaining
        } else if p <= 0.0 {
            0
        } else {
            Binomial::new(remaining, p).expect("valid binomial").sample(rng)
        };
        out[k] = n;
        remaining -= n;
        mass -= probs[k];
    }
    out
}

/// `(n13 + n24 − n14 − n23) / total`.
pub fn estimate_o(counts: &CoincidenceCounts) -> Result<f64> {
    if counts.total == 0 {
        return invalid("cannot estimate ⟨O⟩ from zero coincidences");
    }
    let plus = (counts.n13 + counts.n24) as f64;
    let minus = (counts.n14 + counts.n23) as f64;
    Ok((plus - minus) / counts.total as f64)
}

/// Parametric bootstrap over multinomial resamples of observed counts.
///
/// Resample `b` draws from substream `(seed, b)`, so the replicate set is the
/// same for sequential and parallel execution.
#[derive(Debug, Clone, Copy)]
pub struct Bootstrap {
    pub resamples: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl Bootstrap {
    pub fn new(resamples: usize, seed: u64) -> Self {
        Self { resamples, seed, execution: Execution::default() }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Evaluates `stat` on every resample of `counts`.
    pub fn replicate<T, F>(&self, counts: &CoincidenceCounts, stat: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&CoincidenceCounts) -> Result<T> + Sync + Send,
    {
        let probs = counts.frequencies()?.as_array();
        let total = counts.total;
        self.execution.try_map(self.resamples, |b| {
            let mut rng = substream(self.seed, b as u64);
            let resample = CoincidenceCounts::from_array(multinomial(&mut rng, &probs, total));
            stat(&resample)
        })
    }
}

/// Sample standard deviation (n − 1 denominator); 0 for fewer than two values.
pub fn std_dev(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Exchange-phase estimate with bootstrap uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEstimate {
    /// `φ̂ ∈ [0, π]`.
    pub phi_hat: f64,
    /// Bootstrap standard deviation of `φ̂`.
    pub sigma: f64,
    pub o_hat: f64,
    /// Bootstrap standard deviation of `⟨O⟩`.
    pub o_sigma: f64,
    /// Set when `o_hat / (F sin 2β)` fell outside `[−1, 1]` and was clamped.
    pub clamped: bool,
}

pub(crate) fn check_visibility(f: f64) -> Result<()> {
    if !(f > 0.0 && f <= 1.0) {
        return invalid(format!("visibility factor F = {f} outside (0, 1]"));
    }
    Ok(())
}

pub(crate) fn sin_2beta_checked(beta: f64) -> Result<f64> {
    let s = (2.0 * beta).sin();
    if !(s > MIN_SIN_2BETA) {
        return Err(Error::IndistinguishabilityTooLow { sin_2beta: s });
    }
    Ok(s)
}

/// `arccos(clamp(o / (F sin 2β)))` and whether clamping was needed.
pub fn phase_from_expectation(o_hat: f64, beta: f64, f: f64) -> Result<(f64, bool)> {
    check_visibility(f)?;
    let s = sin_2beta_checked(beta)?;
    let ratio = o_hat / (f * s);
    let clamped = !(-1.0..=1.0).contains(&ratio);
    Ok((ratio.clamp(-1.0, 1.0).acos(), clamped))
}

/// Recovers `φ̂` from `⟨O⟩ = F sin(2β) cos φ` and bootstraps its spread.
pub fn estimate_phase(
    o_hat: f64,
    beta: f64,
    f: f64,
    counts: &CoincidenceCounts,
    n_boot: usize,
    seed: u64,
) -> Result<PhaseEstimate> {
    estimate_phase_with(o_hat, beta, f, counts, &Bootstrap::new(n_boot, seed))
}

pub fn estimate_phase_with(
    o_hat: f64,
    beta: f64,
    f: f64,
    counts: &CoincidenceCounts,
    bootstrap: &Bootstrap,
) -> Result<PhaseEstimate> {
    if bootstrap.resamples < MIN_BOOTSTRAP {
        return invalid(format!("need at least {MIN_BOOTSTRAP} bootstrap resamples"));
    }
    let (phi_hat, clamped) = phase_from_expectation(o_hat, beta, f)?;
    let reps = bootstrap.replicate(counts, |c| {
        let o = estimate_o(c)?;
        Ok((o, phase_from_expectation(o, beta, f)?.0))
    })?;
    let (os, phis): (Vec<f64>, Vec<f64>) = reps.into_iter().unzip();
    Ok(PhaseEstimate {
        phi_hat,
        sigma: std_dev(&phis),
        o_hat,
        o_sigma: std_dev(&os),
        clamped,
    })
}
