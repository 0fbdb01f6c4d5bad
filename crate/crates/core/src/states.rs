//! Two-particle states over the L/R ⊗ pseudospin basis.
//!
//! The basis order is fixed to `[L↑R↑, L↑R↓, L↓R↑, L↓R↓]` everywhere: index
//! `2·s_L + s_R` with `↑ = 0`, `↓ = 1`. The pseudospin maps to polarization as
//! `↑ ↔ H`, `↓ ↔ V`.

use std::f64::consts::TAU;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub const BASIS_LABELS: [&str; 4] = ["L↑R↑", "L↑R↓", "L↓R↑", "L↓R↓"];

/// Index of `|L↑,R↓⟩` (`|LH,RV⟩`).
pub const UP_DOWN: usize = 1;
/// Index of `|L↓,R↑⟩` (`|LV,RH⟩`).
pub const DOWN_UP: usize = 2;

pub(crate) const UNIT_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pseudospin {
    /// Horizontal polarization.
    Up,
    /// Vertical polarization.
    Down,
}

impl Pseudospin {
    pub(crate) fn bit(self) -> usize {
        match self {
            Pseudospin::Up => 0,
            Pseudospin::Down => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    L,
    R,
}

/// A detection mode `Xσ`: one region and one pseudospin value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DetectionMode {
    pub region: Region,
    pub spin: Pseudospin,
}

impl DetectionMode {
    pub const fn new(region: Region, spin: Pseudospin) -> Self {
        Self { region, spin }
    }

    pub fn all() -> [DetectionMode; 4] {
        use Pseudospin::*;
        use Region::*;
        [
            Self::new(L, Up),
            Self::new(L, Down),
            Self::new(R, Up),
            Self::new(R, Down),
        ]
    }
}

/// A single particle `l|L⟩ + r|R⟩` carrying a definite pseudospin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleParticleState {
    amp_l: Complex64,
    amp_r: Complex64,
    spin: Pseudospin,
}

impl SingleParticleState {
    /// Builds the state, renormalizing the amplitude pair.
    pub fn new(amp_l: Complex64, amp_r: Complex64, spin: Pseudospin) -> Result<Self> {
        let (amp_l, amp_r) = normalize_pair(amp_l, amp_r)?;
        Ok(Self { amp_l, amp_r, spin })
    }

    pub fn amp_l(&self) -> Complex64 {
        self.amp_l
    }

    pub fn amp_r(&self) -> Complex64 {
        self.amp_r
    }

    pub fn spin(&self) -> Pseudospin {
        self.spin
    }

    /// Single-particle overlap `⟨Xσ|φτ⟩ = amp_X · δ(σ, τ)`.
    pub fn overlap(&self, mode: DetectionMode) -> Complex64 {
        if mode.spin != self.spin {
            return Complex64::new(0.0, 0.0);
        }
        match mode.region {
            Region::L => self.amp_l,
            Region::R => self.amp_r,
        }
    }
}

pub(crate) fn normalize_pair(a: Complex64, b: Complex64) -> Result<(Complex64, Complex64)> {
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if !norm.is_finite() || norm <= 1e-15 {
        return Err(Error::DegenerateState(format!(
            "amplitude pair ({a}, {b}) has zero norm"
        )));
    }
    Ok((a / norm, b / norm))
}

/// The exchange phase φ; the amplitude rule uses `η = e^{iφ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatisticsParameter {
    phi: f64,
}

impl StatisticsParameter {
    /// Wraps `phi` into `[0, 2π)`.
    pub fn new(phi: f64) -> Self {
        Self {
            phi: wrap_two_pi(phi),
        }
    }

    pub fn bosons() -> Self {
        Self::new(0.0)
    }

    pub fn fermions() -> Self {
        Self::new(std::f64::consts::PI)
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn eta(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.phi)
    }
}

pub(crate) fn wrap_two_pi(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// No-label two-particle detection amplitude
/// `⟨χL,χR|ψD⟩ = ⟨χL|χD⟩⟨χR|χ'D⟩ + η ⟨χL|χ'D⟩⟨χR|χD⟩`.
pub fn joint_amplitude(
    chi_l: DetectionMode,
    chi_r: DetectionMode,
    first: &SingleParticleState,
    second: &SingleParticleState,
    eta: StatisticsParameter,
) -> Result<Complex64> {
    if chi_l.region != Region::L || chi_r.region != Region::R {
        return invalid(format!(
            "detection modes must be (L, R), got ({:?}, {:?})",
            chi_l.region, chi_r.region
        ));
    }
    let direct = first.overlap(chi_l) * second.overlap(chi_r);
    let exchanged = second.overlap(chi_l) * first.overlap(chi_r);
    Ok(direct + eta.eta() * exchanged)
}

/// Basis index of `|Lσ, Rτ⟩`.
pub fn basis_index(spin_l: Pseudospin, spin_r: Pseudospin) -> usize {
    2 * spin_l.bit() + spin_r.bit()
}

/// Amplitude vector over `[L↑R↑, L↑R↓, L↓R↑, L↓R↓]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointKet {
    amps: Vector4<Complex64>,
}

impl JointKet {
    pub fn new(amps: [Complex64; 4]) -> Self {
        Self {
            amps: Vector4::from(amps),
        }
    }

    pub fn from_real(amps: [f64; 4]) -> Self {
        Self::new(amps.map(|a| Complex64::new(a, 0.0)))
    }

    pub(crate) fn from_vector(amps: Vector4<Complex64>) -> Self {
        Self { amps }
    }

    pub fn amps(&self) -> [Complex64; 4] {
        [self.amps[0], self.amps[1], self.amps[2], self.amps[3]]
    }

    pub fn amp(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn vector(&self) -> &Vector4<Complex64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn inner(&self, other: &JointKet) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// Equality up to global phase: `| |⟨a|b⟩| − 1 | ≤ tol` for unit kets.
    pub fn same_ray(&self, other: &JointKet, tol: f64) -> bool {
        (self.inner(other).norm() - 1.0).abs() <= tol
            && (self.norm() - 1.0).abs() <= tol
            && (other.norm() - 1.0).abs() <= tol
    }
}

/// Scales the ket to unit norm, leaving its global phase untouched.
pub fn normalize(ket: &JointKet) -> Result<JointKet> {
    let n = ket.norm();
    if !n.is_finite() || n <= 1e-15 {
        return Err(Error::DegenerateState("ket has zero norm".into()));
    }
    Ok(JointKet::from_vector(ket.amps.unscale(n)))
}

/// Hermitian, PSD, unit-trace 4×4 matrix in the fixed basis order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4 {
    m: Matrix4<Complex64>,
}

impl DensityMatrix4 {
    /// Validates Hermiticity (1e-12), unit trace (1e-12) and eigenvalues ≥ −1e-10.
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        check_density(&m)?;
        Ok(Self { m })
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix4<Complex64>) -> Self {
        Self { m }
    }

    pub fn from_real_diagonal(diag: [f64; 4]) -> Result<Self> {
        let d = Vector4::from(diag.map(|x| Complex64::new(x, 0.0)));
        Self::new(Matrix4::from_diagonal(&d))
    }

    pub fn maximally_mixed() -> Self {
        Self::from_matrix_unchecked(Matrix4::identity().scale(0.25))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.m
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let ev = self.m.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2], ev[3]];
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn purity(&self) -> f64 {
        (self.m * self.m).trace().re
    }

    /// Frobenius distance `‖self − other‖_F`.
    pub fn distance(&self, other: &DensityMatrix4) -> f64 {
        (self.m - other.m).norm()
    }

    /// Re/Im parts in row-major order, 32 values.
    pub fn to_flat_re_im(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(32);
        for i in 0..4 {
            for j in 0..4 {
                out.push(self.m[(i, j)].re);
                out.push(self.m[(i, j)].im);
            }
        }
        out
    }
}

fn check_density(m: &Matrix4<Complex64>) -> Result<()> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return invalid("density matrix has non-finite entries");
    }
    let herm_err = (m - m.adjoint()).camax();
    if herm_err > UNIT_TOL {
        return invalid(format!("matrix not Hermitian (deviation {herm_err:e})"));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > UNIT_TOL || tr.im.abs() > UNIT_TOL {
        return invalid(format!("trace {tr} differs from 1"));
    }
    let hermitized = (m + m.adjoint()).scale(0.5);
    let min_ev = hermitized
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_ev < -PSD_TOL {
        return invalid(format!("matrix not PSD (eigenvalue {min_ev:e})"));
    }
    Ok(())
}

/// Pure-state projector `|ψ⟩⟨ψ|`.
pub fn ket_to_density(ket: &JointKet) -> Result<DensityMatrix4> {
    if (ket.norm() - 1.0).abs() > UNIT_TOL {
        return invalid(format!("ket norm {} is not 1", ket.norm()));
    }
    let v = ket.vector();
    Ok(DensityMatrix4::from_matrix_unchecked(v * v.adjoint()))
}

/// `⟨target|ρ|target⟩`, clipped to `[0, 1]`.
pub fn fidelity_pure(rho: &DensityMatrix4, target: &JointKet) -> Result<f64> {
    check_density(rho.matrix())?;
    if (target.norm() - 1.0).abs() > UNIT_TOL {
        return invalid("fidelity target is not normalized");
    }
    let v = target.vector();
    let f = v.dotc(&(rho.matrix() * v)).re;
    Ok(f.clamp(0.0, 1.0))
}
