//! Simulation of the sLOCC exchange-phase measurement for identical particles.
//!
//! Two independently prepared qubits are spread over two regions L and R,
//! post-selected on one particle per region, rotated by π/4 and measured in
//! coincidence. The resulting observable `⟨σz⊗σz⟩ = sin(2β) cos φ` exposes the
//! exchange phase φ of bosons, fermions or anyons.
//!
//! All 4-dimensional vectors and matrices use the fixed basis order
//! `[L↑R↑, L↑R↓, L↓R↑, L↓R↓]` (see [`states::BASIS_LABELS`]).

pub mod error;
pub mod exec;
pub mod harness;
pub mod measurement;
pub mod mixture;
pub mod noise;
pub mod plate;
pub mod rng;
pub mod slocc;
pub mod states;
pub mod tomography;

pub use error::{Error, Result};
pub use exec::Execution;
pub use measurement::{
    apply_rotation, estimate_o, estimate_phase, expectation_o, outcome_probs, rotate_density,
    sample_counts, CoincidenceCounts, OutcomeProbs, PhaseEstimate, SamplingMode,
};
pub use mixture::{estimate_p, mixed_state, mixture_expectation, MixtureEstimate, MixtureSpec};
pub use noise::{fit_noise, noisy_expectation_scaling, noisy_state, NoiseModel};
pub use plate::{displacement_from_phase, phase_from_displacement, PlateGeometry, PlatePhase};
pub use slocc::{
    deform, indistinguishability, prepare_lr, project_slocc, DeformedPair, PreparationSettings,
    SloccResult,
};
pub use states::{
    fidelity_pure, joint_amplitude, ket_to_density, normalize, DensityMatrix4, DetectionMode,
    JointKet, Pseudospin, Region, SingleParticleState, StatisticsParameter,
};
pub use tomography::{
    extract_params, reconstruct, simulate_tomography, ExtractedParams, Pauli, PauliSetting,
    TomographyData,
};

pub use num_complex::Complex64;
