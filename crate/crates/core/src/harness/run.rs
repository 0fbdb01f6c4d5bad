//! Scenario runners. Each returns a [`Table`] whose rows follow the configured
//! sweep order. Sweep point `i` samples with seed `derive_seed(seed, 2i)` and
//! bootstraps with `derive_seed(seed, 2i + 1)`, so output is independent of
//! how the points are scheduled.

use super::config::{ExperimentConfig, Scenario, SweepAxis};
use super::table::{Cell, Table};
use super::HarnessError;
use crate::exec::Execution;
use crate::measurement::{
    estimate_o, estimate_phase_with, outcome_probs, rotate_density, sample_counts_mode, Bootstrap,
    CoincidenceCounts,
};
use crate::mixture::{estimate_p_with, mixed_state, mixture_expectation, MixtureSpec};
use crate::noise::{fit_noise, noisy_state};
use crate::plate::phase_from_displacement;
use crate::rng::derive_seed;
use crate::slocc::{experimental_pair, indistinguishability, prepare_lr, PreparationSettings};
use crate::states::{ket_to_density, DensityMatrix4};
use crate::tomography::{extract_params, reconstruct, simulate_tomography};
use crate::Result;

pub fn run_scenario(scenario: Scenario, cfg: &ExperimentConfig) -> std::result::Result<Table, HarnessError> {
    cfg.validate()?;
    let table = match scenario {
        Scenario::PhaseSweep => run_phase_sweep(cfg)?,
        Scenario::BetaSweep => run_beta_sweep(cfg)?,
        Scenario::MixtureSweep => run_mixture_sweep(cfg)?,
        Scenario::PlateCalibration => run_plate_calibration(cfg)?,
        Scenario::CountsDemo => run_counts_demo(cfg)?,
        Scenario::TomographyDemo => run_tomography_demo(cfg)?,
    };
    Ok(table)
}

fn ideal_state(beta: f64, phi: f64) -> Result<DensityMatrix4> {
    ket_to_density(&prepare_lr(&PreparationSettings::new(beta, phi)?))
}

/// Rotated experimental state `(M⊗M) ρe (M⊗M)†` ready for coincidence counting.
fn measured(ideal: &DensityMatrix4, cfg: &ExperimentConfig) -> Result<DensityMatrix4> {
    Ok(rotate_density(&noisy_state(ideal, &cfg.noise)?))
}

fn sample(rho: &DensityMatrix4, cfg: &ExperimentConfig, point: usize) -> Result<CoincidenceCounts> {
    let probs = outcome_probs(rho)?;
    sample_counts_mode(&probs, cfg.shots, derive_seed(cfg.seed, 2 * point as u64), cfg.sampling)
}

fn bootstrap(cfg: &ExperimentConfig, point: usize) -> Bootstrap {
    Bootstrap::new(cfg.bootstrap, derive_seed(cfg.seed, 2 * point as u64 + 1))
        .with_execution(Execution::Sequential)
}

fn grid(outer: &[f64], inner: &[f64]) -> Vec<(f64, f64)> {
    outer.iter().flat_map(|&a| inner.iter().map(move |&b| (a, b))).collect()
}

/// Phases for the sweep: the configured list, or wrapped plate phases of `x_list`.
fn sweep_phases(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    match cfg.axis {
        SweepAxis::Phi => Ok(cfg.phi_list.clone()),
        SweepAxis::X => cfg
            .x_list
            .iter()
            .map(|&x| Ok(phase_from_displacement(x, &cfg.plate)?.wrapped))
            .collect(),
    }
}

/// `⟨O⟩` against `cos φ` for every `(β, φ)`.
pub fn run_phase_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let points = grid(&cfg.beta_list, &sweep_phases(cfg)?);
    let rows = Execution::default().try_map(points.len(), |i| {
        let (beta, phi) = points[i];
        let o_ideal = (2.0 * beta).sin() * phi.cos();
        let counts = sample(&measured(&ideal_state(beta, phi)?, cfg)?, cfg, i)?;
        let o_hat = estimate_o(&counts)?;
        let est = estimate_phase_with(o_hat, beta, cfg.noise.f, &counts, &bootstrap(cfg, i))?;
        Ok(vec![
            Cell::from(beta.to_degrees()),
            Cell::from(phi),
            Cell::from(phi.cos()),
            Cell::from(o_ideal),
            Cell::from(cfg.noise.f * o_ideal),
            Cell::from(o_hat),
            Cell::from(est.o_sigma),
            Cell::from(est.phi_hat),
            Cell::from(est.sigma),
        ])
    })?;
    let mut t = Table::new(&[
        "beta_deg",
        "phi_rad",
        "cos_phi",
        "O_ideal",
        "O_noisy_expected",
        "O_sampled",
        "O_sampled_err",
        "phi_hat",
        "phi_err",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// `⟨O⟩` against plate displacement for each β, with the indistinguishability.
pub fn run_beta_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let points = grid(&cfg.beta_list, &cfg.x_list);
    let rows = Execution::default().try_map(points.len(), |i| {
        let (beta, x) = points[i];
        let plate = phase_from_displacement(x, &cfg.plate)?;
        let phi = plate.wrapped;
        let indist = indistinguishability(&experimental_pair(beta, phi)?)?;
        let o_ideal = (2.0 * beta).sin() * phi.cos();
        let counts = sample(&measured(&ideal_state(beta, phi)?, cfg)?, cfg, i)?;
        let o_hat = estimate_o(&counts)?;
        let o_err = crate::measurement::std_dev(&bootstrap(cfg, i).replicate(&counts, estimate_o)?);
        Ok(vec![
            Cell::from(beta.to_degrees()),
            Cell::from(indist),
            Cell::from((2.0 * beta).sin()),
            Cell::from(x * 1e3),
            Cell::from(phi),
            Cell::from(o_ideal),
            Cell::from(cfg.noise.f * o_ideal),
            Cell::from(o_hat),
            Cell::from(o_err),
        ])
    })?;
    let mut t = Table::new(&[
        "beta_deg",
        "indist",
        "band_halfwidth",
        "x_mm",
        "phi_rad",
        "O_ideal",
        "O_noisy_expected",
        "O_sampled",
        "O_sampled_err",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// Two-type mixture over the configured `p` grid with known phases.
pub fn run_mixture_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let m = &cfg.mixture;
    let rows = Execution::default().try_map(m.p_list.len(), |i| {
        let spec = MixtureSpec::new(m.p_list[i], m.phi1, m.phi2, m.beta)?;
        let counts = sample(&measured(&mixed_state(&spec), cfg)?, cfg, i)?;
        let o_hat = estimate_o(&counts)?;
        let est = estimate_p_with(o_hat, m.phi1, m.phi2, m.beta, cfg.noise.f, &counts, &bootstrap(cfg, i))?;
        Ok(vec![
            Cell::from(spec.p()),
            Cell::from(spec.phi1()),
            Cell::from(spec.phi2()),
            Cell::from(mixture_expectation(&spec)),
            Cell::from(o_hat),
            Cell::from(est.p_hat_raw),
            Cell::from(est.p_hat),
            Cell::from(est.sigma),
        ])
    })?;
    let mut t = Table::new(&["p", "phi1", "phi2", "O_ideal", "O_sampled", "p_hat_raw", "p_hat", "p_err"]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// Plate phase over the configured displacements.
pub fn run_plate_calibration(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::new(&["x_mm", "phi_unwrapped_rad", "phi_wrapped_rad"]);
    for &x in &cfg.x_list {
        let p = phase_from_displacement(x, &cfg.plate)?;
        t.push(vec![Cell::from(x * 1e3), Cell::from(p.unwrapped), Cell::from(p.wrapped)]);
    }
    Ok(t)
}

/// Raw coincidence tallies for every `(β, φ)`.
pub fn run_counts_demo(cfg: &ExperimentConfig) -> Result<Table> {
    let points = grid(&cfg.beta_list, &sweep_phases(cfg)?);
    let rows = Execution::default().try_map(points.len(), |i| {
        let (beta, phi) = points[i];
        let counts = sample(&measured(&ideal_state(beta, phi)?, cfg)?, cfg, i)?;
        let mut row = vec![Cell::from(beta.to_degrees()), Cell::from(phi), Cell::from(cfg.noise.f)];
        row.extend(counts.as_array().map(Cell::from));
        row.push(Cell::from(counts.total));
        row.push(Cell::from(estimate_o(&counts)?));
        Ok(row)
    })?;
    let mut t = Table::new(&["beta_deg", "phi_rad", "F", "n13", "n14", "n23", "n24", "total", "O_sampled"]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// Tomography of each configured state, parameter extraction and a joint noise fit.
pub fn run_tomography_demo(cfg: &ExperimentConfig) -> Result<Table> {
    let tomo = &cfg.tomography;
    let points = grid(&tomo.beta_list, &tomo.phi_list);
    let states = Execution::default().try_map(points.len(), |i| {
        let (beta, phi) = points[i];
        let rho_e = noisy_state(&ideal_state(beta, phi)?, &cfg.noise)?;
        let data = simulate_tomography(&rho_e, tomo.shots, derive_seed(cfg.seed, i as u64))?;
        let rho_hat = reconstruct(&data)?;
        let params = extract_params(&rho_hat)?;
        Ok((rho_hat, params))
    })?;
    let fit_input: Vec<_> = states.iter().map(|(rho, p)| (*rho, p.settings())).collect();
    let fit = fit_noise(&fit_input)?;

    let mut header: Vec<String> = [
        "beta_set_deg",
        "phi_set_rad",
        "beta_hat_deg",
        "phi_hat_rad",
        "fidelity_to_ideal",
        "low_coherence",
        "F_fit",
        "a_fit",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for i in 0..4 {
        for j in 0..4 {
            header.push(format!("re_{i}{j}"));
            header.push(format!("im_{i}{j}"));
        }
    }
    let mut t = Table::with_header(header);
    for ((beta, phi), (rho_hat, params)) in points.iter().zip(&states) {
        let mut row = vec![
            Cell::from(beta.to_degrees()),
            Cell::from(*phi),
            Cell::from(params.beta.to_degrees()),
            Cell::from(params.phi),
            Cell::from(params.fidelity_to_ideal),
            Cell::from(params.low_coherence),
            Cell::from(fit.f),
            Cell::from(fit.a),
        ];
        row.extend(rho_hat.to_flat_re_im().into_iter().map(Cell::from));
        t.push(row);
    }
    Ok(t)
}
