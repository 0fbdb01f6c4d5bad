//! Experiment configuration.
//!
//! The file format is TOML: flat keys plus the sections `[sweep]`,
//! `[mixture]`, `[noise]`, `[plate]` and `[tomography]`. Angles accept a unit
//! suffix (`"45deg"`, `"0.5rad"`), lengths likewise (`"199.94um"`, `"102.36mm"`,
//! `"800nm"`, `"0.1m"`). Bare numbers are radians and meters. A list may be
//! written out explicitly or as `{ start = .., stop = .., steps = N }`
//! (inclusive, evenly spaced). Every key is optional; missing keys take the
//! defaults of [`ExperimentConfig::default`].

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::measurement::{SamplingMode, MIN_BOOTSTRAP};
use crate::noise::{NoiseModel, DEFAULT_VISIBILITY, DEFAULT_WHITE_WEIGHT};
use crate::plate::PlateGeometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    PhaseSweep,
    BetaSweep,
    MixtureSweep,
    PlateCalibration,
    CountsDemo,
    TomographyDemo,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::PhaseSweep,
        Scenario::BetaSweep,
        Scenario::MixtureSweep,
        Scenario::PlateCalibration,
        Scenario::CountsDemo,
        Scenario::TomographyDemo,
    ];

    /// CLI subcommand name.
    pub fn command(self) -> &'static str {
        match self {
            Scenario::PhaseSweep => "phase-sweep",
            Scenario::BetaSweep => "beta-sweep",
            Scenario::MixtureSweep => "mixture-sweep",
            Scenario::PlateCalibration => "calibrate-plate",
            Scenario::CountsDemo => "counts-demo",
            Scenario::TomographyDemo => "tomography-demo",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.command())
    }
}

/// Whether the phase sweep is driven by phases or by plate displacements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    #[default]
    Phi,
    X,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureConfig {
    pub beta: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub p_list: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyConfig {
    pub shots: u64,
    pub beta_list: Vec<f64>,
    pub phi_list: Vec<f64>,
}

/// Validated configuration, angles in radians and lengths in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Option<Scenario>,
    pub seed: u64,
    /// Coincidences per measurement setting.
    pub shots: u64,
    pub bootstrap: usize,
    pub sampling: SamplingMode,
    pub axis: SweepAxis,
    pub beta_list: Vec<f64>,
    pub phi_list: Vec<f64>,
    pub x_list: Vec<f64>,
    pub mixture: MixtureConfig,
    pub noise: NoiseModel,
    /// Reported two-photon interference visibility; kept separate from `noise.f`.
    pub hom_visibility: f64,
    pub plate: PlateGeometry,
    pub tomography: TomographyConfig,
}

fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..steps)
            .map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let deg = |d: f64| d.to_radians();
        Self {
            scenario: None,
            seed: 2024,
            shots: 5000,
            bootstrap: 1000,
            sampling: SamplingMode::Multinomial,
            axis: SweepAxis::Phi,
            beta_list: vec![deg(10.0), deg(20.0), deg(30.0), deg(45.0)],
            phi_list: linspace(0.0, PI, 13),
            x_list: linspace(0.0, 10e-3, 21),
            mixture: MixtureConfig {
                beta: FRAC_PI_4,
                phi1: 0.0,
                phi2: PI,
                p_list: linspace(0.0, 1.0, 11),
            },
            noise: NoiseModel::default(),
            hom_visibility: DEFAULT_VISIBILITY,
            plate: PlateGeometry::default(),
            tomography: TomographyConfig {
                shots: 100_000,
                beta_list: vec![FRAC_PI_4],
                phi_list: linspace(0.0, PI, 8),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn cfg_err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy)]
enum Unit {
    Angle,
    Length,
    Plain,
}

/// A number or a string with a unit suffix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Quantity {
    Int(i64),
    Number(f64),
    Text(String),
}

impl Quantity {
    fn value(&self, unit: Unit) -> Result<f64, ConfigError> {
        match self {
            Quantity::Int(v) => Ok(*v as f64),
            Quantity::Number(v) => Ok(*v),
            Quantity::Text(s) => parse_quantity(s, unit),
        }
    }
}

fn parse_quantity(text: &str, unit: Unit) -> Result<f64, ConfigError> {
    let s = text.trim();
    let split = s
        .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
        .unwrap_or(s.len());
    let (num, suffix) = s.split_at(split);
    let value = f64::from_str(num.trim())
        .map_err(|_| ConfigError(format!("cannot parse number in {text:?}")))?;
    let scale = match (unit, suffix.trim()) {
        (_, "") => 1.0,
        (Unit::Angle, "rad") => 1.0,
        (Unit::Angle, "deg" | "°") => PI / 180.0,
        (Unit::Length, "m") => 1.0,
        (Unit::Length, "mm") => 1e-3,
        (Unit::Length, "um" | "µm" | "μm") => 1e-6,
        (Unit::Length, "nm") => 1e-9,
        (_, other) => return cfg_err(format!("unknown unit {other:?} in {text:?}")),
    };
    let v = value * scale;
    if !v.is_finite() {
        return cfg_err(format!("{text:?} is not finite"));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum SweepSpec {
    List(Vec<Quantity>),
    Range { start: Quantity, stop: Quantity, steps: usize },
}

impl SweepSpec {
    fn values(&self, unit: Unit) -> Result<Vec<f64>, ConfigError> {
        match self {
            SweepSpec::List(v) => v.iter().map(|q| q.value(unit)).collect(),
            SweepSpec::Range { start, stop, steps } => {
                Ok(linspace(start.value(unit)?, stop.value(unit)?, *steps))
            }
        }
    }

    fn from_values(v: &[f64]) -> Self {
        SweepSpec::List(v.iter().map(|&x| Quantity::Number(x)).collect())
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(skip_serializing_if = "Option::is_none")]
    axis: Option<SweepAxis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<SweepSpec>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMixture {
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi1: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi2: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<SweepSpec>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    #[serde(rename = "F", skip_serializing_if = "Option::is_none")]
    f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hom_visibility: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlate {
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<Quantity>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTomography {
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<SweepSpec>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario: Option<Scenario>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bootstrap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampling: Option<SamplingMode>,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    mixture: RawMixture,
    #[serde(default)]
    noise: RawNoise,
    #[serde(default)]
    plate: RawPlate,
    #[serde(default)]
    tomography: RawTomography,
}

fn pick_list(spec: &Option<SweepSpec>, unit: Unit, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
    spec.as_ref().map_or_else(|| Ok(default.to_vec()), |s| s.values(unit))
}

fn pick(q: &Option<Quantity>, unit: Unit, default: f64) -> Result<f64, ConfigError> {
    q.as_ref().map_or(Ok(default), |q| q.value(unit))
}

impl ExperimentConfig {
    /// Parses and validates a configuration file's contents.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| ConfigError(format!("config parse error: {e}")))?;
        let d = ExperimentConfig::default();
        let noise_f = raw.noise.f.unwrap_or(d.noise.f);
        let noise_a = raw.noise.a.unwrap_or(DEFAULT_WHITE_WEIGHT);
        let noise = NoiseModel::new(noise_f, noise_a).map_err(|e| ConfigError(e.to_string()))?;
        let cfg = ExperimentConfig {
            scenario: raw.scenario,
            seed: raw.seed.unwrap_or(d.seed),
            shots: raw.shots.unwrap_or(d.shots),
            bootstrap: raw.bootstrap.unwrap_or(d.bootstrap),
            sampling: raw.sampling.unwrap_or(d.sampling),
            axis: raw.sweep.axis.unwrap_or(d.axis),
            beta_list: pick_list(&raw.sweep.beta, Unit::Angle, &d.beta_list)?,
            phi_list: pick_list(&raw.sweep.phi, Unit::Angle, &d.phi_list)?,
            x_list: pick_list(&raw.sweep.x, Unit::Length, &d.x_list)?,
            mixture: MixtureConfig {
                beta: pick(&raw.mixture.beta, Unit::Angle, d.mixture.beta)?,
                phi1: pick(&raw.mixture.phi1, Unit::Angle, d.mixture.phi1)?,
                phi2: pick(&raw.mixture.phi2, Unit::Angle, d.mixture.phi2)?,
                p_list: pick_list(&raw.mixture.p, Unit::Plain, &d.mixture.p_list)?,
            },
            noise,
            hom_visibility: raw.noise.hom_visibility.unwrap_or(d.hom_visibility),
            plate: PlateGeometry {
                d: pick(&raw.plate.d, Unit::Length, d.plate.d)?,
                n: raw.plate.n.unwrap_or(d.plate.n),
                n0: raw.plate.n0.unwrap_or(d.plate.n0),
                r: pick(&raw.plate.r, Unit::Length, d.plate.r)?,
                lambda: pick(&raw.plate.lambda, Unit::Length, d.plate.lambda)?,
            },
            tomography: TomographyConfig {
                shots: raw.tomography.shots.unwrap_or(d.tomography.shots),
                beta_list: pick_list(&raw.tomography.beta, Unit::Angle, &d.tomography.beta_list)?,
                phi_list: pick_list(&raw.tomography.phi, Unit::Angle, &d.tomography.phi_list)?,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Writes every field explicitly (radians and meters as bare numbers).
    pub fn to_toml(&self) -> String {
        let num = Quantity::Number;
        let raw = RawConfig {
            scenario: self.scenario,
            seed: Some(self.seed),
            shots: Some(self.shots),
            bootstrap: Some(self.bootstrap),
            sampling: Some(self.sampling),
            sweep: RawSweep {
                axis: Some(self.axis),
                beta: Some(SweepSpec::from_values(&self.beta_list)),
                phi: Some(SweepSpec::from_values(&self.phi_list)),
                x: Some(SweepSpec::from_values(&self.x_list)),
            },
            mixture: RawMixture {
                beta: Some(num(self.mixture.beta)),
                phi1: Some(num(self.mixture.phi1)),
                phi2: Some(num(self.mixture.phi2)),
                p: Some(SweepSpec::from_values(&self.mixture.p_list)),
            },
            noise: RawNoise {
                f: Some(self.noise.f),
                a: Some(self.noise.a),
                hom_visibility: Some(self.hom_visibility),
            },
            plate: RawPlate {
                d: Some(num(self.plate.d)),
                n: Some(self.plate.n),
                n0: Some(self.plate.n0),
                r: Some(num(self.plate.r)),
                lambda: Some(num(self.plate.lambda)),
            },
            tomography: RawTomography {
                shots: Some(self.tomography.shots),
                beta: Some(SweepSpec::from_values(&self.tomography.beta_list)),
                phi: Some(SweepSpec::from_values(&self.tomography.phi_list)),
            },
        };
        toml::to_string(&raw).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.shots == 0 {
            return cfg_err("shots must be at least 1");
        }
        if self.tomography.shots == 0 {
            return cfg_err("tomography.shots must be at least 1");
        }
        if self.bootstrap < MIN_BOOTSTRAP {
            return cfg_err(format!("bootstrap must be at least {MIN_BOOTSTRAP}"));
        }
        self.noise.validate().map_err(|e| ConfigError(e.to_string()))?;
        self.plate.validate().map_err(|e| ConfigError(e.to_string()))?;
        if !(0.0..=1.0).contains(&self.hom_visibility) {
            return cfg_err("noise.hom_visibility must lie in [0, 1]");
        }
        let lists: [(&str, &[f64]); 7] = [
            ("sweep.beta", &self.beta_list),
            ("sweep.phi", &self.phi_list),
            ("sweep.x", &self.x_list),
            ("mixture.p", &self.mixture.p_list),
            ("tomography.beta", &self.tomography.beta_list),
            ("tomography.phi", &self.tomography.phi_list),
            ("mixture.beta", std::slice::from_ref(&self.mixture.beta)),
        ];
        for (name, values) in lists {
            if values.is_empty() {
                return cfg_err(format!("{name} must not be empty"));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return cfg_err(format!("{name} contains non-finite values"));
            }
        }
        let beta_ok = |b: &f64| (0.0..=std::f64::consts::FRAC_PI_2).contains(b);
        if !self.beta_list.iter().all(beta_ok)
            || !self.tomography.beta_list.iter().all(beta_ok)
            || !beta_ok(&self.mixture.beta)
        {
            return cfg_err("beta values must lie in [0deg, 90deg]");
        }
        if !self.mixture.p_list.iter().all(|p| (0.0..=1.0).contains(p)) {
            return cfg_err("mixture.p values must lie in [0, 1]");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(ExperimentConfig::parse("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn units_are_converted() {
        let cfg = ExperimentConfig::parse(
            r#"
            seed = 9
            [sweep]
            beta = ["45deg", 0.5]
            phi = { start = "0deg", stop = "180deg", steps = 5 }
            x = ["1mm", "2500um"]
            [plate]
            d = "200um"
            lambda = "810nm"
            [mixture]
            phi2 = "90deg"
            p = [0, 0.5, 1]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_abs_diff_eq!(cfg.beta_list[0], FRAC_PI_4, epsilon = 1e-15);
        assert_eq!(cfg.beta_list[1], 0.5);
        assert_eq!(cfg.phi_list.len(), 5);
        assert_abs_diff_eq!(cfg.phi_list[4], PI, epsilon = 1e-15);
        assert_abs_diff_eq!(cfg.x_list[1], 2.5e-3, epsilon = 1e-18);
        assert_abs_diff_eq!(cfg.plate.d, 200e-6, epsilon = 1e-18);
        assert_abs_diff_eq!(cfg.plate.lambda, 810e-9, epsilon = 1e-20);
        assert_abs_diff_eq!(cfg.mixture.phi2, PI / 2.0, epsilon = 1e-15);
        assert_eq!(cfg.mixture.p_list, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn round_trip_is_identity() {
        let text = r#"
            scenario = "mixture-sweep"
            shots = 1234
            sampling = "poisson"
            [sweep]
            axis = "x"
            beta = ["10deg", "33.3deg"]
            [noise]
            F = 0.95
            a = 0.3
        "#;
        let first = ExperimentConfig::parse(text).unwrap();
        let second = ExperimentConfig::parse(&first.to_toml()).unwrap();
        assert_eq!(first, second);
        let third = ExperimentConfig::parse(&second.to_toml()).unwrap();
        assert_eq!(second, third);
        assert_eq!(first.noise.b, 0.7);
    }

    #[test]
    fn bad_configs_rejected() {
        for text in [
            "shots = 0",
            "bootstrap = 10",
            "[sweep]\nphi = []",
            "[sweep]\nbeta = [\"100deg\"]",
            "[noise]\nF = 1.5",
            "[plate]\nr = \"5furlong\"",
            "unknown_key = 3",
            "[mixture]\np = [1.2]",
            "[sweep]\nbeta = \"not a list\"",
        ] {
            assert!(ExperimentConfig::parse(text).is_err(), "{text}");
        }
    }
}
