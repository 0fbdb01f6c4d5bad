//! Batch experiment driver behind the `exchange-phase` binary.

pub mod config;
pub mod run;
pub mod table;

use std::fmt;

pub use config::{ConfigError, ExperimentConfig, Scenario, SweepAxis};
pub use run::run_scenario;
pub use table::{Cell, Table};

/// Environment variable naming the output directory when `--out` is absent.
pub const OUT_DIR_ENV: &str = "EXCHANGE_PHASE_OUT_DIR";

/// Harness failure, mapped onto process exit codes.
#[derive(Debug)]
pub enum HarnessError {
    Config(ConfigError),
    Numerical(crate::Error),
    Io(std::io::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Numerical(_) => 3,
            HarnessError::Io(_) => 1,
        }
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Config(e) => write!(f, "configuration error: {e}"),
            HarnessError::Numerical(e) => write!(f, "numerical error: {e}"),
            HarnessError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<ConfigError> for HarnessError {
    fn from(e: ConfigError) -> Self {
        HarnessError::Config(e)
    }
}

impl From<crate::Error> for HarnessError {
    fn from(e: crate::Error) -> Self {
        HarnessError::Numerical(e)
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e)
    }
}
