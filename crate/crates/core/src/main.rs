use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use exchange_phase::harness::{run_scenario, ExperimentConfig, HarnessError, Scenario, OUT_DIR_ENV};
use exchange_phase::NoiseModel;

#[derive(Parser)]
#[command(name = "exchange-phase", version, about = "Simulated sLOCC exchange-phase experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// ⟨O⟩ and φ̂ over a grid of β and φ (or plate displacements).
    PhaseSweep(Common),
    /// ⟨O⟩ against plate displacement for several β.
    BetaSweep(Common),
    /// Mixture-probability estimation over a p grid.
    MixtureSweep(Common),
    /// Plate displacement to injected phase.
    CalibratePlate(Common),
    /// Sampled coincidence tallies n13, n14, n23, n24.
    CountsDemo(Common),
    /// Tomographic reconstruction and noise fit.
    TomographyDemo(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; defaults to $EXCHANGE_PHASE_OUT_DIR/<command>.csv or stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Noise-free run (F = 1).
    #[arg(long)]
    ideal: bool,
}

fn run(scenario: Scenario, args: &Common) -> Result<(), HarnessError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::parse(&fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    cfg.scenario = Some(scenario);
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.ideal {
        cfg.noise = NoiseModel { f: 1.0, ..cfg.noise };
    }
    let csv = run_scenario(scenario, &cfg)?.to_csv();

    let target = args.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV).map(|dir| PathBuf::from(dir).join(format!("{scenario}.csv")))
    });
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, csv)?;
        }
        None => std::io::stdout().lock().write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (scenario, args) = match &cli.command {
        Command::PhaseSweep(a) => (Scenario::PhaseSweep, a),
        Command::BetaSweep(a) => (Scenario::BetaSweep, a),
        Command::MixtureSweep(a) => (Scenario::MixtureSweep, a),
        Command::CalibratePlate(a) => (Scenario::PlateCalibration, a),
        Command::CountsDemo(a) => (Scenario::CountsDemo, a),
        Command::TomographyDemo(a) => (Scenario::TomographyDemo, a),
    };
    match run(scenario, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("exchange-phase {scenario}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
