use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use weakbeam_cli::output::{self, SWEEP_COLUMNS};
use weakbeam_cli::scenario::parse_plane;
use weakbeam_cli::{emit_profile, run_scenario, validate_config, CliError, ScenarioConfig};

const AFTER_HELP: &str = "\
Sweep/run output columns (CSV header order, JSONL keys):
  index, scenario, parameter, value, measured_centroid, fitted_center,
  predicted, signed_prediction, abs_error, relative_error, pps_measured,
  pps_predicted, weak_regime_margin, diffraction_margin, weak_regime_ok,
  grid_n, grid_dx, warnings
Profile columns: x, re, im, intensity
Lengths in m, momenta in 1/m, phases in rad; floats carry 17 significant digits.";

#[derive(Parser)]
#[command(name = "weakbeam", version, about = "Weak-value beam deflection in a Sagnac interferometer", after_help = AFTER_HELP)]
struct Cli {
    /// Recorded in the summary; the models are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the config (every sweep point if one is declared).
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides output.path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a config that declares a sweep section.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the field at one plane (lens, mirror, detector).
    Profile {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        plane: String,
        /// Overrides output.path; stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path) -> anyhow::Result<ScenarioConfig> {
    let raw =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(validate_config(&raw).map_err(CliError::from)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(seed) = cli.seed {
        println!("seed: {seed}");
    }
    match cli.command {
        Command::Run { config, out } => sweep(&config, out, false),
        Command::Sweep { config, out } => sweep(&config, out, true),
        Command::Profile { config, plane, out } => {
            let cfg = load(&config)?;
            let plane = parse_plane(&plane)
                .with_context(|| format!("unknown plane {plane:?} (lens, mirror, detector)"))?;
            let field = emit_profile(&cfg, plane)?;
            let text = output::render_profile(&field, cfg.output.format);
            match out.or(cfg.output.path) {
                Some(path) => {
                    output::write_file(&path, &text)?;
                    println!("{} samples written to {}", field.grid().n(), path.display());
                }
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}

fn sweep(config: &Path, out: Option<PathBuf>, require_sweep: bool) -> anyhow::Result<()> {
    let cfg = load(config)?;
    if require_sweep && cfg.sweep.is_none() {
        return Err(CliError::NoSweep.into());
    }
    let rows = run_scenario(&cfg)?;
    print!(
        "scenario: {}\n{}",
        cfg.scenario.name(),
        output::summary_table(&rows)
    );
    if let Some(path) = out.or(cfg.output.path) {
        output::write_file(&path, &output::render_sweep(&rows, cfg.output.format))?;
        println!(
            "{} rows ({} columns) written to {}",
            rows.len(),
            SWEEP_COLUMNS.len(),
            path.display()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<CliError>() {
                Some(CliError::Config(_)) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
