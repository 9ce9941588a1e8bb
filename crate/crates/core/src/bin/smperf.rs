//! Command-line front end: load a config or preset, apply overrides, run.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use smperf::cli::{preset, ExperimentConfig, RunMode, SnrGrid};
use smperf::analysis::PrefactorMode;

/// Analytical BER bounds and Monte Carlo simulation for spatial-modulation
/// MIMO over correlated Rician fading.
#[derive(Debug, Parser)]
#[command(name = "smperf", version, about)]
struct Args {
    /// Path to a key=value config file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Built-in experiment preset: fig1, fig2 or fig3.
    #[arg(long)]
    preset: Option<String>,

    /// What to compute: bound, sim or both.
    #[arg(long, default_value = "both")]
    mode: String,

    /// Output CSV path (multi-rate runs get a _r<R> suffix per curve).
    #[arg(long, default_value = "smperf_results.csv")]
    out: PathBuf,

    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,

    /// Quadrature node count override.
    #[arg(long)]
    quad_nodes: Option<usize>,

    /// SNR grid override, START:STOP:STEP in dB.
    #[arg(long)]
    snr: Option<String>,

    /// Union-bound prefactor: paper or conventional.
    #[arg(long)]
    prefactor: Option<String>,
}

fn build_config(args: &Args) -> smperf::Result<(ExperimentConfig, RunMode)> {
    let mut config = match (&args.config, &args.preset) {
        (Some(path), None) => ExperimentConfig::from_file(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => {
            return Err(smperf::Error::Config {
                line: None,
                message: "give either --config PATH or --preset NAME".into(),
            });
        }
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(nodes) = args.quad_nodes {
        config.quad_nodes = nodes;
    }
    if let Some(snr) = &args.snr {
        config.snr = snr.parse::<SnrGrid>()?;
    }
    if let Some(prefactor) = &args.prefactor {
        config.prefactor = prefactor.parse::<PrefactorMode>()?;
    }
    let mode = args.mode.parse::<RunMode>()?;
    Ok((config, mode))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (config, mode) = match build_config(&args) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("smperf: {e}");
            return ExitCode::FAILURE;
        }
    };
    match smperf::cli::run(&config, mode, &args.out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("smperf: {e}");
            ExitCode::FAILURE
        }
    }
}
