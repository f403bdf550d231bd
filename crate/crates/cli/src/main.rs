//! `beamshape` command-line driver.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use log::error;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::commands::{Figure, Run};
use crate::config::Block;
use crate::error::CliError;
use crate::output::Outputs;

/// Default setup for `reproduce` without a config: 16×16 at 0.5λ, ±25°.
const REFERENCE_CONFIG: &str = r#"{"lattice": {"ny": 16, "nz": 16, "dy_over_lambda": 0.5, "dz_over_lambda": 0.5}}"#;

#[derive(Parser)]
#[command(version, about = "Phase-only beam broadening for planar phased arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `out` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Domain boundary, sampling grid and optional brute-force cloud.
    Domain,
    /// Array factor of a given excitation over the grid and principal cuts.
    Af,
    /// Polynomial phase-taper optimization.
    Pto,
    /// Odd/even pulse designs for amplitude-equivalent tapering.
    Tpt,
    /// Pulse-Doppler simulation of moving targets.
    Simulate,
    /// Metrics of stored pattern CSVs.
    Metrics,
    /// Plot-ready CSVs for one of the reference figures.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
}

impl Command {
    fn name(self) -> String {
        match self {
            Command::Reproduce { figure } => format!("reproduce {figure:?}").to_lowercase(),
            Command::Domain => "domain".into(),
            Command::Af => "af".into(),
            Command::Pto => "pto".into(),
            Command::Tpt => "tpt".into(),
            Command::Simulate => "simulate".into(),
            Command::Metrics => "metrics".into(),
        }
    }

    fn block(self) -> Option<Block> {
        match self {
            Command::Domain => Some(Block::Domain),
            Command::Af => Some(Block::Af),
            Command::Pto => Some(Block::Pto),
            Command::Tpt => Some(Block::Tpt),
            Command::Simulate => Some(Block::Simulate),
            Command::Metrics => Some(Block::Metrics),
            Command::Reproduce { .. } => None,
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    library_version: &'static str,
    command: String,
    config_sha256: String,
    seed: u64,
    threads: usize,
    wall_time_s: f64,
    timestamp_unix_s: u64,
    outputs: &'a [String],
    degenerate: Option<&'a str>,
}

fn execute(cli: &Cli) -> Result<Option<String>, CliError> {
    let started = Instant::now();
    let (text, cfg) = match (&cli.config, cli.command) {
        (Some(path), _) => config::load(path)?,
        (None, Command::Reproduce { .. }) => (REFERENCE_CONFIG.to_string(), config::parse(REFERENCE_CONFIG)?),
        (None, _) => return Err(CliError::Config("--config is required for this subcommand".into())),
    };
    if let Some(block) = cli.command.block() {
        cfg.check_block(block)?;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let seed = cli.seed.unwrap_or(cfg.seed);
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let mut run = Run::new(cfg, seed, Outputs::new(&out_dir)?)?;
    let cfg = run.cfg.clone();
    match cli.command {
        Command::Domain => commands::domain(&mut run, cfg.domain.as_ref().expect("checked block"))?,
        Command::Af => commands::af(&mut run, cfg.af.as_ref().expect("checked block"))?,
        Command::Pto => commands::pto(&mut run, cfg.pto.as_ref().expect("checked block"), "pto_")?,
        Command::Tpt => commands::tpt(&mut run, cfg.tpt.as_ref().expect("checked block"), "tpt_")?,
        Command::Simulate => commands::simulate(&mut run, cfg.simulate.as_ref().expect("checked block"))?,
        Command::Metrics => commands::metrics(&mut run, cfg.metrics.as_ref().expect("checked block"))?,
        Command::Reproduce { figure } => commands::reproduce(&mut run, figure)?,
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        library_version: beamshape::VERSION,
        command: cli.command.name(),
        config_sha256: format!("{:x}", Sha256::digest(text.as_bytes())),
        seed,
        threads: rayon::current_num_threads(),
        wall_time_s: started.elapsed().as_secs_f64(),
        timestamp_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        outputs: &run.out.files.clone(),
        degenerate: run.degenerate.as_deref(),
    };
    run.out.json("run_manifest.json", &manifest)?;
    Ok(run.degenerate)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(what)) => {
            error!("degenerate pattern: {what}");
            ExitCode::from(2)
        }
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
