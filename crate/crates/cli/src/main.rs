//! `thermopiezo`: runs, refinement studies, density checks and hysteresis loops
//! for the thermo-piezoelectric rod.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver error, 4 structural
//! assumption violated, 5 output error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thermopiezo_core::loops::DriveSpec;

use commands::Failure;
use config::ScenarioConfig;

#[derive(Debug, Parser)]
#[command(name = "thermopiezo", version, about = "Thermo-piezoelectric rod with temperature-dependent Preisach hysteresis")]
struct Cli {
    /// Print the complete default configuration and exit.
    #[arg(long)]
    print_defaults: bool,

    /// Override the seed stored in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory receiving one subdirectory per invocation.
    #[arg(long, global = true, default_value = "runs")]
    out: PathBuf,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the scenario to its final time.
    Run { config: PathBuf },
    /// Repeat the run for several mode counts and report field distances.
    Converge {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        modes: Vec<usize>,
        /// Also run every mode count at half the time step.
        #[arg(long)]
        halve_dt: bool,
    },
    /// Check the density and material against the structural assumptions.
    CheckDensity { config: PathBuf },
    /// Quasi-static hysteresis loops at fixed temperature.
    Loops {
        config: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 2)]
        cycles: usize,
        /// Steps per cycle, a multiple of 4.
        #[arg(long, default_value_t = 400)]
        samples: usize,
        /// Temperatures; defaults to the reference temperature.
        #[arg(long, value_delimiter = ',')]
        theta: Vec<f64>,
    },
}

const DEFAULTS_HEADER: &str = "\
# Every key is optional; omitted keys take the values below.
# density.kind: canonical | uniform-test | zero | tabulated (path = CSV with header theta,r,v,psi)
# initial.preset: rest | mode (k, amplitude) | smooth (amplitude, velocity, theta_ramp)
#                 | coefficients (u0, u1, theta0)
# discretization.n_nodes: quadrature nodes, 8m + 1 when omitted
# material.caloric: cube-root-cv | constant-cv

";

fn load(path: &PathBuf, seed: Option<u64>) -> Result<ScenarioConfig, Failure> {
    let mut cfg = ScenarioConfig::load(path).map_err(Failure::Config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    if cli.print_defaults {
        print!("{DEFAULTS_HEADER}{}", ScenarioConfig::default().to_toml());
        return Ok(());
    }
    let Some(command) = cli.command else {
        eprintln!("nothing to do; see --help");
        return Err(Failure::Config(config::ConfigError { problems: vec![("(command)".into(), "missing".into())] }));
    };
    match command {
        Command::Run { config } => commands::run(&load(&config, cli.seed)?, &cli.out),
        Command::Converge { config, modes, halve_dt } => {
            commands::converge(&load(&config, cli.seed)?, &modes, halve_dt, &cli.out)
        }
        Command::CheckDensity { config } => commands::check_density(&load(&config, cli.seed)?),
        Command::Loops { config, amplitude, cycles, samples, theta } => {
            let cfg = load(&config, cli.seed)?;
            let thetas = if theta.is_empty() { vec![cfg.material.theta_c] } else { theta };
            commands::loops(&cfg, &DriveSpec { amplitude, cycles, samples }, &thetas, &cli.out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
