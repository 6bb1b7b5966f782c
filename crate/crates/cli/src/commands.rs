use std::fs;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use thermopiezo_core::density::hypothesis_report;
use thermopiezo_core::inversion::DEFAULT_TOL;
use thermopiezo_core::loops::{cycle_balances, q_loop, strain_loop, DriveSpec};
use thermopiezo_core::rod::{l2_distance, NoOutput, RunSummary};
use thermopiezo_core::{run_simulation, Error, Rod, SamplingSpec, Scenario};

use crate::config::{ConfigError, ScenarioConfig};
use crate::output::{run_dir, write_csv, write_json, CsvObserver, SnapshotFile};

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Solver(String),
    Hypotheses(Vec<String>),
    Io(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Hypotheses(_) => 4,
            Failure::Io(_) => 5,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "{e}"),
            Failure::Solver(e) => write!(f, "solver error: {e}"),
            Failure::Hypotheses(items) => write!(f, "structural assumptions violated: {}", items.join(", ")),
            Failure::Io(e) => write!(f, "output error: {e:#}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

fn classify(e: Error) -> Failure {
    match e {
        Error::Hypotheses(items) => Failure::Hypotheses(items),
        Error::Output(msg) => Failure::Io(anyhow::anyhow!(msg)),
        Error::InvalidConfig(msg) | Error::Table(msg) | Error::InvalidDensity(msg) => {
            Failure::Config(ConfigError { problems: vec![("density".into(), msg)] })
        }
        other => Failure::Solver(other.to_string()),
    }
}

/// Contents of `summary.json`.
#[derive(Debug, Serialize)]
struct RunReport<'a> {
    config_hash: &'a str,
    seed: u64,
    status: &'static str,
    exit_code: u8,
    error: Option<String>,
    failed_items: Vec<String>,
    snapshots: Vec<SnapshotFile>,
    summary: Option<RunSummary>,
}

pub fn run(cfg: &ScenarioConfig, out: &Path) -> Result<(), Failure> {
    let hash = cfg.hash();
    let dir = run_dir(out, &hash)?;
    fs::write(dir.join("config.toml"), cfg.to_toml()).context("writing config.toml")?;
    let scenario = cfg.scenario();
    let mut obs = CsvObserver::create(&dir)?;
    let result = run_simulation(&scenario, &mut obs, cfg.skip_hypotheses);
    let snapshots = obs.finish()?;

    let (summary, failure) = match result {
        Ok(outcome) => {
            let rod = scenario.rod().map_err(classify)?;
            rod.checkpoint(&outcome.state, &hash)
                .write(dir.join("checkpoint.json"))
                .map_err(|e| Failure::Io(anyhow::anyhow!(e)))?;
            (Some(outcome.summary), outcome.error.map(classify))
        }
        Err(e) => (None, Some(classify(e))),
    };
    let report = RunReport {
        config_hash: &hash,
        seed: cfg.seed,
        status: match &failure {
            None => "completed",
            Some(Failure::Hypotheses(_)) => "rejected",
            Some(_) => "failed",
        },
        exit_code: failure.as_ref().map_or(0, Failure::code),
        error: failure.as_ref().map(ToString::to_string),
        failed_items: match &failure {
            Some(Failure::Hypotheses(items)) => items.clone(),
            _ => Vec::new(),
        },
        snapshots,
        summary,
    };
    write_json(&dir.join("summary.json"), &report)?;
    println!("{}", dir.display());
    if let Some(s) = &report.summary {
        println!(
            "t = {:.6}  steps = {}  E: {:.9e} -> {:.9e}  min θ = {:.6e}  max q residual = {:.2e}  cut-offs active: {}",
            s.t,
            s.steps,
            s.energy_initial.total,
            s.energy_final.total,
            s.min_theta,
            s.max_q_residual,
            s.cutoffs.any()
        );
    }
    failure.map_or(Ok(()), Err)
}

fn check_hypotheses(rod: &Rod) -> Result<(), Failure> {
    let report = hypothesis_report(rod.density(), rod.material(), &SamplingSpec::default());
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Hypotheses(report.failed_items().into_iter().map(String::from).collect()))
    }
}

#[derive(Debug, Serialize)]
struct ConvergeRow {
    m: usize,
    n_nodes: usize,
    dt: f64,
    steps: u64,
    energy_drift: f64,
    max_energy_increase: f64,
    /// Distances to the next row's run at the same `dt`.
    l2_u: Option<f64>,
    l2_theta: Option<f64>,
}

pub fn converge(cfg: &ScenarioConfig, modes: &[usize], halve_dt: bool, out: &Path) -> Result<(), Failure> {
    if modes.is_empty() || modes.windows(2).any(|w| w[0] >= w[1]) || modes[0] == 0 {
        return Err(Failure::Config(ConfigError {
            problems: vec![("--modes".into(), format!("must be strictly increasing and positive (got {modes:?})"))],
        }));
    }
    let dts: Vec<f64> = if halve_dt {
        vec![cfg.discretization.dt, cfg.discretization.dt / 2.0]
    } else {
        vec![cfg.discretization.dt]
    };
    let mut rows = Vec::new();
    for &dt in &dts {
        let mut prev: Option<(usize, thermopiezo_core::GalerkinState)> = None;
        for &m in modes {
            let mut scenario: Scenario = cfg.scenario();
            scenario.discretization.m = m;
            scenario.discretization.n_nodes = None;
            scenario.discretization.dt = dt;
            let problems = scenario.violations();
            if !problems.is_empty() {
                return Err(Failure::Config(ConfigError { problems }));
            }
            let rod = scenario.rod().map_err(classify)?;
            if !cfg.skip_hypotheses && rows.is_empty() {
                check_hypotheses(&rod)?;
            }
            let init = scenario.initial.data(rod.material().ell, rod.material().theta_c);
            let state = rod.project_initial(&init).map_err(classify)?;
            let outcome = rod.run(state, scenario.discretization.steps(), dt, &mut NoOutput);
            if let Some(e) = outcome.error {
                return Err(classify(e));
            }
            if let Some((i, p)) = prev.take() {
                let (du, dth) = l2_distance(&p, &outcome.state);
                let row: &mut ConvergeRow = &mut rows[i];
                row.l2_u = Some(du);
                row.l2_theta = Some(dth);
            }
            prev = Some((rows.len(), outcome.state));
            let s = outcome.summary;
            rows.push(ConvergeRow {
                m,
                n_nodes: rod.basis().len(),
                dt,
                steps: s.steps,
                energy_drift: s.max_relative_drift,
                max_energy_increase: s.max_energy_increase,
                l2_u: None,
                l2_theta: None,
            });
            log::info!("m = {m}, dt = {dt}: done");
        }
    }
    let dir = run_dir(out, &cfg.hash())?;
    fs::write(dir.join("config.toml"), cfg.to_toml()).context("writing config.toml")?;
    let path = dir.join("converge.csv");
    write_csv(&path, &rows)?;
    println!("{}", path.display());
    print!("{}", fs::read_to_string(&path).context("reading back converge.csv")?);
    Ok(())
}

pub fn check_density(cfg: &ScenarioConfig) -> Result<(), Failure> {
    let density = cfg.density.build().map_err(classify)?;
    let report = hypothesis_report(&density, &cfg.material, &SamplingSpec::default());
    println!("{}", serde_json::to_string_pretty(&report).context("serializing report")?);
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Hypotheses(report.failed_items().into_iter().map(String::from).collect()))
    }
}

#[derive(Debug, Serialize)]
struct BalanceRow {
    theta: f64,
    cycle: usize,
    area: f64,
    dissipation: f64,
    relative_gap: f64,
}

pub fn loops(cfg: &ScenarioConfig, spec: &DriveSpec, thetas: &[f64], out: &Path) -> Result<(), Failure> {
    spec.validate().map_err(|e| Failure::Config(ConfigError { problems: vec![("drive".into(), e.to_string())] }))?;
    let density = cfg.density.build().map_err(classify)?;
    let (mut q_rows, mut s_rows, mut balances) = (Vec::new(), Vec::new(), Vec::new());
    for &theta in thetas {
        let pts = q_loop(&density, theta, spec).map_err(classify)?;
        for (cycle, b) in cycle_balances(&pts, spec).into_iter().enumerate() {
            balances.push(BalanceRow { theta, cycle, area: b.area, dissipation: b.dissipation, relative_gap: b.relative_gap() });
        }
        q_rows.extend(pts);
        s_rows.extend(strain_loop(&cfg.material, &density, theta, spec, cfg.discretization.tol_q.min(DEFAULT_TOL)).map_err(classify)?);
    }
    let dir = run_dir(out, &cfg.hash())?;
    write_csv(&dir.join("loop_q.csv"), &q_rows)?;
    write_csv(&dir.join("loop_strain.csv"), &s_rows)?;
    write_csv(&dir.join("loop_balance.csv"), &balances)?;
    println!("{}", dir.display());
    for b in &balances {
        println!(
            "θ = {}  cycle {}  area = {:.9e}  dissipation = {:.9e}  gap = {:.2e}",
            b.theta, b.cycle, b.area, b.dissipation, b.relative_gap
        );
    }
    Ok(())
}
