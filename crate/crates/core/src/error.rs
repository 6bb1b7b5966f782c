use thiserror::Error;

/// Errors raised by the hysteresis, density, inversion and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid threshold r = {0}: must be positive and finite")]
    InvalidThreshold(f64),

    #[error("invalid r-grid: {0}")]
    InvalidGrid(String),

    #[error("banks are defined on different r-grids")]
    GridMismatch,

    #[error("density does not provide {0}")]
    Capability(&'static str),

    #[error("invalid density parameters: {0}")]
    InvalidDensity(String),

    #[error("density table: {0}")]
    Table(String),

    #[error("root bracket [{lo}, {hi}] does not enclose a sign change (F(lo) = {f_lo:e}, F(hi) = {f_hi:e})")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("inversion did not converge in {iterations} iterations (best residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),

    #[error("invalid discretization: {0}")]
    InvalidDiscretization(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("non-finite state after the step ending at t = {t}")]
    NonFinite { t: f64 },

    #[error("hypotheses not satisfied: {}", .0.join(", "))]
    Hypotheses(Vec<String>),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("output: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;
