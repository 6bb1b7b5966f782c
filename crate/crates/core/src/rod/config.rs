//! Discretization parameters and initial data.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inversion::DEFAULT_TOL;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Discretization {
    /// Number of modes `m`.
    pub m: usize,
    /// Quadrature nodes; `8m + 1` when unset.
    pub n_nodes: Option<usize>,
    pub dt: f64,
    pub t_final: f64,
    /// Steps between trace records.
    pub output_stride: usize,
    /// Steps between field snapshots; zero writes only the first and last.
    pub snapshot_stride: usize,
    /// Keeps the `(1/m)θ_tt` term of the approximating system.
    pub regularized_theta: bool,
    pub tol_q: f64,
    /// Thresholds per play bank.
    pub r_nodes: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            m: 8,
            n_nodes: None,
            dt: 1e-3,
            t_final: 1.0,
            output_stride: 10,
            snapshot_stride: 0,
            regularized_theta: false,
            tol_q: DEFAULT_TOL,
            r_nodes: 64,
        }
    }
}

impl Discretization {
    pub fn with_modes(m: usize) -> Self {
        Self { m, ..Self::default() }
    }

    pub fn nodes(&self) -> usize {
        self.n_nodes.unwrap_or(8 * self.m + 1)
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round().max(0.0) as usize
    }

    pub fn violations(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut check = |name: &str, ok: bool, msg: String| {
            if !ok {
                out.push((format!("discretization.{name}"), msg));
            }
        };
        check("m", self.m >= 1, "at least one mode is required".into());
        if let Some(n) = self.n_nodes {
            check("n_nodes", n >= 4 * self.m + 1, format!("{n} < 4m + 1 = {}", 4 * self.m + 1));
        }
        check("dt", self.dt.is_finite() && self.dt > 0.0, format!("must be positive (got {})", self.dt));
        check(
            "t_final",
            self.t_final.is_finite() && self.t_final > 0.0,
            format!("must be positive (got {})", self.t_final),
        );
        check("output_stride", self.output_stride >= 1, "must be at least 1".into());
        check("tol_q", self.tol_q.is_finite() && self.tol_q > 0.0, format!("must be positive (got {})", self.tol_q));
        check("r_nodes", self.r_nodes >= 1, "must be at least 1".into());
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidDiscretization(
                v.iter().map(|(k, m)| format!("{k}: {m}")).collect::<Vec<_>>().join("; "),
            ))
        }
    }
}

/// One initial field, either as modal coefficients or as a function of `x`.
#[derive(Clone)]
pub enum Field {
    Coefficients(Vec<f64>),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Field {
    pub fn zero() -> Self {
        Field::Coefficients(Vec::new())
    }

    pub fn function(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Field::Function(Arc::new(f))
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Coefficients(c) => f.debug_tuple("Coefficients").field(c).finish(),
            Field::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// `u(·,0)`, `u_t(·,0)` and `θ(·,0)`. Coefficient lists for `u` refer to
/// `s_1, s_2, …`; those for `θ` to `c_0, c_1, …`.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub u0: Field,
    pub u1: Field,
    pub theta0: Field,
}

/// Named initial states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCondition {
    /// Undeformed rod at rest at `θ_c`.
    Rest,
    /// `u0 = amplitude · s_k`, at rest, at `θ_c`.
    Mode { k: usize, amplitude: f64 },
    /// Smooth displacement bump, optional velocity and a smooth temperature ramp.
    Smooth {
        amplitude: f64,
        #[serde(default)]
        velocity: f64,
        #[serde(default)]
        theta_ramp: f64,
    },
    Coefficients {
        #[serde(default)]
        u0: Vec<f64>,
        #[serde(default)]
        u1: Vec<f64>,
        theta0: Vec<f64>,
    },
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::Smooth { amplitude: 0.2, velocity: 0.0, theta_ramp: 0.0 }
    }
}

/// `64 (x(ℓ−x)/ℓ²)³`: unit height, vanishing with two derivatives at both ends.
pub fn bump(x: f64, ell: f64) -> f64 {
    let s = x * (ell - x) / (ell * ell);
    64.0 * s * s * s
}

/// `3y² − 2y³` with `y = x/ℓ`.
pub fn ramp(x: f64, ell: f64) -> f64 {
    let y = x / ell;
    y * y * (3.0 - 2.0 * y)
}

impl InitialCondition {
    pub fn violations(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let path = |f: &str| format!("initial.{f}");
        match self {
            InitialCondition::Rest => {}
            InitialCondition::Mode { k, amplitude } => {
                if *k == 0 {
                    out.push((path("k"), "mode index starts at 1".into()));
                }
                if !amplitude.is_finite() {
                    out.push((path("amplitude"), "must be finite".into()));
                }
            }
            InitialCondition::Smooth { amplitude, velocity, theta_ramp } => {
                for (name, v) in [("amplitude", amplitude), ("velocity", velocity)] {
                    if !v.is_finite() {
                        out.push((path(name), "must be finite".into()));
                    }
                }
                if !(theta_ramp.is_finite() && *theta_ramp > -1.0) {
                    out.push((path("theta_ramp"), format!("must exceed -1 to keep θ0 positive (got {theta_ramp})")));
                }
            }
            InitialCondition::Coefficients { u0, u1, theta0 } => {
                for (name, v) in [("u0", u0), ("u1", u1), ("theta0", theta0)] {
                    if v.iter().any(|x| !x.is_finite()) {
                        out.push((path(name), "coefficients must be finite".into()));
                    }
                }
                if theta0.is_empty() {
                    out.push((path("theta0"), "needs at least the mean coefficient".into()));
                }
            }
        }
        out
    }

    /// Resolves the preset for a rod of length `ell` and reference temperature `theta_c`.
    pub fn data(&self, ell: f64, theta_c: f64) -> InitialData {
        let uniform = Field::Coefficients(vec![theta_c * ell.sqrt()]);
        match self.clone() {
            InitialCondition::Rest => InitialData { u0: Field::zero(), u1: Field::zero(), theta0: uniform },
            InitialCondition::Mode { k, amplitude } => {
                let mut c = vec![0.0; k];
                c[k - 1] = amplitude;
                InitialData { u0: Field::Coefficients(c), u1: Field::zero(), theta0: uniform }
            }
            InitialCondition::Smooth { amplitude, velocity, theta_ramp } => InitialData {
                u0: Field::function(move |x| amplitude * bump(x, ell)),
                u1: Field::function(move |x| velocity * bump(x, ell)),
                theta0: Field::function(move |x| theta_c * (1.0 + theta_ramp * ramp(x, ell))),
            },
            InitialCondition::Coefficients { u0, u1, theta0 } => InitialData {
                u0: Field::Coefficients(u0),
                u1: Field::Coefficients(u1),
                theta0: Field::Coefficients(theta0),
            },
        }
    }
}
