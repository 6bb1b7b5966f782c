//! Complete simulation setups: material, density, discretization and initial state.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::density::{hypothesis_report, DensityModel, SamplingSpec, TabulatedDensity, H0_MAX};
use crate::error::{Error, Result};
use crate::material::MaterialParams;
use crate::presets;
use crate::rod::{Discretization, InitialCondition, Observer, Rod, RunOutcome};

/// Density selection as it appears in a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DensitySpec {
    Canonical { a0: f64, r_decay: f64, phi0: f64, h0: f64 },
    UniformTest,
    Zero,
    /// CSV file with header `theta,r,v,psi`.
    Tabulated { path: PathBuf },
}

impl Default for DensitySpec {
    fn default() -> Self {
        match presets::default_density() {
            DensityModel::Canonical(c) => {
                DensitySpec::Canonical { a0: c.a0, r_decay: c.r_decay, phi0: c.phi0, h0: c.h0 }
            }
            _ => unreachable!("the default density is canonical"),
        }
    }
}

impl DensitySpec {
    pub fn violations(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        if let DensitySpec::Canonical { a0, r_decay, phi0, h0 } = *self {
            let mut check = |name: &str, ok: bool, msg: String| {
                if !ok {
                    out.push((format!("density.{name}"), msg));
                }
            };
            check("a0", a0.is_finite() && a0 >= 0.0, format!("must be nonnegative (got {a0})"));
            check("r_decay", r_decay.is_finite() && r_decay > 0.0, format!("must be positive (got {r_decay})"));
            check("phi0", phi0.is_finite() && phi0 >= 0.0, format!("must be nonnegative (got {phi0})"));
            check(
                "h0",
                h0.is_finite() && (0.0..=H0_MAX).contains(&h0),
                format!("must lie in [0, {H0_MAX:.6}] so that 0 ≤ h' ≤ 1 and |h''| ≤ 1 (got {h0})"),
            );
        }
        out
    }

    pub fn build(&self) -> Result<DensityModel> {
        match self {
            DensitySpec::Canonical { a0, r_decay, phi0, h0 } => DensityModel::canonical(*a0, *r_decay, *phi0, *h0),
            DensitySpec::UniformTest => Ok(DensityModel::UniformTest),
            DensitySpec::Zero => Ok(DensityModel::zero()),
            DensitySpec::Tabulated { path } => Ok(DensityModel::tabulated(TabulatedDensity::from_csv_path(path)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub material: MaterialParams,
    pub density: DensitySpec,
    pub discretization: Discretization,
    pub initial: InitialCondition,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            material: presets::default_material(),
            density: DensitySpec::default(),
            discretization: Discretization::default(),
            initial: InitialCondition::default(),
        }
    }
}

impl Scenario {
    /// No hysteresis, no viscosity, no thermal expansion; the first mode excited.
    pub fn elastic() -> Self {
        Self {
            material: presets::elastic_material(),
            density: DensitySpec::Zero,
            initial: InitialCondition::Mode { k: 1, amplitude: 0.1 },
            ..Self::default()
        }
    }

    /// Every violated constraint of every block, with its field path.
    pub fn violations(&self) -> Vec<(String, String)> {
        let mut out = self.material.violations();
        out.extend(self.density.violations());
        out.extend(self.discretization.violations());
        out.extend(self.initial.violations());
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(
                v.iter().map(|(k, m)| format!("{k}: {m}")).collect::<Vec<_>>().join("; "),
            ))
        }
    }

    pub fn rod(&self) -> Result<Rod> {
        self.validate()?;
        Rod::new(self.material, self.density.build()?, self.discretization.clone())
    }
}

/// Builds the rod, projects the initial data and integrates to `t_final`.
///
/// Unless `skip_hypotheses` is set, the run is refused when the density and
/// material fail any structural assumption.
pub fn run_simulation(scenario: &Scenario, observer: &mut dyn Observer, skip_hypotheses: bool) -> Result<RunOutcome> {
    let rod = scenario.rod()?;
    if !skip_hypotheses {
        let report = hypothesis_report(rod.density(), rod.material(), &SamplingSpec::default());
        if !report.pass {
            return Err(Error::Hypotheses(report.failed_items().into_iter().map(String::from).collect()));
        }
    }
    let init = scenario.initial.data(rod.material().ell, rod.material().theta_c);
    let state = rod.project_initial(&init)?;
    let disc = rod.discretization();
    Ok(rod.run(state, disc.steps(), disc.dt, observer))
}
