//! TOML scenario files.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thermopiezo_core::material::MaterialParams;
use thermopiezo_core::rod::{Discretization, InitialCondition};
use thermopiezo_core::{DensitySpec, Scenario};

/// Everything a run depends on. Missing keys take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    /// Run even when the density or material fails a structural assumption.
    pub skip_hypotheses: bool,
    pub material: MaterialParams,
    pub density: DensitySpec,
    pub discretization: Discretization,
    pub initial: InitialCondition,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let s = Scenario::default();
        Self {
            seed: 0,
            skip_hypotheses: false,
            material: s.material,
            density: s.density,
            discretization: s.discretization,
            initial: s.initial,
        }
    }
}

/// A rejected configuration: every problem found, each with its field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub problems: Vec<(String, String)>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration:")?;
        for (path, msg) in &self.problems {
            write!(f, "\n  {path}: {msg}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    fn single(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Self { problems: vec![(path.into(), msg.into())] }
    }
}

impl ScenarioConfig {
    pub fn scenario(&self) -> Scenario {
        Scenario {
            material: self.material,
            density: self.density.clone(),
            discretization: self.discretization.clone(),
            initial: self.initial.clone(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the fully resolved configuration.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    /// Parses TOML text; relative table paths are resolved against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::single("(file)", e.to_string()))?;
        let mut cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::single(if path == "." { "(root)".into() } else { path }, e.into_inner().message().to_string())
        })?;
        if let (DensitySpec::Tabulated { path }, Some(base)) = (&mut cfg.density, base) {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        let problems = cfg.scenario().violations();
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError { problems })
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::single("(file)", format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }
}
