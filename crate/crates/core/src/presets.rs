//! Shipped parameter sets.

use crate::density::DensityModel;
use crate::material::{CaloricModel, Feedback, MaterialParams, SelfSimilarity};

/// Nondimensional default material with the cube-root heat capacity.
pub fn default_material() -> MaterialParams {
    MaterialParams {
        rho: 1.0,
        nu: 0.01,
        c: 1.0,
        e: 0.5,
        kappa: 1.0,
        gamma: 0.01,
        beta: 0.05,
        theta_c: 1.0,
        mu_heat: 0.1,
        c0: 1.0,
        cutoff: 100.0,
        ell: 1.0,
        f: SelfSimilarity { f0: 0.5, f1: 1.0 },
        alpha: Feedback { alpha0: 0.2 },
        caloric: CaloricModel::CubeRootCv,
    }
}

/// Small-amplitude canonical density satisfying every structural assumption
/// together with [`default_material`].
pub fn default_density() -> DensityModel {
    DensityModel::canonical(0.4, 0.5, 64.0, 0.1).expect("preset parameters are valid")
}

/// Purely elastic material: no viscosity, no thermal expansion.
pub fn elastic_material() -> MaterialParams {
    MaterialParams { nu: 0.0, beta: 0.0, ..default_material() }
}

/// Material violating the heat-capacity growth assumption.
pub fn constant_cv_material() -> MaterialParams {
    MaterialParams { caloric: CaloricModel::ConstantCv, ..default_material() }
}
