//! Spectral Galerkin discretization of the coupled momentum and heat equations.
//!
//! Displacement is expanded in `s_k`, temperature in `c_k`; the hysteresis
//! state lives in one play bank per quadrature node.

mod basis;
mod checkpoint;
mod config;
mod energy;
mod physics;
mod simulation;
mod solver;
mod state;

pub use basis::Basis;
pub use checkpoint::Checkpoint;
pub use config::{bump, ramp, Discretization, Field, InitialCondition, InitialData};
pub use energy::{EnergyBreakdown, SnapshotRow, TraceRecord};
pub use physics::{
    entropy_coupling, entropy_production_density, nonlinear_stress, observables, stress_bracket, thermal_source,
    NodeFields, Observables,
};
pub use simulation::{CutoffActivity, NoOutput, Observer, Recorder, RunOutcome, RunSummary};
pub use solver::Rod;
pub use state::{Fields, GalerkinState, NodeState};

/// `(‖u_a − u_b‖, ‖θ_a − θ_b‖)` in `L²(0, ℓ)`, exact for the modal expansions.
pub fn l2_distance(a: &GalerkinState, b: &GalerkinState) -> (f64, f64) {
    fn dist(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len().max(y.len());
        (0..n)
            .map(|k| {
                let d = x.get(k).copied().unwrap_or(0.0) - y.get(k).copied().unwrap_or(0.0);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }
    (dist(&a.u, &b.u), dist(&a.theta, &b.theta))
}
