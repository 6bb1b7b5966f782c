//! Energy functional, entropy production and per-step diagnostics.

use serde::{Deserialize, Serialize};

use super::physics::{entropy_production_density, observables, Observables};
use super::solver::Rod;
use super::state::{Fields, GalerkinState};
use crate::hysteresis::curve_dissipation;

/// Components of the total energy of the truncated system.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub total: f64,
    /// `∫ ρ/2 u_t²`.
    pub kinetic: f64,
    /// `∫ c/2 u_x²`.
    pub elastic: f64,
    /// `∫ γ/2 u_xx²`.
    pub couple: f64,
    /// `∫ f(u_x) U`.
    pub hysteretic: f64,
    /// `∫ ½ α(u_x) P²`.
    pub feedback: f64,
    /// `∫ (e u_x + P)² / 2κ`.
    pub electrostatic: f64,
    /// `∫ Ĉ_V(θ)`.
    pub caloric: f64,
    /// `∫ θ̂ f(u_x)(q P_θ − U_θ)`.
    pub entropy_coupling: f64,
}

/// One row of the trace file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    #[serde(rename = "E_total")]
    pub total_energy: f64,
    #[serde(rename = "E_kin")]
    pub kinetic: f64,
    #[serde(rename = "E_elastic")]
    pub elastic: f64,
    #[serde(rename = "E_couple")]
    pub couple: f64,
    #[serde(rename = "E_hyst")]
    pub hysteretic: f64,
    #[serde(rename = "E_feedback")]
    pub feedback: f64,
    #[serde(rename = "E_electro")]
    pub electrostatic: f64,
    #[serde(rename = "E_caloric")]
    pub caloric: f64,
    #[serde(rename = "E_entropy_coupling")]
    pub entropy_coupling: f64,
    /// Entropy production `∫ ν u_xt² + f(u_x) D/dt` of the last step.
    #[serde(rename = "diss_rate")]
    pub dissipation_rate: f64,
    pub min_theta: f64,
    #[serde(rename = "D_resid")]
    pub d_residual: f64,
    pub q_resid: f64,
}

/// One row of a field snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRow {
    pub x: f64,
    pub u: f64,
    pub u_x: f64,
    pub theta: f64,
    pub q: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub sigma: f64,
    #[serde(rename = "E_field")]
    pub e_field: f64,
}

impl Rod {
    pub fn total_energy(&self, state: &GalerkinState) -> EnergyBreakdown {
        self.energy_of(state, &self.reconstruct_fields(state))
    }

    pub(crate) fn energy_of(&self, state: &GalerkinState, f: &Fields) -> EnergyBreakdown {
        let mat = self.material();
        let w = self.basis().weights();
        let mut e = EnergyBreakdown::default();
        for i in 0..f.len() {
            let h = &state.nodes[i].hyst;
            let ux = f.u_x[i];
            let fv = mat.f.value(ux);
            let wi = w[i];
            e.kinetic += wi * 0.5 * mat.rho * f.u_t[i] * f.u_t[i];
            e.elastic += wi * 0.5 * mat.c * ux * ux;
            e.couple += wi * 0.5 * mat.gamma * f.u_xx[i] * f.u_xx[i];
            e.hysteretic += wi * fv * h.u;
            e.feedback += wi * 0.5 * mat.alpha.value(ux) * h.p * h.p;
            let d = mat.e * ux + h.p;
            e.electrostatic += wi * d * d / (2.0 * mat.kappa);
            e.caloric += wi * mat.caloric_energy(f.theta[i]);
            e.entropy_coupling += wi * f.theta_hat[i] * state.nodes[i].g;
        }
        e.total = e.kinetic
            + e.elastic
            + e.couple
            + e.hysteretic
            + e.feedback
            + e.electrostatic
            + e.caloric
            + e.entropy_coupling;
        e
    }

    /// `∫ ν u_xt² + f(u_x) D/dt` for the step that produced `state`.
    pub fn entropy_production(&self, state: &GalerkinState) -> f64 {
        self.entropy_production_of(state, &self.reconstruct_fields(state))
    }

    pub(crate) fn entropy_production_of(&self, state: &GalerkinState, f: &Fields) -> f64 {
        let mat = self.material();
        let w = self.basis().weights();
        (0..f.len())
            .map(|i| w[i] * entropy_production_density(&f.node(i), &state.nodes[i].hyst, state.last_dt, mat))
            .sum()
    }

    /// Entropy production between two consecutive states, recomputing the
    /// dissipation from their memory profiles.
    pub fn entropy_production_between(&self, prev: &GalerkinState, next: &GalerkinState, dt: f64) -> f64 {
        let mat = self.material();
        let f = self.reconstruct_fields(next);
        let w = self.basis().weights();
        (0..f.len())
            .map(|i| {
                let at = self.density().at(f.theta_hat[i]);
                let d = curve_dissipation(prev.banks[i].curve(), next.banks[i].curve(), &at);
                w[i] * (mat.nu * f.u_xt[i] * f.u_xt[i] + mat.f.value(f.u_x[i]) * d / dt)
            })
            .sum()
    }

    /// Stress, field, dielectric residual and entropy at every node.
    pub fn observables(&self, state: &GalerkinState) -> Vec<Observables> {
        let f = self.reconstruct_fields(state);
        self.observables_of(state, &f)
    }

    pub(crate) fn observables_of(&self, state: &GalerkinState, f: &Fields) -> Vec<Observables> {
        (0..f.len())
            .map(|i| {
                let n = &state.nodes[i];
                observables(&f.node(i), n.q, &n.hyst, self.material())
            })
            .collect()
    }

    pub fn trace(&self, state: &GalerkinState) -> TraceRecord {
        let f = self.reconstruct_fields(state);
        self.trace_of(state, &f)
    }

    pub(crate) fn trace_of(&self, state: &GalerkinState, f: &Fields) -> TraceRecord {
        let e = self.energy_of(state, f);
        let obs = self.observables_of(state, f);
        TraceRecord {
            t: state.t,
            total_energy: e.total,
            kinetic: e.kinetic,
            elastic: e.elastic,
            couple: e.couple,
            hysteretic: e.hysteretic,
            feedback: e.feedback,
            electrostatic: e.electrostatic,
            caloric: e.caloric,
            entropy_coupling: e.entropy_coupling,
            dissipation_rate: self.entropy_production_of(state, f),
            min_theta: f.theta.iter().copied().fold(f64::INFINITY, f64::min),
            d_residual: obs.iter().map(|o| o.d_residual.abs()).fold(0.0, f64::max),
            q_resid: state.nodes.iter().map(|n| n.q_residual).fold(0.0, f64::max),
        }
    }

    pub fn snapshot(&self, state: &GalerkinState) -> Vec<SnapshotRow> {
        let f = self.reconstruct_fields(state);
        let obs = self.observables_of(state, &f);
        (0..f.len())
            .map(|i| SnapshotRow {
                x: f.x[i],
                u: f.u[i],
                u_x: f.u_x[i],
                theta: f.theta[i],
                q: state.nodes[i].q,
                p: state.nodes[i].hyst.p,
                sigma: obs[i].sigma,
                e_field: obs[i].e_field,
            })
            .collect()
    }
}
