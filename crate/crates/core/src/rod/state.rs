use serde::{Deserialize, Serialize};

use super::physics::NodeFields;
use crate::hysteresis::{HystOutputs, PlayBank};
use crate::inversion::FeedbackCoeffs;

/// Hysteresis quantities cached at one node, consistent with the current fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeState {
    pub q: f64,
    pub coeffs: FeedbackCoeffs,
    /// Outputs at the current `(u_x, θ̂)`; `dissipation_increment` belongs to the
    /// step that produced this state.
    pub hyst: HystOutputs,
    /// `G = f(u_x)(q P_θ − U_θ)`.
    pub g: f64,
    /// `G` of the previous state.
    pub prev_g: f64,
    /// `|q + A P − B|`.
    pub q_residual: f64,
}

/// Modal coefficients, per-node play banks and cached hysteresis outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinState {
    pub t: f64,
    pub steps: u64,
    /// `u_k`, `k = 1..=m`.
    pub u: Vec<f64>,
    /// `u̇_k`.
    pub v: Vec<f64>,
    /// `θ_k`, `k = 0..=m`.
    pub theta: Vec<f64>,
    /// `θ̇_k`, present in the regularized mode.
    pub theta_dot: Option<Vec<f64>>,
    /// Length of the step that produced this state; zero initially.
    pub last_dt: f64,
    pub(crate) banks: Vec<PlayBank>,
    pub(crate) nodes: Vec<NodeState>,
}

impl GalerkinState {
    pub fn modes(&self) -> usize {
        self.u.len()
    }

    pub fn banks(&self) -> &[PlayBank] {
        &self.banks
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }
}

/// Nodal values of the reconstructed fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Fields {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub u_x: Vec<f64>,
    pub u_xx: Vec<f64>,
    pub u_t: Vec<f64>,
    pub u_xt: Vec<f64>,
    pub theta: Vec<f64>,
    pub theta_x: Vec<f64>,
    pub theta_hat: Vec<f64>,
}

impl Fields {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn node(&self, i: usize) -> NodeFields {
        NodeFields {
            x: self.x[i],
            u: self.u[i],
            u_x: self.u_x[i],
            u_xx: self.u_xx[i],
            u_t: self.u_t[i],
            u_xt: self.u_xt[i],
            theta: self.theta[i],
            theta_x: self.theta_x[i],
            theta_hat: self.theta_hat[i],
        }
    }
}
