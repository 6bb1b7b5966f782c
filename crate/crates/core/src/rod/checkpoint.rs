//! JSON checkpoints of a Galerkin state.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::physics::entropy_coupling;
use super::solver::Rod;
use super::state::{GalerkinState, NodeState};
use crate::error::{Error, Result};
use crate::hysteresis::{curve_outputs, PlayBank};
use crate::inversion::feedback_coeffs;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config_hash: String,
    pub t: f64,
    pub steps: u64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub theta: Vec<f64>,
    pub theta_dot: Option<Vec<f64>>,
    pub last_dt: f64,
    pub prev_g: Vec<f64>,
    pub last_dissipation: Vec<f64>,
    pub banks: Vec<PlayBank>,
}

impl Checkpoint {
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e: std::io::Error| Error::Output(format!("{}: {e}", path.display()));
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        serde_json::to_writer(&mut w, self).map_err(|e| Error::Output(e.to_string()))?;
        w.flush().map_err(io)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
        serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Checkpoint(e.to_string()))
    }
}

impl Rod {
    pub fn checkpoint(&self, state: &GalerkinState, config_hash: &str) -> Checkpoint {
        Checkpoint {
            config_hash: config_hash.to_string(),
            t: state.t,
            steps: state.steps,
            u: state.u.clone(),
            v: state.v.clone(),
            theta: state.theta.clone(),
            theta_dot: state.theta_dot.clone(),
            last_dt: state.last_dt,
            prev_g: state.nodes.iter().map(|n| n.prev_g).collect(),
            last_dissipation: state.nodes.iter().map(|n| n.hyst.dissipation_increment).collect(),
            banks: state.banks.clone(),
        }
    }

    /// Rebuilds a state from a checkpoint, recomputing the cached hysteresis outputs.
    pub fn restore(&self, ck: &Checkpoint) -> Result<GalerkinState> {
        let m = self.discretization().m;
        let n = self.basis().len();
        let bad = |msg: String| Err(Error::Checkpoint(msg));
        if ck.u.len() != m || ck.v.len() != m || ck.theta.len() != m + 1 {
            return bad(format!("coefficient lengths do not match {m} modes"));
        }
        if ck.theta_dot.is_some() != self.discretization().regularized_theta {
            return bad("regularized-theta setting differs from the checkpoint".into());
        }
        if ck.theta_dot.as_ref().is_some_and(|w| w.len() != m + 1) {
            return bad("temperature rate has the wrong length".into());
        }
        if ck.banks.len() != n || ck.prev_g.len() != n || ck.last_dissipation.len() != n {
            return bad(format!("node data does not match {n} nodes"));
        }
        if ck.banks.iter().any(|b| **b.grid() != **self.grid()) {
            return bad("threshold grid differs from the configured one".into());
        }
        let mut state = GalerkinState {
            t: ck.t,
            steps: ck.steps,
            u: ck.u.clone(),
            v: ck.v.clone(),
            theta: ck.theta.clone(),
            theta_dot: ck.theta_dot.clone(),
            last_dt: ck.last_dt,
            banks: ck.banks.iter().map(|b| PlayBank::from_parts(self.grid().clone(), b.xi().to_vec(), b.curve().clone(), b.last_q())).collect::<Result<_>>()?,
            nodes: Vec::with_capacity(n),
        };
        let f = self.reconstruct_fields(&state);
        for i in 0..n {
            let bank = &state.banks[i];
            let at = self.density().at(f.theta_hat[i]);
            let coeffs = feedback_coeffs(f.u_x[i], self.material());
            let mut hyst = curve_outputs(bank.curve(), &at);
            hyst.dissipation_increment = ck.last_dissipation[i];
            let q = bank.last_q();
            state.nodes.push(NodeState {
                q,
                coeffs,
                hyst,
                g: entropy_coupling(f.u_x[i], q, &hyst, self.material()),
                prev_g: ck.prev_g[i],
                q_residual: (q + coeffs.a * hyst.p - coeffs.b).abs(),
            });
        }
        Ok(state)
    }
}
