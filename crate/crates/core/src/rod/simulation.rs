//! Fixed-step driver with running diagnostics.

use serde::{Deserialize, Serialize};

use super::energy::{EnergyBreakdown, SnapshotRow, TraceRecord};
use super::solver::Rod;
use super::state::GalerkinState;
use crate::error::Error;

/// Receives trace records and snapshots as they are produced.
pub trait Observer {
    fn on_trace(&mut self, _rec: &TraceRecord) -> crate::Result<()> {
        Ok(())
    }

    fn on_snapshot(&mut self, _index: usize, _t: f64, _rows: &[SnapshotRow]) -> crate::Result<()> {
        Ok(())
    }
}

/// Discards all output.
pub struct NoOutput;

impl Observer for NoOutput {}

/// Collects everything in memory.
#[derive(Debug, Default)]
pub struct Recorder {
    pub traces: Vec<TraceRecord>,
    pub snapshots: Vec<(f64, Vec<SnapshotRow>)>,
}

impl Observer for Recorder {
    fn on_trace(&mut self, rec: &TraceRecord) -> crate::Result<()> {
        self.traces.push(*rec);
        Ok(())
    }

    fn on_snapshot(&mut self, _index: usize, t: f64, rows: &[SnapshotRow]) -> crate::Result<()> {
        self.snapshots.push((t, rows.to_vec()));
        Ok(())
    }
}

/// Which cut-offs clipped their argument at some node and step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CutoffActivity {
    /// `θ > R` somewhere.
    pub theta_above_cutoff: bool,
    /// `θ < 0` somewhere.
    pub theta_negative: bool,
    /// `u_xt² > R` somewhere.
    pub viscous: bool,
}

impl CutoffActivity {
    pub fn any(&self) -> bool {
        self.theta_above_cutoff || self.theta_negative || self.viscous
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub completed: bool,
    pub error: Option<String>,
    pub steps: u64,
    pub t: f64,
    pub energy_initial: EnergyBreakdown,
    pub energy_final: EnergyBreakdown,
    /// Largest single-step increase of the total energy.
    pub max_energy_increase: f64,
    /// `max_n |E_n − E_0| / |E_0|`.
    pub max_relative_drift: f64,
    pub min_theta: f64,
    pub max_q_residual: f64,
    pub max_d_residual: f64,
    pub min_dissipation_rate: f64,
    pub max_dissipation_rate: f64,
    pub min_dissipation_increment: f64,
    /// `Σ_n dt · (entropy production)`.
    pub total_entropy_production: f64,
    pub cutoffs: CutoffActivity,
}

impl RunSummary {
    fn start(rec: &TraceRecord, energy: EnergyBreakdown) -> Self {
        Self {
            completed: false,
            error: None,
            steps: 0,
            t: rec.t,
            energy_initial: energy,
            energy_final: energy,
            max_energy_increase: f64::NEG_INFINITY,
            max_relative_drift: 0.0,
            min_theta: rec.min_theta,
            max_q_residual: rec.q_resid,
            max_d_residual: rec.d_residual,
            min_dissipation_rate: f64::INFINITY,
            max_dissipation_rate: 0.0,
            min_dissipation_increment: f64::INFINITY,
            total_entropy_production: 0.0,
            cutoffs: CutoffActivity::default(),
        }
    }
}

/// Final state, summary and the error that stopped the run, if any.
#[derive(Debug)]
pub struct RunOutcome {
    pub state: GalerkinState,
    pub summary: RunSummary,
    pub error: Option<Error>,
}

impl Rod {
    fn note_cutoffs(&self, state: &GalerkinState, act: &mut CutoffActivity) {
        let f = self.reconstruct_fields(state);
        let r = self.material().cutoff;
        act.theta_above_cutoff |= f.theta.iter().any(|t| *t > r);
        act.theta_negative |= f.theta.iter().any(|t| *t < 0.0);
        act.viscous |= f.u_xt.iter().any(|z| z * z > r);
    }

    /// Advances `state` by `steps` steps of length `dt`, reporting to `observer`.
    ///
    /// A failing step stops the run; the outcome then holds the last good state
    /// and everything produced up to it.
    pub fn run(&self, state: GalerkinState, steps: usize, dt: f64, observer: &mut dyn Observer) -> RunOutcome {
        let disc = self.discretization();
        let stride = disc.output_stride.max(1);
        let snap_stride = disc.snapshot_stride;
        let first = self.trace(&state);
        let mut summary = RunSummary::start(&first, self.total_energy(&state));
        self.note_cutoffs(&state, &mut summary.cutoffs);
        let mut snaps = 0;
        let mut emit = |observer: &mut dyn Observer, st: &GalerkinState, rec: &TraceRecord, trace: bool, snap: bool| {
            if trace {
                observer.on_trace(rec)?;
            }
            if snap {
                observer.on_snapshot(snaps, st.t, &self.snapshot(st))?;
                snaps += 1;
            }
            Ok::<(), Error>(())
        };
        if let Err(e) = emit(observer, &state, &first, true, true) {
            summary.error = Some(e.to_string());
            return RunOutcome { state, summary, error: Some(e) };
        }

        let e0 = summary.energy_initial.total;
        let mut prev_energy = e0;
        let mut state = state;
        for n in 1..=steps {
            let next = match self.step(&state, dt) {
                Ok(s) => s,
                Err(e) => {
                    log::error!("step {n} failed at t = {}: {e}", state.t);
                    summary.error = Some(e.to_string());
                    summary.energy_final = self.total_energy(&state);
                    // flush the last good state so partial output ends where the run stopped
                    let rec = self.trace(&state);
                    let _ = emit(observer, &state, &rec, (n - 1) % stride != 0, true);
                    return RunOutcome { state, summary, error: Some(e) };
                }
            };
            let rec = self.trace(&next);
            summary.steps = next.steps;
            summary.t = next.t;
            summary.max_energy_increase = summary.max_energy_increase.max(rec.total_energy - prev_energy);
            summary.max_relative_drift =
                summary.max_relative_drift.max((rec.total_energy - e0).abs() / e0.abs().max(f64::MIN_POSITIVE));
            prev_energy = rec.total_energy;
            summary.min_theta = summary.min_theta.min(rec.min_theta);
            summary.max_q_residual = summary.max_q_residual.max(rec.q_resid);
            summary.max_d_residual = summary.max_d_residual.max(rec.d_residual);
            summary.min_dissipation_rate = summary.min_dissipation_rate.min(rec.dissipation_rate);
            summary.max_dissipation_rate = summary.max_dissipation_rate.max(rec.dissipation_rate);
            summary.total_entropy_production += dt * rec.dissipation_rate;
            for node in next.nodes() {
                summary.min_dissipation_increment = summary.min_dissipation_increment.min(node.hyst.dissipation_increment);
            }
            self.note_cutoffs(&next, &mut summary.cutoffs);

            let last = n == steps;
            let trace = n % stride == 0 || last;
            let snap = last || (snap_stride > 0 && n % snap_stride == 0);
            state = next;
            if let Err(e) = emit(observer, &state, &rec, trace, snap) {
                summary.error = Some(e.to_string());
                return RunOutcome { state, summary, error: Some(e) };
            }
        }
        summary.energy_final = self.total_energy(&state);
        summary.completed = true;
        if steps == 0 {
            summary.max_energy_increase = 0.0;
            summary.min_dissipation_rate = 0.0;
            summary.min_dissipation_increment = 0.0;
        }
        RunOutcome { state, summary, error: None }
    }
}
