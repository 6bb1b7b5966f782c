use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::curve::MemoryCurve;
use super::play::{init_unchecked, update_unchecked, PlayState};
use crate::error::{Error, Result};
use crate::quadrature::RGrid;

/// Play family at one spatial node: the states `ξ_{r_j}` on a threshold grid
/// together with the exact memory profile they sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BankRecord", into = "BankRecord")]
pub struct PlayBank {
    grid: Arc<RGrid>,
    xi: Vec<f64>,
    curve: MemoryCurve,
    last_q: f64,
}

/// Serialized form of a bank.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BankRecord {
    pub r_grid: RGrid,
    pub xi: Vec<f64>,
    pub curve: Vec<(f64, f64)>,
    pub last_q: f64,
}

impl From<PlayBank> for BankRecord {
    fn from(bank: PlayBank) -> Self {
        BankRecord {
            r_grid: (*bank.grid).clone(),
            xi: bank.xi,
            curve: bank.curve.vertices().to_vec(),
            last_q: bank.last_q,
        }
    }
}

impl TryFrom<BankRecord> for PlayBank {
    type Error = Error;

    fn try_from(rec: BankRecord) -> Result<Self> {
        let curve = MemoryCurve::from_vertices(rec.curve)?;
        PlayBank::from_parts(Arc::new(rec.r_grid), rec.xi, curve, rec.last_q)
    }
}

impl PlayBank {
    /// All memories zero, last input zero.
    pub fn virgin(grid: Arc<RGrid>) -> Self {
        let n = grid.len();
        Self { grid, xi: vec![0.0; n], curve: MemoryCurve::virgin(), last_q: 0.0 }
    }

    /// Every play initialised at `q0`.
    pub fn initialized(grid: Arc<RGrid>, q0: f64) -> Self {
        let xi = grid.nodes().iter().map(|r| init_unchecked(q0, *r)).collect();
        Self { grid, xi, curve: MemoryCurve::from_initial(q0), last_q: q0 }
    }

    pub fn from_parts(grid: Arc<RGrid>, xi: Vec<f64>, curve: MemoryCurve, last_q: f64) -> Result<Self> {
        if xi.len() != grid.len() {
            return Err(Error::Checkpoint(format!("{} memories for {} thresholds", xi.len(), grid.len())));
        }
        if curve.input() != last_q {
            return Err(Error::Checkpoint("memory curve does not start at the last input".into()));
        }
        let bank = Self { grid, xi, curve, last_q };
        let mismatch = bank.curve_mismatch();
        if !(mismatch <= 1e-9) {
            return Err(Error::Checkpoint(format!("memories deviate from the curve by {mismatch:e}")));
        }
        Ok(bank)
    }

    pub fn grid(&self) -> &Arc<RGrid> {
        &self.grid
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn curve(&self) -> &MemoryCurve {
        &self.curve
    }

    pub fn last_q(&self) -> f64 {
        self.last_q
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = PlayState> + '_ {
        self.grid.nodes().iter().zip(&self.xi).map(|(r, xi)| PlayState { r: *r, xi: *xi })
    }

    /// Applies input `q` to every play.
    pub fn advance(&mut self, q: f64) {
        for (x, r) in self.xi.iter_mut().zip(self.grid.nodes()) {
            *x = update_unchecked(*x, q, *r);
        }
        self.curve.advance(q);
        self.last_q = q;
    }

    /// Commits an input whose profile has already been computed.
    pub(crate) fn advance_with_curve(&mut self, q: f64, curve: MemoryCurve) {
        for (x, r) in self.xi.iter_mut().zip(self.grid.nodes()) {
            *x = update_unchecked(*x, q, *r);
        }
        debug_assert_eq!(curve.input(), q);
        self.curve = curve;
        self.last_q = q;
    }

    /// `max_j (|q − ξ_j| − r_j)⁺` for the last input.
    pub fn projection_error(&self) -> f64 {
        self.states().map(|s| ((self.last_q - s.xi).abs() - s.r).max(0.0)).fold(0.0, f64::max)
    }

    /// `max_j |ξ_j − ξ(r_j)|` between the grid memories and the exact profile.
    pub fn curve_mismatch(&self) -> f64 {
        self.states().map(|s| (s.xi - self.curve.eval(s.r)).abs()).fold(0.0, f64::max)
    }
}

/// Pure form of [`PlayBank::advance`].
pub fn bank_advance(bank: &PlayBank, q_new: f64) -> PlayBank {
    let mut next = bank.clone();
    next.advance(q_new);
    next
}
