use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[inline]
fn check_threshold(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidThreshold(r))
    }
}

/// Initial memory `max{q0 − r, min{0, q0 + r}}`.
pub fn play_init(q0: f64, r: f64) -> Result<f64> {
    check_threshold(r)?;
    Ok(init_unchecked(q0, r))
}

/// Projection `min{q + r, max{q − r, ξ}}`.
pub fn play_update(xi_prev: f64, q_new: f64, r: f64) -> Result<f64> {
    check_threshold(r)?;
    Ok(update_unchecked(xi_prev, q_new, r))
}

#[inline]
pub(crate) fn init_unchecked(q0: f64, r: f64) -> f64 {
    (q0 - r).max((q0 + r).min(0.0))
}

#[inline]
pub(crate) fn update_unchecked(xi_prev: f64, q_new: f64, r: f64) -> f64 {
    (q_new + r).min((q_new - r).max(xi_prev))
}

/// A single play with threshold `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlayState {
    pub r: f64,
    pub xi: f64,
}

impl PlayState {
    pub fn new(q0: f64, r: f64) -> Result<Self> {
        Ok(Self { r, xi: play_init(q0, r)? })
    }

    pub fn update(&mut self, q: f64) {
        self.xi = update_unchecked(self.xi, q, self.r);
    }
}
