//! Quasi-static hysteresis loops at fixed temperature, without the rod.

use serde::{Deserialize, Serialize};

use crate::density::DensityModel;
use crate::error::{Error, Result};
use crate::hysteresis::{curve_dissipation, curve_outputs, MemoryCurve};
use crate::inversion::{feedback_coeffs, solve_on_curve};
use crate::material::MaterialParams;
use crate::rod::{observables, NodeFields};

/// Triangle drive: a virgin branch `0 → A`, then `cycles` round trips `A → −A → A`
/// with `samples` steps each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub amplitude: f64,
    pub cycles: usize,
    pub samples: usize,
}

impl Default for DriveSpec {
    fn default() -> Self {
        Self { amplitude: 2.0, cycles: 2, samples: 400 }
    }
}

impl DriveSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(Error::InvalidConfig(format!("amplitude must be positive (got {})", self.amplitude)));
        }
        if self.cycles == 0 {
            return Err(Error::InvalidConfig("at least one cycle is needed".into()));
        }
        if self.samples < 4 || self.samples % 4 != 0 {
            return Err(Error::InvalidConfig(format!("samples must be a positive multiple of 4 (got {})", self.samples)));
        }
        Ok(())
    }

    /// Steps on the virgin branch.
    pub fn lead(&self) -> usize {
        self.samples / 4
    }

    /// Input values, starting at zero.
    pub fn values(&self) -> Vec<f64> {
        let a = self.amplitude;
        let lead = self.lead();
        let half = self.samples / 2;
        let mut out = Vec::with_capacity(1 + lead + self.cycles * self.samples);
        out.extend((0..=lead).map(|i| a * i as f64 / lead as f64));
        for _ in 0..self.cycles {
            out.extend((1..=half).map(|i| a - 2.0 * a * i as f64 / half as f64));
            out.extend((1..=half).map(|i| -a + 2.0 * a * i as f64 / half as f64));
        }
        out
    }
}

/// One sample of a `q`-driven loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopPoint {
    pub theta: f64,
    pub q: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "U")]
    pub u: f64,
    /// Dissipation of the step ending here.
    pub dissipation: f64,
}

/// One sample of a strain-driven loop, with `q` from the feedback relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrainPoint {
    pub theta: f64,
    pub eps: f64,
    pub sigma: f64,
    pub q: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "U")]
    pub u: f64,
}

/// Drives the Preisach operator directly with `q`.
pub fn q_loop(density: &DensityModel, theta: f64, spec: &DriveSpec) -> Result<Vec<LoopPoint>> {
    spec.validate()?;
    let at = density.at(theta);
    let mut curve = MemoryCurve::virgin();
    let mut next = MemoryCurve::virgin();
    spec.values()
        .into_iter()
        .map(|q| {
            curve.advance_into(q, &mut next);
            let dissipation = curve_dissipation(&curve, &next, &at);
            std::mem::swap(&mut curve, &mut next);
            let h = curve_outputs(&curve, &at);
            Ok(LoopPoint { theta, q, p: h.p, u: h.u, dissipation })
        })
        .collect()
}

/// Drives the strain; `q` solves the feedback relation at every sample.
pub fn strain_loop(
    material: &MaterialParams,
    density: &DensityModel,
    theta: f64,
    spec: &DriveSpec,
    tol: f64,
) -> Result<Vec<StrainPoint>> {
    spec.validate()?;
    let at = density.at(theta);
    let mut curve = MemoryCurve::virgin();
    let theta_hat = crate::material::cutoff(theta, material.cutoff);
    spec.values()
        .into_iter()
        .map(|eps| {
            let sol = solve_on_curve(&curve, &at, feedback_coeffs(eps, material), tol, Some(curve.input()))?;
            curve = sol.curve;
            let h = curve_outputs(&curve, &at);
            let f = NodeFields { u_x: eps, theta, theta_hat, ..NodeFields::default() };
            let obs = observables(&f, sol.q, &h, material);
            Ok(StrainPoint { theta, eps, sigma: obs.sigma, q: sol.q, p: h.p, u: h.u })
        })
        .collect()
}

/// Enclosed area and summed dissipation of one closed cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleBalance {
    /// `∮ q dP` by the trapezoid rule.
    pub area: f64,
    pub dissipation: f64,
}

impl CycleBalance {
    pub fn relative_gap(&self) -> f64 {
        (self.area - self.dissipation).abs() / self.dissipation.abs().max(f64::MIN_POSITIVE)
    }
}

/// Area and dissipation of every full cycle of a [`q_loop`] trace.
pub fn cycle_balances(points: &[LoopPoint], spec: &DriveSpec) -> Vec<CycleBalance> {
    let lead = spec.lead();
    (0..spec.cycles)
        .map(|c| {
            let lo = lead + c * spec.samples;
            let seg = &points[lo..=lo + spec.samples];
            let area = seg.windows(2).map(|w| 0.5 * (w[0].q + w[1].q) * (w[1].p - w[0].p)).sum();
            let dissipation = seg[1..].iter().map(|p| p.dissipation).sum();
            CycleBalance { area, dissipation }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drive_shape() {
        let spec = DriveSpec { amplitude: 1.0, cycles: 1, samples: 8 };
        assert_eq!(spec.values(), vec![0.0, 0.5, 1.0, 0.5, 0.0, -0.5, -1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn bad_drives_are_rejected() {
        assert!(DriveSpec { samples: 6, ..DriveSpec::default() }.validate().is_err());
        assert!(DriveSpec { cycles: 0, ..DriveSpec::default() }.validate().is_err());
        assert!(DriveSpec { amplitude: 0.0, ..DriveSpec::default() }.validate().is_err());
    }

    #[test]
    fn zero_density_gives_flat_polarization() {
        let pts = q_loop(&DensityModel::zero(), 1.0, &DriveSpec::default()).unwrap();
        assert!(pts.iter().all(|p| p.p == 0.0 && p.u == 0.0 && p.dissipation == 0.0));
    }
}
