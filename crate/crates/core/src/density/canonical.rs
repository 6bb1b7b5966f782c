//! Parametric density `ψ(θ,r,v) = a(r)·φ(|v| − h(log(1+θ⁺)))` with an exponential
//! threshold weight `a(r) = a0·exp(−r/r_decay)`, the polynomial bump
//! `φ(s) = phi0·(s(1−s))³` on (0, 1) and the shift `h(s) = h0·s³/(1+s²)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `h0` with `0 ≤ h' ≤ 1` and `|h''| ≤ 1`. The binding constraint is
/// `sup |h''|/h0 = 1/(4(3 − 2√2))`, attained at `s = √2 − 1`; `sup h'/h0 = 9/8` is looser.
pub const H0_MAX: f64 = 4.0 * (3.0 - 2.0 * std::f64::consts::SQRT_2);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalDensity {
    pub a0: f64,
    pub r_decay: f64,
    pub phi0: f64,
    pub h0: f64,
}

impl CanonicalDensity {
    pub fn new(a0: f64, r_decay: f64, phi0: f64, h0: f64) -> Result<Self> {
        let finite = [a0, r_decay, phi0, h0].iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidDensity("parameters must be finite".into()));
        }
        if a0 < 0.0 {
            return Err(Error::InvalidDensity(format!("a0 = {a0} must be nonnegative")));
        }
        if r_decay <= 0.0 {
            return Err(Error::InvalidDensity(format!("r_decay = {r_decay} must be positive")));
        }
        if phi0 < 0.0 {
            return Err(Error::InvalidDensity(format!("phi0 = {phi0} must be nonnegative")));
        }
        if h0 < 0.0 {
            return Err(Error::InvalidDensity(format!("h0 = {h0} must be nonnegative")));
        }
        let density = Self { a0, r_decay, phi0, h0 };
        let (dh_max, d2h_max) = density.shift_derivative_bounds();
        if dh_max > 1.0 || d2h_max > 1.0 {
            return Err(Error::InvalidDensity(format!(
                "h0 = {h0} violates 0 ≤ h' ≤ 1, |h''| ≤ 1 (sup h' = {dh_max:.4}, sup |h''| = {d2h_max:.4})"
            )));
        }
        Ok(density)
    }

    /// Sampled `(sup h', sup |h''|)` over `s ∈ [0, 200]`.
    pub fn shift_derivative_bounds(&self) -> (f64, f64) {
        let mut dh: f64 = 0.0;
        let mut d2h: f64 = 0.0;
        for i in 0..=20_000 {
            let s = 0.01 * i as f64;
            dh = dh.max(self.dshift(s));
            d2h = d2h.max(self.d2shift(s).abs());
        }
        (dh, d2h)
    }

    #[inline]
    pub fn a(&self, r: f64) -> f64 {
        self.a0 * (-r / self.r_decay).exp()
    }

    #[inline]
    pub fn phi(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            0.0
        } else {
            let b = x * (1.0 - x);
            self.phi0 * b * b * b
        }
    }

    #[inline]
    pub fn dphi(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            0.0
        } else {
            let b = x * (1.0 - x);
            3.0 * self.phi0 * b * b * (1.0 - 2.0 * x)
        }
    }

    #[inline]
    pub fn d2phi(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            0.0
        } else {
            let b = x * (1.0 - x);
            let c = 1.0 - 2.0 * x;
            self.phi0 * (6.0 * b * c * c - 6.0 * b * b)
        }
    }

    /// `∫_0^x φ`, clamped to the support.
    #[inline]
    pub fn phi_primitive(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let x4 = x * x * x * x;
        self.phi0 * x4 * (0.25 + x * (-0.6 + x * (0.5 - x / 7.0)))
    }

    /// `∫_0^x s·φ(s) ds`, clamped to the support.
    #[inline]
    pub fn phi_moment_primitive(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let x5 = x * x * x * x * x;
        self.phi0 * x5 * (0.2 + x * (-0.5 + x * (3.0 / 7.0 - x / 8.0)))
    }

    /// `h(s)`.
    #[inline]
    pub fn shift(&self, s: f64) -> f64 {
        let s2 = s * s;
        self.h0 * s2 * s / (1.0 + s2)
    }

    #[inline]
    pub fn dshift(&self, s: f64) -> f64 {
        let s2 = s * s;
        let d = 1.0 + s2;
        self.h0 * (3.0 * s2 + s2 * s2) / (d * d)
    }

    #[inline]
    pub fn d2shift(&self, s: f64) -> f64 {
        let s2 = s * s;
        let d = 1.0 + s2;
        self.h0 * (6.0 * s - 2.0 * s2 * s) / (d * d * d)
    }

    /// `(H, H_θ, H_θθ)` for `H(θ) = h(log(1+θ⁺))`.
    #[inline]
    pub fn theta_shift(&self, theta: f64) -> (f64, f64, f64) {
        if theta <= 0.0 || self.h0 == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let s = theta.ln_1p();
        let inv = 1.0 / (1.0 + theta);
        let d1 = self.dshift(s);
        (self.shift(s), d1 * inv, (self.d2shift(s) - d1) * inv * inv)
    }

    /// `∫_0^∞ φ = phi0/140`.
    pub fn bump_mass(&self) -> f64 {
        self.phi0 / 140.0
    }

    /// `∫_0^∞ a(r) dr`.
    pub fn a_mass(&self) -> f64 {
        self.a0 * self.r_decay
    }

    /// Threshold beyond which `∫_R^∞ (1+r)a(r) dr ≤ tol·max(1, ∫_0^∞ (1+r)a(r) dr)`.
    pub fn r_cutoff(&self, tol: f64) -> f64 {
        let rd = self.r_decay;
        let total = self.a0 * rd * (1.0 + rd);
        let target = tol * total.max(1.0);
        // log of the tail is concave and decreasing, so Newton iterates
        // approach the root from above after the first step
        let log_tail = |r: f64| (self.a0 * rd).ln() - r / rd + (1.0 + r + rd).ln() - target.ln();
        if !(log_tail(0.0) > 0.0) {
            return rd;
        }
        let mut r: f64 = 0.0;
        for _ in 0..60 {
            let step = log_tail(r) / (1.0 / (1.0 + r + rd) - 1.0 / rd);
            r -= step;
            if step.abs() <= 1e-13 * r.max(1.0) {
                break;
            }
        }
        r.max(rd)
    }
}
