//! Preisach densities `ψ(θ, r, v)` with their `v`-primitives and `θ`-derivatives.

mod canonical;
pub mod hypothesis;
mod tabulated;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use canonical::{CanonicalDensity, H0_MAX};
pub use hypothesis::{hypothesis_report, HypothesisReport, ItemVerdict, SamplingSpec};
pub use tabulated::TabulatedDensity;

use crate::error::{Error, Result};
use crate::quadrature;

/// Tail tolerance for the threshold cut-off of densities with unbounded `r`-support.
pub const R_TAIL_TOL: f64 = 1e-8;

/// Which function of the density to evaluate.
///
/// `G*` are primitives `∫_0^v ψ dv'` (odd in `v`), `Moment*` the first moments
/// `∫_0^v v'ψ dv'` (even in `v`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Psi,
    PsiTheta,
    PsiTheta2,
    G,
    GTheta,
    GTheta2,
    Moment,
    MomentTheta,
}

impl Quantity {
    fn order(self) -> u8 {
        match self {
            Quantity::Psi | Quantity::G | Quantity::Moment => 0,
            Quantity::PsiTheta | Quantity::GTheta | Quantity::MomentTheta => 1,
            Quantity::PsiTheta2 | Quantity::GTheta2 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    Canonical,
    UniformTest,
    Tabulated,
}

/// Preisach density model. Immutable once built; clones are cheap.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityModel {
    Canonical(CanonicalDensity),
    /// `ψ ≡ 1` on `0 < r < 1`, `|v| < 1`, independent of `θ`.
    UniformTest,
    Tabulated(Arc<TabulatedDensity>),
}

impl DensityModel {
    pub fn canonical(a0: f64, r_decay: f64, phi0: f64, h0: f64) -> Result<Self> {
        CanonicalDensity::new(a0, r_decay, phi0, h0).map(DensityModel::Canonical)
    }

    /// The identically vanishing density.
    pub fn zero() -> Self {
        DensityModel::Canonical(CanonicalDensity { a0: 0.0, r_decay: 1.0, phi0: 0.0, h0: 0.0 })
    }

    pub fn tabulated(table: TabulatedDensity) -> Self {
        DensityModel::Tabulated(Arc::new(table))
    }

    pub fn kind(&self) -> DensityKind {
        match self {
            DensityModel::Canonical(_) => DensityKind::Canonical,
            DensityModel::UniformTest => DensityKind::UniformTest,
            DensityModel::Tabulated(_) => DensityKind::Tabulated,
        }
    }

    pub fn has_theta_derivs(&self) -> bool {
        true
    }

    pub fn has_second_derivs(&self) -> bool {
        !matches!(self, DensityModel::Tabulated(_))
    }

    pub fn supports(&self, what: Quantity) -> bool {
        match what.order() {
            0 => true,
            1 => self.has_theta_derivs(),
            _ => self.has_second_derivs(),
        }
    }

    pub fn is_theta_independent(&self) -> bool {
        match self {
            DensityModel::Canonical(c) => c.h0 == 0.0 || c.a0 == 0.0 || c.phi0 == 0.0,
            DensityModel::UniformTest => true,
            DensityModel::Tabulated(_) => false,
        }
    }

    /// Checked evaluation of one density function.
    pub fn eval(&self, what: Quantity, theta: f64, r: f64, v: f64) -> Result<f64> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidThreshold(r));
        }
        if !self.supports(what) {
            return Err(Error::Capability(match what.order() {
                1 => "first theta-derivatives",
                _ => "second theta-derivatives",
            }));
        }
        Ok(self.value(what, theta, r, v))
    }

    /// Unchecked evaluation; callers must have verified `supports(what)`.
    #[inline]
    pub fn value(&self, what: Quantity, theta: f64, r: f64, v: f64) -> f64 {
        match self {
            DensityModel::Canonical(c) => canonical_value(c, what, theta, r, v),
            DensityModel::UniformTest => uniform_value(what, r, v),
            DensityModel::Tabulated(t) => match what {
                Quantity::Psi => t.psi(theta, r, v),
                Quantity::PsiTheta => t.psi_theta(theta, r, v),
                Quantity::G => t.g(theta, r, v),
                Quantity::GTheta => t.g_theta(theta, r, v),
                Quantity::Moment => t.moment(theta, r, v),
                Quantity::MomentTheta => t.moment_theta(theta, r, v),
                Quantity::PsiTheta2 | Quantity::GTheta2 => f64::NAN,
            },
        }
    }

    /// Freezes the temperature for repeated evaluation.
    pub fn at(&self, theta: f64) -> DensityAt<'_> {
        let shift = match self {
            DensityModel::Canonical(c) => c.theta_shift(theta),
            _ => (0.0, 0.0, 0.0),
        };
        DensityAt { model: self, theta, shift, r_max: self.r_max(R_TAIL_TOL) }
    }

    /// Thresholds where the density has kinks in `r`.
    pub fn r_breaks(&self) -> &[f64] {
        match self {
            DensityModel::Canonical(_) => &[],
            DensityModel::UniformTest => &[1.0],
            DensityModel::Tabulated(t) => t.rs(),
        }
    }

    /// Positive `v` values where the density (or its `θ`-derivatives) has kinks at `θ`.
    pub fn v_breaks(&self, theta: f64, out: &mut Vec<f64>) {
        out.clear();
        match self {
            DensityModel::Canonical(c) => {
                let (h, _, _) = c.theta_shift(theta);
                if h > 0.0 {
                    out.push(h);
                }
                out.push(h + 0.5);
                out.push(h + 1.0);
            }
            DensityModel::UniformTest => out.push(1.0),
            DensityModel::Tabulated(t) => out.extend(t.vs().iter().copied().filter(|v| *v > 0.0)),
        }
    }

    /// Length scale below which the integrand is resolved by one 8-point Gauss panel.
    pub fn r_scale(&self) -> f64 {
        match self {
            DensityModel::Canonical(c) => c.r_decay,
            _ => f64::INFINITY,
        }
    }

    /// Cut-off radius containing all but `tol` of the `(1+r)`-weighted mass.
    pub fn r_max(&self, tol: f64) -> f64 {
        match self {
            DensityModel::Canonical(c) => c.r_cutoff(tol),
            DensityModel::UniformTest => 1.0,
            DensityModel::Tabulated(t) => t.r_last(),
        }
    }

    /// Composite Gauss nodes and weights resolving the `r`-dependence on `(0, r_max]`.
    pub fn r_quadrature(&self) -> (Vec<f64>, Vec<f64>) {
        let mut pieces = Vec::new();
        quadrature::panels(0.0, self.r_max(R_TAIL_TOL), self.r_breaks(), self.r_scale(), &mut pieces);
        quadrature::composite_nodes(&pieces)
    }

    /// `sup_θ ∫_0^∞∫_0^∞ ψ dv dr`, the bound on `|P|`.
    pub fn mass_bound(&self) -> f64 {
        match self {
            DensityModel::Canonical(c) => c.a_mass() * c.bump_mass(),
            DensityModel::UniformTest => 1.0,
            DensityModel::Tabulated(t) => t.mass_bound(),
        }
    }

    /// Largest `|v|` in the support of `ψ(θ, r, ·)`.
    pub fn v_extent(&self, theta: f64) -> f64 {
        match self {
            DensityModel::Canonical(c) => c.theta_shift(theta).0 + 1.0,
            DensityModel::UniformTest => 1.0,
            DensityModel::Tabulated(t) => t.v_last(),
        }
    }

    /// `μ(r) ≥ sup_{θ,v} ψ(θ, r, v)`.
    pub fn psi_sup_at(&self, r: f64) -> f64 {
        match self {
            DensityModel::Canonical(c) => c.a(r) * c.phi0 / 64.0,
            DensityModel::UniformTest => {
                if r < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            DensityModel::Tabulated(t) => t.psi_sup_at(r),
        }
    }
}

#[inline]
fn canonical_value(c: &CanonicalDensity, what: Quantity, theta: f64, r: f64, v: f64) -> f64 {
    canonical_shifted(c, c.theta_shift(theta), what, r, v)
}

#[inline]
fn canonical_shifted(c: &CanonicalDensity, shift: (f64, f64, f64), what: Quantity, r: f64, v: f64) -> f64 {
    let a = c.a(r);
    if a == 0.0 {
        return 0.0;
    }
    let (h, dh, d2h) = shift;
    let abs_v = v.abs();
    let x = abs_v - h;
    let sg = if v < 0.0 { -1.0 } else { 1.0 };
    match what {
        Quantity::Psi => a * c.phi(x),
        Quantity::PsiTheta => -a * dh * c.dphi(x),
        Quantity::PsiTheta2 => a * (dh * dh * c.d2phi(x) - d2h * c.dphi(x)),
        Quantity::G => sg * a * c.phi_primitive(x),
        Quantity::GTheta => -sg * a * dh * c.phi(x),
        Quantity::GTheta2 => sg * a * (dh * dh * c.dphi(x) - d2h * c.phi(x)),
        Quantity::Moment => a * (c.phi_moment_primitive(x) + h * c.phi_primitive(x)),
        Quantity::MomentTheta => a * dh * (c.phi_primitive(x) - abs_v * c.phi(x)),
    }
}

/// A density frozen at one temperature, with the `θ`-dependent shift precomputed.
#[derive(Debug, Clone, Copy)]
pub struct DensityAt<'a> {
    model: &'a DensityModel,
    theta: f64,
    shift: (f64, f64, f64),
    r_max: f64,
}

impl<'a> DensityAt<'a> {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn model(&self) -> &'a DensityModel {
        self.model
    }

    /// Truncation radius `r_max(R_TAIL_TOL)`.
    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    #[inline]
    pub fn value(&self, what: Quantity, r: f64, v: f64) -> f64 {
        match self.model {
            DensityModel::Canonical(c) => canonical_shifted(c, self.shift, what, r, v),
            m => m.value(what, self.theta, r, v),
        }
    }

    /// `(g, m, g_θ, m_θ)` at one point.
    #[inline]
    pub fn outputs(&self, r: f64, v: f64) -> [f64; 4] {
        match self.model {
            DensityModel::Canonical(c) => {
                let a = c.a(r);
                if a == 0.0 {
                    return [0.0; 4];
                }
                let (h, dh, _) = self.shift;
                let abs_v = v.abs();
                let x = abs_v - h;
                let sg = if v < 0.0 { -1.0 } else { 1.0 };
                let big = c.phi_primitive(x);
                let small = c.phi(x);
                [
                    sg * a * big,
                    a * (c.phi_moment_primitive(x) + h * big),
                    -sg * a * dh * small,
                    a * dh * (big - abs_v * small),
                ]
            }
            m => [
                m.value(Quantity::G, self.theta, r, v),
                m.value(Quantity::Moment, self.theta, r, v),
                m.value(Quantity::GTheta, self.theta, r, v),
                m.value(Quantity::MomentTheta, self.theta, r, v),
            ],
        }
    }
}

#[inline]
fn uniform_value(what: Quantity, r: f64, v: f64) -> f64 {
    if r >= 1.0 {
        return 0.0;
    }
    match what {
        Quantity::Psi => {
            if v.abs() < 1.0 {
                1.0
            } else {
                0.0
            }
        }
        Quantity::G => v.clamp(-1.0, 1.0),
        Quantity::Moment => 0.5 * (v * v).min(1.0),
        _ => 0.0,
    }
}
