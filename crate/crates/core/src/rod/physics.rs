//! Pointwise constitutive expressions evaluated at one quadrature node.

use serde::{Deserialize, Serialize};

use crate::hysteresis::HystOutputs;
use crate::material::{cutoff, MaterialParams};

/// Field values at one node.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeFields {
    pub x: f64,
    pub u: f64,
    pub u_x: f64,
    pub u_xx: f64,
    pub u_t: f64,
    pub u_xt: f64,
    pub theta: f64,
    pub theta_x: f64,
    /// `K_R(θ)`.
    pub theta_hat: f64,
}

/// Full integrand multiplying `s_k'` in the momentum equation:
/// `ν u_xt + c u_x + (e/κ)(e u_x + P) + f'(u_x) U + ½ α'(u_x) P² − β θ̂`.
pub fn stress_bracket(f: &NodeFields, h: &HystOutputs, mat: &MaterialParams) -> f64 {
    mat.nu * f.u_xt + (mat.c + mat.e * mat.e / mat.kappa) * f.u_x + nonlinear_stress(f, h, mat)
}

/// The part of [`stress_bracket`] not covered by the linear modal operator:
/// `(e/κ) P + f'(u_x) U + ½ α'(u_x) P² − β θ̂`.
#[inline]
pub fn nonlinear_stress(f: &NodeFields, h: &HystOutputs, mat: &MaterialParams) -> f64 {
    mat.e / mat.kappa * h.p + mat.f.deriv(f.u_x) * h.u + 0.5 * mat.alpha.deriv(f.u_x) * h.p * h.p
        - mat.beta * f.theta_hat
}

/// `G = f(u_x)(q P_θ − U_θ)`.
#[inline]
pub fn entropy_coupling(u_x: f64, q: f64, h: &HystOutputs, mat: &MaterialParams) -> f64 {
    mat.f.value(u_x) * (q * h.p_theta - h.u_theta)
}

/// Heat source `ν K_R(u_xt²) − β θ̂ u_xt + f(u_x) D/dt − θ̂ (G − G_prev)/dt`, where `D`
/// is the dissipation increment of the last step and `dt` its length.
/// With `dt = 0` the two rate terms vanish.
pub fn thermal_source(f: &NodeFields, h: &HystOutputs, g: f64, prev_g: f64, dt: f64, mat: &MaterialParams) -> f64 {
    let mut src = mat.nu * cutoff(f.u_xt * f.u_xt, mat.cutoff) - mat.beta * f.theta_hat * f.u_xt;
    if dt > 0.0 {
        src += mat.f.value(f.u_x) * h.dissipation_increment / dt - f.theta_hat * (g - prev_g) / dt;
    }
    src
}

/// Local entropy production `ν u_xt² + f(u_x) D/dt`.
pub fn entropy_production_density(f: &NodeFields, h: &HystOutputs, dt: f64, mat: &MaterialParams) -> f64 {
    let hyst = if dt > 0.0 { mat.f.value(f.u_x) * h.dissipation_increment / dt } else { 0.0 };
    mat.nu * f.u_xt * f.u_xt + hyst
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub sigma: f64,
    /// `e u_x + κE + P`, zero up to rounding.
    pub d_residual: f64,
    pub e_field: f64,
    /// Entropy; undefined (NaN) where `θ ≤ 0`.
    pub entropy: f64,
    pub q: f64,
}

/// Stress, electric field, dielectric residual and entropy at one node.
///
/// The thermal stress is taken as `−β(θ̂ − θ_c)`, so that the reference state
/// carries the stress `β θ_c` at `θ = 0`.
pub fn observables(f: &NodeFields, q: f64, h: &HystOutputs, mat: &MaterialParams) -> Observables {
    let e_field = -(mat.e * f.u_x + h.p) / mat.kappa;
    let d_residual = mat.e * f.u_x + mat.kappa * e_field + h.p;
    let sigma = mat.nu * f.u_xt + mat.c * f.u_x - mat.e * e_field
        + mat.f.deriv(f.u_x) * h.u
        + 0.5 * mat.alpha.deriv(f.u_x) * h.p * h.p
        - mat.beta * (f.theta_hat - mat.theta_c);
    let entropy = if f.theta > 0.0 {
        -mat.caloric_slope(f.theta) + mat.beta * f.u_x + entropy_coupling(f.u_x, q, h, mat)
    } else {
        f64::NAN
    };
    Observables { sigma, d_residual, e_field, entropy, q }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn linear_material() -> MaterialParams {
        MaterialParams { nu: 0.0, beta: 0.0, c: 1.0, e: 1.0, kappa: 1.0, ..presets::default_material() }
    }

    #[test]
    fn stress_of_pure_strain() {
        let f = NodeFields { u_x: 0.5, ..Default::default() };
        let s = stress_bracket(&f, &HystOutputs::default(), &linear_material());
        assert!((s - 1.0).abs() < 1e-15);
        assert_eq!(stress_bracket(&NodeFields::default(), &HystOutputs::default(), &presets::default_material()), 0.0);
    }

    #[test]
    fn stress_term_by_term() {
        let mat = presets::default_material();
        let f = NodeFields { u_x: 0.3, u_xt: -0.7, theta: 2.0, theta_hat: 2.0, ..Default::default() };
        let h = HystOutputs { p: 0.11, u: 0.02, ..Default::default() };
        // f' and α' of the default functions written out by hand
        let fp = -(mat.f.f1 - mat.f.f0) * 2.0 * 0.3 / (1.0 + 0.09f64).powi(2);
        let ap = -mat.alpha.alpha0 * 2.0 * 0.3 / (1.0 + 0.09f64).powi(2);
        let expect = mat.nu * -0.7 + mat.c * 0.3 + mat.e / mat.kappa * (mat.e * 0.3 + 0.11) + fp * 0.02
            + 0.5 * ap * 0.11 * 0.11
            - mat.beta * 2.0;
        assert!((stress_bracket(&f, &h, &mat) - expect).abs() < 1e-15);
    }

    #[test]
    fn source_cuts_viscous_heating() {
        let mat = MaterialParams { nu: 2.0, beta: 0.0, cutoff: 3.0, ..presets::default_material() };
        let f = NodeFields { u_xt: 10.0, ..Default::default() };
        let h = HystOutputs::default();
        assert_eq!(thermal_source(&f, &h, 0.0, 0.0, 0.1, &mat), 6.0);
        let calm = NodeFields::default();
        assert_eq!(thermal_source(&calm, &h, 0.0, 0.0, 0.1, &MaterialParams { beta: 0.0, ..mat }), 0.0);
    }

    #[test]
    fn source_term_by_term() {
        let mat = presets::default_material();
        let f = NodeFields { u_x: -0.4, u_xt: 0.25, theta: 1.5, theta_hat: 1.5, ..Default::default() };
        let h = HystOutputs { dissipation_increment: 3e-4, ..Default::default() };
        let dt = 1e-2;
        let fv = mat.f.f0 + (mat.f.f1 - mat.f.f0) / 1.16;
        let expect = mat.nu * 0.0625 - mat.beta * 1.5 * 0.25 + fv * 3e-2 - 1.5 * (0.7 - 0.5) / dt;
        assert!((thermal_source(&f, &h, 0.7, 0.5, dt, &mat) - expect).abs() < 1e-12);
    }

    #[test]
    fn reference_state_observables() {
        let mat = presets::default_material();
        let zero = NodeFields::default();
        let o = observables(&zero, 0.0, &HystOutputs::default(), &mat);
        assert_eq!(o.e_field, 0.0);
        assert_eq!(o.d_residual, 0.0);
        assert!((o.sigma - mat.beta * mat.theta_c).abs() < 1e-15);
        assert!(o.entropy.is_nan());
        let at_ref = NodeFields { theta: mat.theta_c, theta_hat: mat.theta_c, ..Default::default() };
        let o = observables(&at_ref, 0.0, &HystOutputs::default(), &mat);
        assert!((o.entropy - mat.c0).abs() < 1e-15);
    }
}
