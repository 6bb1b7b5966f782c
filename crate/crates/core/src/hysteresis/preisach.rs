//! Preisach operator, potential, their `θ`-derivatives and the dissipation of a step.
//!
//! Integrals in `r` are taken along the exact memory profile: the profile and
//! the density are split into pieces on which both are smooth, and each piece
//! is integrated by the 8-point Gauss rule.

use serde::{Deserialize, Serialize};

use super::bank::PlayBank;
use super::curve::MemoryCurve;
use crate::density::{DensityAt, DensityModel, Quantity};
use crate::error::{Error, Result};
use crate::quadrature::gauss8;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct HystOutputs {
    pub p: f64,
    pub u: f64,
    pub p_theta: f64,
    pub u_theta: f64,
    pub dissipation_increment: f64,
}

/// Upper integration limit for a profile: beyond it the integrand vanishes or is truncated.
fn r_upper(curve: &MemoryCurve, at: &DensityAt) -> f64 {
    if curve.tail() == 0.0 {
        curve.support().min(at.r_max())
    } else {
        at.r_max()
    }
}

/// Sorted breakpoints `0 = p_0 < … < p_n = r_hi` for the given profiles.
fn breakpoints(curves: &[&MemoryCurve], at: &DensityAt, r_hi: f64, out: &mut Vec<f64>) {
    out.clear();
    if r_hi <= 0.0 {
        return;
    }
    let mut levels = Vec::with_capacity(8);
    at.model().v_breaks(at.theta(), &mut levels);
    let n = levels.len();
    for i in 0..n {
        levels.push(-levels[i]);
    }
    levels.push(0.0);
    out.push(0.0);
    for c in curves {
        c.breakpoints(&levels, r_hi, out);
    }
    out.extend(at.model().r_breaks().iter().copied().filter(|r| *r > 0.0 && *r < r_hi));
    out.push(r_hi);
    out.sort_by(f64::total_cmp);
    out.dedup_by(|b, a| *b - *a <= 1e-15 * a.max(1.0));
    if let Some(last) = out.last_mut() {
        *last = r_hi;
    }
}

/// Calls `f(r, w)` at the Gauss nodes of every piece, refined to the density's `r`-scale.
fn sweep(points: &[f64], scale: f64, mut f: impl FnMut(f64, f64)) {
    let rule = gauss8();
    for win in points.windows(2) {
        let (a, b) = (win[0], win[1]);
        let n = if scale.is_finite() { ((b - a) / scale).ceil().max(1.0) as usize } else { 1 };
        let h = (b - a) / n as f64;
        for k in 0..n {
            let lo = a + h * k as f64;
            let half = 0.5 * h;
            let mid = lo + half;
            for (x, w) in rule.nodes().iter().zip(rule.weights()) {
                f(mid + half * x, half * w);
            }
        }
    }
}

fn integrate_curve(curve: &MemoryCurve, at: &DensityAt, mut f: impl FnMut(f64, f64, f64)) {
    let r_hi = r_upper(curve, at);
    if r_hi <= 0.0 {
        return;
    }
    let mut points = Vec::with_capacity(16);
    breakpoints(&[curve], at, r_hi, &mut points);
    sweep(&points, at.model().r_scale(), |r, w| f(r, w, curve.eval(r)));
}

/// `∫ g(θ, r, ξ_r) dr` along a profile.
pub fn curve_p(curve: &MemoryCurve, at: &DensityAt) -> f64 {
    let mut acc = 0.0;
    integrate_curve(curve, at, |r, w, xi| acc += w * at.value(Quantity::G, r, xi));
    acc
}

/// `(P, U, P_θ, U_θ)` along a profile in one sweep.
pub fn curve_outputs(curve: &MemoryCurve, at: &DensityAt) -> HystOutputs {
    let mut acc = [0.0; 4];
    integrate_curve(curve, at, |r, w, xi| {
        let o = at.outputs(r, xi);
        for (a, v) in acc.iter_mut().zip(o) {
            *a += w * v;
        }
    });
    HystOutputs { p: acc[0], u: acc[1], p_theta: acc[2], u_theta: acc[3], dissipation_increment: 0.0 }
}

/// `∫ r |g(θ, r, ξ_new) − g(θ, r, ξ_old)| dr` between two profiles.
pub fn curve_dissipation(old: &MemoryCurve, new: &MemoryCurve, at: &DensityAt) -> f64 {
    let r_hi = r_upper(old, at).max(r_upper(new, at));
    if r_hi <= 0.0 || old == new {
        return 0.0;
    }
    let mut points = Vec::with_capacity(24);
    breakpoints(&[old, new], at, r_hi, &mut points);
    let mut acc = 0.0;
    sweep(&points, at.model().r_scale(), |r, w| {
        let dg = at.value(Quantity::G, r, new.eval(r)) - at.value(Quantity::G, r, old.eval(r));
        acc += w * r * dg.abs();
    });
    acc
}

fn check_first_derivs(density: &DensityModel) -> Result<()> {
    if density.supports(Quantity::GTheta) {
        Ok(())
    } else {
        Err(Error::Capability("first theta-derivatives"))
    }
}

/// Preisach operator `P(θ)[q]` for the bank's current memory.
pub fn eval_p(bank: &PlayBank, theta: f64, density: &DensityModel) -> f64 {
    curve_p(bank.curve(), &density.at(theta))
}

/// Preisach potential `U(θ)[q]`.
pub fn eval_u(bank: &PlayBank, theta: f64, density: &DensityModel) -> f64 {
    let at = density.at(theta);
    let mut acc = 0.0;
    integrate_curve(bank.curve(), &at, |r, w, xi| acc += w * at.value(Quantity::Moment, r, xi));
    acc
}

/// `(P_θ, U_θ)`.
pub fn eval_theta_derivs(bank: &PlayBank, theta: f64, density: &DensityModel) -> Result<(f64, f64)> {
    check_first_derivs(density)?;
    let at = density.at(theta);
    let mut acc = (0.0, 0.0);
    integrate_curve(bank.curve(), &at, |r, w, xi| {
        acc.0 += w * at.value(Quantity::GTheta, r, xi);
        acc.1 += w * at.value(Quantity::MomentTheta, r, xi);
    });
    Ok(acc)
}

/// All four outputs at once; `dissipation_increment` is left at zero.
pub fn hyst_outputs(bank: &PlayBank, theta: f64, density: &DensityModel) -> Result<HystOutputs> {
    check_first_derivs(density)?;
    Ok(curve_outputs(bank.curve(), &density.at(theta)))
}

/// Energy dissipated by the step `bank_old → bank_new` at frozen `θ`.
pub fn dissipation_increment(
    bank_old: &PlayBank,
    bank_new: &PlayBank,
    theta: f64,
    density: &DensityModel,
) -> Result<f64> {
    if bank_old.grid() != bank_new.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(curve_dissipation(bank_old.curve(), bank_new.curve(), &density.at(theta)))
}

/// Grid-sum `Σ_j w_j g(θ, r_j, ξ_j)` over the bank's threshold grid.
pub fn grid_sum_p(bank: &PlayBank, theta: f64, density: &DensityModel) -> f64 {
    let at = density.at(theta);
    bank.states().zip(bank.grid().weights()).map(|(s, w)| w * at.value(Quantity::G, s.r, s.xi)).sum()
}

/// `max_j |Δξ_j (q − ξ_new,j) − r_j |Δξ_j||` for one bank step.
pub fn step_energy_identity_check(bank_old: &PlayBank, bank_new: &PlayBank, q_new: f64) -> f64 {
    bank_old
        .states()
        .zip(bank_new.xi())
        .map(|(s, &xi_new)| {
            let d = xi_new - s.xi;
            (d * (q_new - xi_new) - s.r * d.abs()).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::hysteresis::bank_advance;
    use crate::quadrature::{GaussRule, RGrid};
    use approx::assert_relative_eq;

    fn uniform_bank() -> PlayBank {
        PlayBank::virgin(Arc::new(RGrid::gauss_legendre(64, 1.0).unwrap()))
    }

    /// Brute-force double integral `∫_0^{r_max} ∫_0^{ξ(r)} f(r, v) dv dr`.
    fn brute(curve: &MemoryCurve, r_max: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
        let rule = GaussRule::new(8);
        let mut cuts: Vec<f64> = curve.vertices().iter().map(|(r, _)| *r).filter(|r| *r < r_max).collect();
        cuts.push(r_max);
        cuts.windows(2)
            .map(|w| {
                rule.integrate_composite(w[0], w[1], 400, |r| {
                    rule.integrate_composite(0.0, curve.eval(r), 200, |v| f(r, v))
                })
            })
            .sum()
    }

    #[test]
    fn uniform_density_closed_forms() {
        let d = DensityModel::UniformTest;
        let bank = bank_advance(&uniform_bank(), 0.5);
        assert_relative_eq!(eval_p(&bank, 0.0, &d), 0.125, epsilon = 1e-14);
        assert_relative_eq!(eval_u(&bank, 0.0, &d), 1.0 / 48.0, epsilon = 1e-14);
        let bank = bank_advance(&uniform_bank(), 2.0);
        assert_relative_eq!(eval_p(&bank, 0.0, &d), 1.0, epsilon = 1e-14);
        assert_eq!(eval_p(&uniform_bank(), 0.0, &d), 0.0);
        let psi = |r: f64, v: f64| if r < 1.0 && v.abs() < 1.0 { 1.0 } else { 0.0 };
        assert_relative_eq!(eval_p(&bank, 0.0, &d), brute(bank.curve(), 1.0, psi), max_relative = 1e-3);
    }

    #[test]
    fn virgin_step_dissipation() {
        let d = DensityModel::UniformTest;
        let old = uniform_bank();
        let new = bank_advance(&old, 1.0);
        assert_relative_eq!(dissipation_increment(&old, &new, 0.0, &d).unwrap(), 1.0 / 6.0, epsilon = 1e-14);
        assert_eq!(dissipation_increment(&new, &new, 0.0, &d).unwrap(), 0.0);
        let other = PlayBank::virgin(Arc::new(RGrid::gauss_legendre(8, 1.0).unwrap()));
        assert_eq!(dissipation_increment(&old, &other, 0.0, &d), Err(Error::GridMismatch));
    }

    #[test]
    fn canonical_outputs_match_brute_force() {
        let d = DensityModel::canonical(1.0, 0.5, 64.0, 0.5).unwrap();
        let mut bank = PlayBank::virgin(Arc::new(RGrid::gauss_legendre(64, 12.0).unwrap()));
        for q in [1.7, -0.4, 0.9, 0.1] {
            bank.advance(q);
        }
        let theta = 3.0;
        let r_max = d.r_max(crate::density::R_TAIL_TOL);
        let p = brute(bank.curve(), r_max, |r, v| d.value(Quantity::Psi, theta, r, v));
        let u = brute(bank.curve(), r_max, |r, v| v * d.value(Quantity::Psi, theta, r, v));
        let pt = brute(bank.curve(), r_max, |r, v| d.value(Quantity::PsiTheta, theta, r, v));
        let ut = brute(bank.curve(), r_max, |r, v| v * d.value(Quantity::PsiTheta, theta, r, v));
        let out = hyst_outputs(&bank, theta, &d).unwrap();
        assert_relative_eq!(out.p, p, max_relative = 1e-9);
        assert_relative_eq!(out.u, u, max_relative = 1e-9);
        assert_relative_eq!(out.p_theta, pt, max_relative = 1e-8);
        assert_relative_eq!(out.u_theta, ut, max_relative = 1e-8);
        assert_relative_eq!(out.p, eval_p(&bank, theta, &d), max_relative = 1e-14);
        // the grid sum approximates the same integral
        let monotone = bank_advance(&PlayBank::virgin(bank.grid().clone()), 1.2);
        assert_relative_eq!(grid_sum_p(&monotone, theta, &d), eval_p(&monotone, theta, &d), max_relative = 1e-3);
    }

    #[test]
    fn theta_derivatives_need_capability() {
        let table = crate::density::TabulatedDensity::from_rows(
            [0.0, 1.0]
                .iter()
                .flat_map(|&t| [0.5, 1.0].into_iter().map(move |r| (t, r)))
                .flat_map(|(t, r)| [0.0, 1.0].into_iter().map(move |v| (t, r, v, 1.0 + t))),
        )
        .unwrap();
        let d = DensityModel::tabulated(table);
        let bank = bank_advance(&uniform_bank(), 0.5);
        assert!(eval_theta_derivs(&bank, 0.5, &d).is_ok());
        assert_eq!(eval_theta_derivs(&bank, -1.0, &DensityModel::UniformTest).unwrap(), (0.0, 0.0));
    }
}
