//! Per-node inversion of the feedback relation `q + A(ε)·P(θ)[q] = B(ε)` and an
//! empirical certificate of the Lipschitz bound for the inverse.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::density::hypothesis::lipschitz_constants;
use crate::density::{DensityAt, DensityModel};
use crate::error::{Error, Result};
use crate::hysteresis::{curve_p, MemoryCurve, PlayBank};
use crate::material::MaterialParams;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackCoeffs {
    /// Gain `A = (1 + κα(ε))/(κ f(ε))`.
    pub a: f64,
    /// Drive `B = −eε/(κ f(ε))`.
    pub b: f64,
}

pub fn feedback_coeffs(eps: f64, material: &MaterialParams) -> FeedbackCoeffs {
    FeedbackCoeffs { a: material.feedback_gain(eps), b: material.feedback_drive(eps) }
}

/// Root of the feedback relation on one memory profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub q: f64,
    pub residual: f64,
    pub iterations: usize,
    pub curve: MemoryCurve,
}

/// Solves `q + A·P(θ)[advance(curve, q)] = B` by safeguarded Illinois regula falsi.
///
/// `F(q)` is nondecreasing with slope at least one, so one evaluation at the
/// starting point `guess` already brackets the root; the global bracket
/// `[B − A·m, B + A·m]` with `m = sup|P|` is used as a fallback.
pub fn solve_on_curve(
    curve: &MemoryCurve,
    at: &DensityAt,
    coeffs: FeedbackCoeffs,
    tol: f64,
    guess: Option<f64>,
) -> Result<Inversion> {
    let FeedbackCoeffs { a, b } = coeffs;
    let mut trial = MemoryCurve::virgin();
    let spread = a * at.model().mass_bound();
    if a == 0.0 || spread == 0.0 {
        curve.advance_into(b, &mut trial);
        return Ok(Inversion { q: b, residual: 0.0, iterations: 0, curve: trial });
    }
    let (lo, hi) = (b - spread, b + spread);
    let mut evals = 0;
    let mut f = |q: f64, out: &mut MemoryCurve| {
        evals += 1;
        curve.advance_into(q, out);
        q + a * curve_p(out, at) - b
    };
    let mut best = (f64::INFINITY, 0.0, MemoryCurve::virgin());
    let consider = |q: f64, fq: f64, c: &MemoryCurve, best: &mut (f64, f64, MemoryCurve)| {
        if fq.abs() < best.0 {
            *best = (fq.abs(), q, c.clone());
        }
        fq.abs() <= tol
    };

    let q0 = guess.unwrap_or(b).clamp(lo, hi);
    let f0 = f(q0, &mut trial);
    if consider(q0, f0, &trial, &mut best) {
        return Ok(Inversion { q: q0, residual: f0.abs(), iterations: 1, curve: trial });
    }
    // slope ≥ 1 puts the root between q0 and q0 − F(q0)
    let mut q1 = (q0 - f0).clamp(lo, hi);
    let mut f1 = f(q1, &mut trial);
    if consider(q1, f1, &trial, &mut best) {
        return Ok(Inversion { q: q1, residual: f1.abs(), iterations: 2, curve: trial });
    }
    let mut widen = 1.0;
    while f1.signum() == f0.signum() {
        // rounding in P, or the clamp: fall back towards the global bracket
        widen *= 4.0;
        q1 = if f0 > 0.0 { (q0 - widen * f0.abs()).max(lo) } else { (q0 + widen * f0.abs()).min(hi) };
        f1 = f(q1, &mut trial);
        if consider(q1, f1, &trial, &mut best) {
            return Ok(Inversion { q: q1, residual: f1.abs(), iterations: 2, curve: trial });
        }
        if (q1 == lo || q1 == hi) && f1.signum() == f0.signum() {
            return Err(Error::Bracket { lo, hi, f_lo: f0.min(f1), f_hi: f0.max(f1) });
        }
    }
    let (mut xa, mut fa, mut xb, mut fb) = if f0 < 0.0 { (q0, f0, q1, f1) } else { (q1, f1, q0, f0) };
    let mut stale = 0;
    let mut last_side = 0i8;
    for it in 0..MAX_ITER {
        let width = xb - xa;
        let mut xc = xb - fb * width / (fb - fa);
        if !(xc > xa && xc < xb) || stale >= 3 {
            xc = 0.5 * (xa + xb);
            stale = 0;
        }
        if xc <= xa || xc >= xb {
            break;
        }
        let fc = f(xc, &mut trial);
        if consider(xc, fc, &trial, &mut best) {
            return Ok(Inversion { q: xc, residual: fc.abs(), iterations: it + 3, curve: trial });
        }
        // Illinois: halve the retained end's value when the same side moves twice
        if fc < 0.0 {
            xa = xc;
            fa = fc;
            if last_side == -1 {
                fb *= 0.5;
            }
            last_side = -1;
        } else {
            xb = xc;
            fb = fc;
            if last_side == 1 {
                fa *= 0.5;
            }
            last_side = 1;
        }
        if xb - xa > 0.5 * width {
            stale += 1;
        } else {
            stale = 0;
        }
    }
    Err(Error::Convergence { iterations: evals, residual: best.0 })
}

/// Solves the feedback relation for one bank and returns the committed bank.
pub fn solve_q(
    bank: &PlayBank,
    theta: f64,
    coeffs: FeedbackCoeffs,
    density: &DensityModel,
    tol: f64,
) -> Result<(f64, PlayBank)> {
    let at = density.at(theta);
    let sol = solve_on_curve(bank.curve(), &at, coeffs, tol, Some(bank.last_q()))?;
    let mut next = bank.clone();
    next.advance_with_curve(sol.q, sol.curve);
    Ok((sol.q, next))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzCertificate {
    pub trials: usize,
    pub steps: usize,
    /// Worst `|q − q̂| / (sup|w − ŵ| + M1·sup‖u − û‖)` over all trials and times.
    pub worst_ratio: f64,
    pub ratios: Vec<f64>,
    pub m: f64,
    pub m1: f64,
    /// `e^M`.
    pub bound: f64,
    pub pass: bool,
}

/// Box and resolution of the random trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateSpec {
    pub steps: usize,
    pub knots: usize,
    pub w_amp: f64,
    pub eps_amp: f64,
    pub theta_max: f64,
}

impl Default for CertificateSpec {
    fn default() -> Self {
        Self { steps: 200, knots: 8, w_amp: 2.0, eps_amp: 1.0, theta_max: 10.0 }
    }
}

fn piecewise_linear(rng: &mut ChaCha8Rng, knots: usize, steps: usize, lo: f64, hi: f64) -> Vec<f64> {
    let values: Vec<f64> = (0..knots).map(|_| rng.random_range(lo..=hi)).collect();
    (0..steps)
        .map(|k| {
            let s = k as f64 / (steps - 1).max(1) as f64 * (knots - 1) as f64;
            let i = (s.floor() as usize).min(knots - 2);
            let t = s - i as f64;
            values[i] * (1.0 - t) + values[i + 1] * t
        })
        .collect()
}

fn perturbed(rng: &mut ChaCha8Rng, base: &[f64], knots: usize, scale: f64, lo: f64, hi: f64) -> Vec<f64> {
    let amp = scale * 10f64.powf(rng.random_range(-4.0..=-1.0));
    let delta = piecewise_linear(rng, knots, base.len(), -amp, amp);
    base.iter().zip(delta).map(|(x, d)| (x + d).clamp(lo, hi)).collect()
}

/// Monte-Carlo check of `|q − q̂| ≤ e^M (sup|w − ŵ| + M1 sup‖u − û‖)` on paired
/// random trajectories solved step by step from virgin memories.
pub fn lipschitz_certificate(
    trials: usize,
    density: &DensityModel,
    material: &MaterialParams,
    seed: u64,
    spec: &CertificateSpec,
) -> Result<LipschitzCertificate> {
    let (m, m1) =
        lipschitz_constants(density, material, (-spec.eps_amp, spec.eps_amp), (0.0, spec.theta_max));
    let bound = m.exp();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(trials);
    let (n, k) = (spec.steps.max(2), spec.knots.max(2));
    for _ in 0..trials {
        let w = piecewise_linear(&mut rng, k, n, -spec.w_amp, spec.w_amp);
        let eps = piecewise_linear(&mut rng, k, n, -spec.eps_amp, spec.eps_amp);
        let theta = piecewise_linear(&mut rng, k, n, 0.0, spec.theta_max);
        let w_hat = perturbed(&mut rng, &w, k, spec.w_amp, f64::NEG_INFINITY, f64::INFINITY);
        let eps_hat = perturbed(&mut rng, &eps, k, spec.eps_amp, -spec.eps_amp, spec.eps_amp);
        let theta_hat = perturbed(&mut rng, &theta, k, spec.theta_max, 0.0, spec.theta_max);
        let (mut c, mut c_hat) = (MemoryCurve::virgin(), MemoryCurve::virgin());
        let (mut sup_w, mut sup_u) = (0.0f64, 0.0f64);
        let mut worst = 0.0f64;
        for i in 0..n {
            let solve = |c: &MemoryCurve, w: f64, eps: f64, theta: f64| {
                let coeffs = FeedbackCoeffs { a: material.feedback_gain(eps), b: w };
                solve_on_curve(c, &density.at(theta), coeffs, DEFAULT_TOL, Some(c.input()))
            };
            let s = solve(&c, w[i], eps[i], theta[i])?;
            let s_hat = solve(&c_hat, w_hat[i], eps_hat[i], theta_hat[i])?;
            sup_w = sup_w.max((w[i] - w_hat[i]).abs());
            sup_u = sup_u.max((eps[i] - eps_hat[i]).hypot(theta[i] - theta_hat[i]));
            let denom = sup_w + m1 * sup_u;
            let num = (s.q - s_hat.q).abs();
            if num > 0.0 {
                worst = worst.max(num / denom);
            }
            c = s.curve;
            c_hat = s_hat.curve;
        }
        ratios.push(worst);
    }
    let worst_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(LipschitzCertificate {
        trials,
        steps: n,
        worst_ratio,
        ratios,
        m,
        m1,
        bound,
        pass: worst_ratio <= bound,
    })
}
