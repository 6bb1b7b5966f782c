//! Sampling-based checker for the structural assumptions on the density and the
//! constitutive functions.
//!
//! Items of the density hypothesis are keyed `2.2(i)` … `2.2(xiii)`, those on the
//! constitutive functions `2.1(i)` … `2.1(iii)`. Bounds that only require the
//! existence of a constant are reported against the tightest constant consistent
//! with the samples (`psi0`, `delta`); the binding checks are `δ < 1` and (xiii).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DensityModel, Quantity};
use crate::material::{eps_samples, MaterialParams};
use crate::quadrature;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    /// Number of temperature samples, log-spaced on `[0, theta_max]` (including 0).
    pub n_theta: usize,
    pub theta_max: f64,
    /// Number of `v` samples on `[0, v_extent(θ)]`.
    pub n_v: usize,
    /// Strain half-width of the box used for `M` and `M1`.
    pub eps_box: f64,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self { n_theta: 64, theta_max: 1e3, n_v: 128, eps_box: 1.0 }
    }
}

impl SamplingSpec {
    pub fn thetas(&self) -> Vec<f64> {
        let n = self.n_theta.max(2);
        let lo = (1e-3f64).min(self.theta_max).ln();
        let hi = self.theta_max.ln();
        std::iter::once(0.0)
            .chain((0..n - 1).map(|i| (lo + (hi - lo) * i as f64 / (n - 2).max(1) as f64).exp()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemVerdict {
    pub estimate: f64,
    pub bound: f64,
    pub pass: bool,
    pub marginal: bool,
    /// Sample at which the estimate (or the violation) was found.
    pub at: SamplePoint,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingRecord {
    pub n_theta: usize,
    pub theta_max: f64,
    pub n_v: usize,
    pub r_nodes: usize,
    pub r_max: f64,
    pub eps_box: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub items: BTreeMap<String, ItemVerdict>,
    pub psi0: f64,
    pub delta: f64,
    pub a_star: f64,
    /// `M = ∫ μ(r) dr` for the feedback-scaled density on the strain box.
    pub m: f64,
    pub m1: f64,
    pub sampling: SamplingRecord,
    pub pass: bool,
}

impl HypothesisReport {
    pub fn failed_items(&self) -> Vec<&str> {
        self.items.iter().filter(|(_, v)| !v.pass).map(|(k, _)| k.as_str()).collect()
    }
}

/// Running supremum with the point where it is attained.
#[derive(Clone, Copy)]
struct Sup {
    value: f64,
    at: SamplePoint,
}

impl Sup {
    fn new() -> Self {
        Self { value: 0.0, at: SamplePoint::default() }
    }

    fn offer(&mut self, value: f64, at: SamplePoint) {
        if !(value <= self.value) {
            self.value = value;
            self.at = at;
        }
    }
}

fn pt(theta: f64, r: Option<f64>, v: Option<f64>) -> SamplePoint {
    SamplePoint { theta: Some(theta), r, v, eps: None }
}

/// Cumulative integrals `∫_0^{v_k} f dv` on the grid `vs` (with `vs[0] = 0`),
/// using the 8-point rule on every cell, split at `breaks`.
fn cumulative(vs: &[f64], breaks: &[f64], mut f: impl FnMut(f64) -> f64, out: &mut Vec<f64>) {
    let rule = quadrature::gauss8();
    out.clear();
    out.push(0.0);
    let mut acc = 0.0;
    for w in vs.windows(2) {
        let mut a = w[0];
        for &b in breaks.iter().filter(|b| **b > w[0] && **b < w[1]) {
            acc += rule.integrate(a, b, &mut f);
            a = b;
        }
        acc += rule.integrate(a, w[1], &mut f);
        out.push(acc);
    }
}

fn linspace(hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect()
}

/// Constants `(M, M1)` of the Lipschitz inversion bound for the feedback-scaled
/// density `A(ε)ψ(θ, r, v)` on the box `ε ∈ eps_range`, `θ ∈ theta_range`.
///
/// `M1` integrates the sampled `K(r,v) = sup|A'|·sup_θ ψ + A*·sup_θ |ψ_θ|`.
pub fn lipschitz_constants(
    model: &DensityModel,
    material: &MaterialParams,
    eps_range: (f64, f64),
    theta_range: (f64, f64),
) -> (f64, f64) {
    let n_eps = 2001;
    let (e0, e1) = eps_range;
    let mut a_star: f64 = 0.0;
    let mut da: f64 = 0.0;
    for i in 0..n_eps {
        let eps = e0 + (e1 - e0) * i as f64 / (n_eps - 1) as f64;
        a_star = a_star.max(material.feedback_gain(eps));
        da = da.max(material.feedback_gain_deriv(eps).abs());
    }
    let (rn, rw) = model.r_quadrature();
    let mass: f64 = rn.iter().zip(&rw).map(|(r, w)| w * model.psi_sup_at(*r)).sum();
    let m = a_star * mass;

    let n_theta = 129;
    let (t0, t1) = theta_range;
    let thetas: Vec<f64> = (0..n_theta).map(|i| t0 + (t1 - t0) * i as f64 / (n_theta - 1) as f64).collect();
    let v_hi = thetas.iter().map(|t| model.v_extent(*t)).fold(0.0, f64::max);
    let vs = linspace(v_hi, 257);
    let h = vs[1] - vs[0];
    let mut m1 = 0.0;
    for (r, w) in rn.iter().zip(&rw) {
        let mut line = 0.0;
        for (k, v) in vs.iter().enumerate() {
            let mut sup_psi: f64 = 0.0;
            let mut sup_dpsi: f64 = 0.0;
            for &t in &thetas {
                sup_psi = sup_psi.max(model.value(Quantity::Psi, t, *r, *v));
                sup_dpsi = sup_dpsi.max(model.value(Quantity::PsiTheta, t, *r, *v).abs());
            }
            let kv = da * sup_psi + a_star * sup_dpsi;
            let tw = if k == 0 || k + 1 == vs.len() { 0.5 } else { 1.0 };
            line += tw * h * kv;
        }
        // both signs of v
        m1 += w * 2.0 * line;
    }
    (m, m1)
}

/// Evaluates every item over the sampling grid; never fails, violations are reported.
pub fn hypothesis_report(
    model: &DensityModel,
    material: &MaterialParams,
    sampling: &SamplingSpec,
) -> HypothesisReport {
    let (rn, rw) = model.r_quadrature();
    let thetas = sampling.thetas();
    let theta_edge = *thetas.last().unwrap();
    let second = model.has_second_derivs();
    let mut items = BTreeMap::new();

    // (i) evenness and nonnegativity, (ii) vanishing θ-derivative for θ ≤ 0
    let mut neg = Sup::new();
    let mut asym = Sup::new();
    let mut cold = Sup::new();
    for &theta in thetas.iter().chain(&[-10.0, -1.0, -1e-3]) {
        let vs = linspace(model.v_extent(theta) * 1.05, sampling.n_v);
        for &r in &rn {
            for &v in &vs {
                let p = model.value(Quantity::Psi, theta, r, v);
                let at = pt(theta, Some(r), Some(v));
                neg.offer(-p, at);
                asym.offer((p - model.value(Quantity::Psi, theta, r, -v)).abs(), at);
                if theta <= 0.0 {
                    cold.offer(model.value(Quantity::PsiTheta, theta, r, v).abs(), at);
                    if second {
                        cold.offer(model.value(Quantity::PsiTheta2, theta, r, v).abs(), at);
                    }
                }
            }
        }
    }
    let (worst_i, at_i) = if neg.value >= asym.value { (neg.value, neg.at) } else { (asym.value, asym.at) };
    items.insert(
        "2.2(i)".to_string(),
        ItemVerdict {
            estimate: worst_i,
            bound: 0.0,
            pass: worst_i <= 0.0,
            marginal: false,
            at: at_i,
            note: "max of negative part and asymmetry of ψ".into(),
        },
    );
    items.insert(
        "2.2(ii)".to_string(),
        ItemVerdict {
            estimate: cold.value,
            bound: 0.0,
            pass: cold.value == 0.0,
            marginal: false,
            at: cold.at,
            note: "sup |ψ_θ| for θ ≤ 0".into(),
        },
    );

    let mut s3 = Sup::new();
    let mut s4 = Sup::new();
    let mut s5 = Sup::new();
    let mut s6 = Sup::new();
    let mut s7 = Sup::new();
    let mut s8 = Sup::new();
    let mut s9 = Sup::new();
    let mut s10 = Sup::new();
    let mut s11 = Sup::new();
    let mut s12 = Sup::new();
    let mut breaks = Vec::new();
    let mut cum = Vec::new();
    for &theta in &thetas {
        let v_ext = model.v_extent(theta);
        let vs = linspace(v_ext, sampling.n_v);
        for &v in &vs {
            let (mut a3, mut a6, mut a8) = (0.0, 0.0, 0.0);
            for (r, w) in rn.iter().zip(&rw) {
                let p = model.value(Quantity::Psi, theta, *r, v);
                a3 += w * (1.0 + r) * p;
                a6 += w * p;
                if theta > 0.0 {
                    a8 += w * (1.0 + r) * model.value(Quantity::PsiTheta, theta, *r, v).abs();
                }
            }
            s3.offer(a3, pt(theta, None, Some(v)));
            s6.offer(v.abs() * a6 / (1.0 + theta.max(0.0).powf(1.0 / 6.0)), pt(theta, None, Some(v)));
            if theta > 0.0 {
                s8.offer((1.0 + theta) * a8, pt(theta, None, Some(v)));
            }
        }
        let mass: f64 = rn.iter().zip(&rw).map(|(r, w)| w * model.value(Quantity::G, theta, *r, v_ext)).sum();
        s4.offer(mass, pt(theta, None, None));
        let first: f64 =
            rn.iter().zip(&rw).map(|(r, w)| w * model.value(Quantity::Moment, theta, *r, v_ext)).sum();
        s5.offer(first / (1.0 + theta.max(0.0)), pt(theta, None, None));
        if theta <= 0.0 {
            continue;
        }

        model.v_breaks(theta, &mut breaks);
        let mut a7 = 0.0;
        let mut a10 = 0.0;
        let mut a11 = 0.0;
        let mut k9 = vec![0.0; vs.len()];
        let mut k12 = vec![0.0; vs.len()];
        for (r, w) in rn.iter().zip(&rw) {
            let r = *r;
            cumulative(&vs, &breaks, |v| model.value(Quantity::PsiTheta, theta, r, v).abs(), &mut cum);
            let abs_int = *cum.last().unwrap();
            cumulative(&vs, &breaks, |v| v * model.value(Quantity::PsiTheta, theta, r, v).abs(), &mut cum);
            let v_abs_int = *cum.last().unwrap();
            a7 += w * (v_abs_int + theta * (1.0 + r) * abs_int);
            a10 += w * abs_int;
            cumulative(&vs, &breaks, |v| model.value(Quantity::GTheta, theta, r, v), &mut cum);
            for (k, c) in k9.iter_mut().zip(&cum) {
                *k += w * c;
            }
            if second {
                a11 += w * r * model.value(Quantity::GTheta2, theta, r, v_ext);
                cumulative(&vs, &breaks, |v| model.value(Quantity::GTheta2, theta, r, v), &mut cum);
                for (k, c) in k12.iter_mut().zip(&cum) {
                    *k += w * c;
                }
            }
        }
        s7.offer(a7, pt(theta, None, None));
        s10.offer(a10, pt(theta, None, None));
        s11.offer(((1.0 + theta) * a11).abs(), pt(theta, None, None));
        for (k, v) in vs.iter().enumerate() {
            s9.offer(((1.0 + theta) * k9[k]).abs(), pt(theta, None, Some(*v)));
            s12.offer(((1.0 + theta) * k12[k]).abs(), pt(theta, None, Some(*v)));
        }
    }

    let psi_items = [
        ("2.2(iii)", s3, "sup_{θ,v} ∫(1+r)ψ dr"),
        ("2.2(iv)", s4, "sup_θ ∫∫ψ dv dr"),
        ("2.2(v)", s5, "sup_θ ∫∫vψ dv dr / (1+θ⁺)"),
        ("2.2(vi)", s6, "sup_{θ,v} |v|∫ψ dr / (1+(θ⁺)^{1/6})"),
        ("2.2(vii)", s7, "sup_θ ∫∫(v+θ(1+r))|ψ_θ| dv dr"),
        ("2.2(viii)", s8, "sup_{θ>0,v} (1+θ)∫(1+r)|ψ_θ| dr"),
        ("2.2(ix)", s9, "sup_{θ>0,K} |(1+θ)∫∫_0^K g_θ dv dr|"),
    ];
    let psi0 = psi_items.iter().map(|(_, s, _)| s.value).fold(0.0, f64::max);
    for (id, s, what) in psi_items {
        let at_edge = s.at.theta == Some(theta_edge) && s.value > 0.0;
        let mut note = what.to_string();
        if at_edge {
            note.push_str("; supremum attained at the largest sampled θ");
        }
        items.insert(
            id.to_string(),
            ItemVerdict {
                estimate: s.value,
                bound: psi0,
                pass: s.value.is_finite() && s.value <= psi0,
                marginal: at_edge,
                at: s.at,
                note,
            },
        );
    }

    let f1 = material.f.f1;
    let a_star = material.a_star();
    let mut delta_items = vec![("2.2(x)", s10, "sup_{θ>0} ∫∫|ψ_θ| dv dr")];
    if second {
        delta_items.push(("2.2(xi)", s11, "sup_{θ>0} |∫∫r(1+θ)ψ_θθ dv dr|"));
        delta_items.push(("2.2(xii)", s12, "sup_{θ>0,K} |(1+θ)∫∫_0^K g_θθ dv dr|"));
    }
    let delta = f1 * delta_items.iter().map(|(_, s, _)| s.value).fold(0.0, f64::max);
    let coupling = 7.0 + 3.0 * a_star * psi0;
    let budget = 0.5 * material.c0;
    for (id, s, what) in delta_items {
        items.insert(
            id.to_string(),
            ItemVerdict {
                estimate: s.value,
                bound: delta / f1,
                pass: s.value.is_finite() && s.value <= delta / f1 && delta < 1.0,
                marginal: coupling * f1 * s.value >= 0.9 * budget,
                at: s.at,
                note: what.into(),
            },
        );
    }
    if !second {
        for id in ["2.2(xi)", "2.2(xii)"] {
            items.insert(
                id.to_string(),
                ItemVerdict {
                    estimate: f64::NAN,
                    bound: delta / f1,
                    pass: false,
                    marginal: false,
                    at: SamplePoint::default(),
                    note: "density provides no second θ-derivatives".into(),
                },
            );
        }
    }
    let lhs = coupling * delta;
    items.insert(
        "2.2(xiii)".to_string(),
        ItemVerdict {
            estimate: lhs,
            bound: budget,
            pass: lhs <= budget && delta < 1.0,
            marginal: lhs <= budget && lhs >= 0.9 * budget,
            at: SamplePoint::default(),
            note: format!("(7 + 3A*Ψ0)δ with A* = {a_star:.6}, Ψ0 = {psi0:.6e}, δ = {delta:.6e}"),
        },
    );

    constitutive_items(material, &thetas, &mut items);

    let eps_box = sampling.eps_box;
    let (m, m1) = lipschitz_constants(model, material, (-eps_box, eps_box), (0.0, sampling.theta_max.min(10.0)));
    let pass = items.values().all(|v| v.pass);
    HypothesisReport {
        items,
        psi0,
        delta,
        a_star,
        m,
        m1,
        sampling: SamplingRecord {
            n_theta: thetas.len(),
            theta_max: sampling.theta_max,
            n_v: sampling.n_v,
            r_nodes: rn.len(),
            r_max: model.r_max(super::R_TAIL_TOL),
            eps_box,
        },
        pass,
    }
}

fn constitutive_items(material: &MaterialParams, thetas: &[f64], items: &mut BTreeMap<String, ItemVerdict>) {
    let f = &material.f;
    let alpha = &material.alpha;
    let mut f_min = Sup::new();
    let mut f_max = Sup::new();
    let mut lip_f: f64 = 0.0;
    let mut lip_df: f64 = 0.0;
    let mut growth: f64 = 0.0;
    let mut alpha_sup: f64 = 0.0;
    let mut lip_a: f64 = 0.0;
    let mut lip_da: f64 = 0.0;
    let mut sign = Sup::new();
    let at_eps = |eps: f64| SamplePoint { eps: Some(eps), ..Default::default() };
    f_min.value = f64::NEG_INFINITY;
    f_max.value = f64::NEG_INFINITY;
    sign.value = f64::NEG_INFINITY;
    for eps in eps_samples() {
        let fv = f.value(eps);
        f_min.offer(-fv, at_eps(eps));
        f_max.offer(fv, at_eps(eps));
        lip_f = lip_f.max(f.deriv(eps).abs());
        lip_df = lip_df.max(f.deriv2(eps).abs());
        growth = growth.max(1.0 + eps.abs() * f.deriv(eps).abs());
        alpha_sup = alpha_sup.max(alpha.value(eps).abs());
        lip_a = lip_a.max(alpha.deriv(eps).abs());
        lip_da = lip_da.max(alpha.deriv2(eps).abs());
        sign.offer(-(1.0 + material.kappa * alpha.value(eps)), at_eps(eps));
    }
    let fmin = -f_min.value;
    let finite = [lip_f, lip_df, growth].iter().all(|x| x.is_finite());
    let f_ok = f.f0 > 0.0 && fmin >= f.f0 * (1.0 - 1e-12) && f_max.value <= f.f1 * (1.0 + 1e-12) && finite;
    items.insert(
        "2.1(i)".to_string(),
        ItemVerdict {
            estimate: fmin,
            bound: f.f0,
            pass: f_ok,
            marginal: false,
            at: if fmin < f.f0 { f_min.at } else { f_max.at },
            note: format!(
                "min f = {fmin:.6}, max f = {:.6}, Lip f ≈ {lip_f:.4}, Lip f' ≈ {lip_df:.4}, sup(1+|ε||f'|) ≈ {growth:.4}",
                f_max.value
            ),
        },
    );
    let min_sign = -sign.value;
    let a_finite = [alpha_sup, lip_a, lip_da].iter().all(|x| x.is_finite());
    items.insert(
        "2.1(ii)".to_string(),
        ItemVerdict {
            estimate: min_sign,
            bound: 0.0,
            pass: min_sign >= 0.0 && a_finite,
            marginal: false,
            at: sign.at,
            note: format!(
                "min(1+κα) = {min_sign:.6}, sup|α| ≈ {alpha_sup:.4}, Lip α ≈ {lip_a:.4}, Lip α' ≈ {lip_da:.4}, A* = {:.6}",
                material.a_star()
            ),
        },
    );
    let mut worst = f64::INFINITY;
    let mut worst_at = SamplePoint::default();
    for &theta in thetas.iter().chain(&[-10.0, -1.0]) {
        let ratio = material.heat_capacity(theta) / (material.c0 * (1.0 + theta.max(0.0).cbrt()));
        if ratio < worst {
            worst = ratio;
            worst_at = SamplePoint { theta: Some(theta), ..Default::default() };
        }
    }
    items.insert(
        "2.1(iii)".to_string(),
        ItemVerdict {
            estimate: worst,
            bound: 1.0,
            pass: worst >= 1.0 - 1e-12,
            marginal: false,
            at: worst_at,
            note: "min_θ C_V(θ) / (c0(1+(θ⁺)^{1/3}))".into(),
        },
    );
}
