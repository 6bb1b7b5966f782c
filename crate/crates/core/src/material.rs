//! Material constants and the constitutive functions `f`, `α`, `F0`, `C_V`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Self-similarity function `f(ε) = f0 + (f1 − f0)/(1 + ε²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelfSimilarity {
    pub f0: f64,
    pub f1: f64,
}

impl SelfSimilarity {
    #[inline]
    pub fn value(&self, eps: f64) -> f64 {
        self.f0 + (self.f1 - self.f0) / (1.0 + eps * eps)
    }

    #[inline]
    pub fn deriv(&self, eps: f64) -> f64 {
        let d = 1.0 + eps * eps;
        -2.0 * (self.f1 - self.f0) * eps / (d * d)
    }

    #[inline]
    pub fn deriv2(&self, eps: f64) -> f64 {
        let d = 1.0 + eps * eps;
        (self.f1 - self.f0) * (6.0 * eps * eps - 2.0) / (d * d * d)
    }
}

/// Feedback parameter `α(ε) = α0/(1 + ε²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Feedback {
    pub alpha0: f64,
}

impl Feedback {
    #[inline]
    pub fn value(&self, eps: f64) -> f64 {
        self.alpha0 / (1.0 + eps * eps)
    }

    #[inline]
    pub fn deriv(&self, eps: f64) -> f64 {
        let d = 1.0 + eps * eps;
        -2.0 * self.alpha0 * eps / (d * d)
    }

    #[inline]
    pub fn deriv2(&self, eps: f64) -> f64 {
        let d = 1.0 + eps * eps;
        self.alpha0 * (6.0 * eps * eps - 2.0) / (d * d * d)
    }
}

/// Caloric part of the free energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaloricModel {
    /// `F0(θ) = −c0 θ log(θ/θ_c)`, i.e. `C_V ≡ c0`.
    ConstantCv,
    /// `C_V(θ) = c0 (1 + (θ⁺)^{1/3})`.
    CubeRootCv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialParams {
    pub rho: f64,
    pub nu: f64,
    pub c: f64,
    pub e: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub beta: f64,
    pub theta_c: f64,
    pub mu_heat: f64,
    pub c0: f64,
    /// Cut-off level `R` of `K_R(z) = min{R, z⁺}`.
    pub cutoff: f64,
    pub ell: f64,
    pub f: SelfSimilarity,
    pub alpha: Feedback,
    pub caloric: CaloricModel,
}

impl Default for SelfSimilarity {
    fn default() -> Self {
        crate::presets::default_material().f
    }
}

impl Default for Feedback {
    fn default() -> Self {
        crate::presets::default_material().alpha
    }
}

impl Default for CaloricModel {
    fn default() -> Self {
        CaloricModel::CubeRootCv
    }
}

impl Default for MaterialParams {
    fn default() -> Self {
        crate::presets::default_material()
    }
}

/// `K_R(z) = min{R, z⁺}`.
#[inline]
pub fn cutoff(z: f64, r: f64) -> f64 {
    z.max(0.0).min(r)
}

impl MaterialParams {
    /// Every violated invariant, as `(field path, message)`.
    pub fn violations(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut check = |name: &str, ok: bool, msg: String| {
            if !ok {
                out.push((format!("material.{name}"), msg));
            }
        };
        let positive = [
            ("rho", self.rho),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("mu_heat", self.mu_heat),
            ("c0", self.c0),
            ("ell", self.ell),
            ("cutoff", self.cutoff),
            ("theta_c", self.theta_c),
        ];
        for (name, x) in positive {
            check(name, x.is_finite() && x > 0.0, format!("must be positive (got {x})"));
        }
        for (name, x) in [("nu", self.nu), ("beta", self.beta), ("c", self.c)] {
            check(name, x.is_finite() && x >= 0.0, format!("must be nonnegative (got {x})"));
        }
        check("e", self.e.is_finite(), format!("must be finite (got {})", self.e));
        check("f.f0", self.f.f0.is_finite() && self.f.f0 > 0.0, format!("must be positive (got {})", self.f.f0));
        check(
            "f.f1",
            self.f.f1.is_finite() && self.f.f1 >= self.f.f0,
            format!("must satisfy f1 ≥ f0 (got f0 = {}, f1 = {})", self.f.f0, self.f.f1),
        );
        check("alpha.alpha0", self.alpha.alpha0.is_finite(), "must be finite".into());
        if self.kappa > 0.0 && self.alpha.alpha0.is_finite() {
            let worst = eps_samples().map(|e| 1.0 + self.kappa * self.alpha.value(e)).fold(f64::INFINITY, f64::min);
            check(
                "alpha.alpha0",
                worst >= 0.0,
                format!("1 + κα(ε) must be nonnegative (min sampled value {worst})"),
            );
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidMaterial(
                v.iter().map(|(k, m)| format!("{k}: {m}")).collect::<Vec<_>>().join("; "),
            ))
        }
    }

    /// `C_V(θ)`.
    #[inline]
    pub fn heat_capacity(&self, theta: f64) -> f64 {
        match self.caloric {
            CaloricModel::ConstantCv => self.c0,
            CaloricModel::CubeRootCv => self.c0 * (1.0 + theta.max(0.0).cbrt()),
        }
    }

    /// `Ĉ_V(θ) = ∫_0^θ C_V(K_R(ϑ)) dϑ`.
    pub fn caloric_energy(&self, theta: f64) -> f64 {
        match self.caloric {
            CaloricModel::ConstantCv => self.c0 * theta,
            CaloricModel::CubeRootCv => {
                let r = self.cutoff;
                let body = |t: f64| self.c0 * (t + 0.75 * t * t.cbrt());
                if theta <= 0.0 {
                    self.c0 * theta
                } else if theta <= r {
                    body(theta)
                } else {
                    body(r) + self.heat_capacity(r) * (theta - r)
                }
            }
        }
    }

    /// `F0'(θ)` for `θ > 0`, normalised so that `F0'(θ_c) = −c0`.
    pub fn caloric_slope(&self, theta: f64) -> f64 {
        let log = (theta / self.theta_c).ln();
        match self.caloric {
            CaloricModel::ConstantCv => -self.c0 * (log + 1.0),
            CaloricModel::CubeRootCv => {
                -self.c0 * (1.0 + log + 3.0 * (theta.cbrt() - self.theta_c.cbrt()))
            }
        }
    }

    /// Feedback gain `A(ε) = (1 + κα(ε))/(κ f(ε))`.
    #[inline]
    pub fn feedback_gain(&self, eps: f64) -> f64 {
        (1.0 + self.kappa * self.alpha.value(eps)) / (self.kappa * self.f.value(eps))
    }

    /// `A'(ε)`.
    pub fn feedback_gain_deriv(&self, eps: f64) -> f64 {
        let f = self.f.value(eps);
        (self.kappa * self.alpha.deriv(eps) * f - (1.0 + self.kappa * self.alpha.value(eps)) * self.f.deriv(eps))
            / (self.kappa * f * f)
    }

    /// Drive `B(ε) = −eε/(κ f(ε))`.
    #[inline]
    pub fn feedback_drive(&self, eps: f64) -> f64 {
        -self.e * eps / (self.kappa * self.f.value(eps))
    }

    /// `A* = sup_ε A(ε)`, sampled together with the limit `ε → ±∞`.
    pub fn a_star(&self) -> f64 {
        let limit = 1.0 / (self.kappa * self.f.f0);
        eps_samples().map(|e| self.feedback_gain(e)).fold(limit, f64::max)
    }
}

/// Dense strain samples on `[-50, 50]`, refined near the origin.
pub(crate) fn eps_samples() -> impl Iterator<Item = f64> {
    (-2000..=2000).map(|i| {
        let x = i as f64 / 2000.0;
        50.0 * x * x * x.signum() + 2.0 * x
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use approx::assert_relative_eq;

    #[test]
    fn constitutive_derivatives_match_finite_differences() {
        let m = presets::default_material();
        for &eps in &[-1.3, -0.2, 0.0, 0.4, 2.0] {
            let h = 1e-6;
            assert_relative_eq!(
                m.f.deriv(eps),
                (m.f.value(eps + h) - m.f.value(eps - h)) / (2.0 * h),
                epsilon = 1e-8
            );
            assert_relative_eq!(
                m.alpha.deriv2(eps),
                (m.alpha.deriv(eps + h) - m.alpha.deriv(eps - h)) / (2.0 * h),
                epsilon = 1e-8
            );
            assert_relative_eq!(
                m.feedback_gain_deriv(eps),
                (m.feedback_gain(eps + h) - m.feedback_gain(eps - h)) / (2.0 * h),
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn caloric_energy_integrates_truncated_heat_capacity() {
        let mut m = presets::default_material();
        m.cutoff = 5.0;
        let rule = crate::quadrature::GaussRule::new(16);
        for &theta in &[-2.0, 0.7, 5.0, 9.0] {
            let (lo, hi, sign) = if theta < 0.0 { (theta, 0.0, -1.0) } else { (0.0, theta, 1.0) };
            let mut pieces = vec![lo];
            if lo < m.cutoff && m.cutoff < hi {
                pieces.push(m.cutoff);
            }
            pieces.push(hi);
            let numeric: f64 = pieces
                .windows(2)
                .map(|w| rule.integrate_composite(w[0], w[1], 400, |t| m.heat_capacity(cutoff(t, m.cutoff))))
                .sum();
            assert_relative_eq!(m.caloric_energy(theta), sign * numeric, max_relative = 1e-7);
        }
    }

    #[test]
    fn entropy_slope_is_consistent_with_heat_capacity() {
        for caloric in [CaloricModel::ConstantCv, CaloricModel::CubeRootCv] {
            let mut m = presets::default_material();
            m.caloric = caloric;
            assert_relative_eq!(m.caloric_slope(m.theta_c), -m.c0, max_relative = 1e-14);
            // C_V = −θ F0''
            let theta = 2.3;
            let h = 1e-5;
            let second = (m.caloric_slope(theta + h) - m.caloric_slope(theta - h)) / (2.0 * h);
            assert_relative_eq!(-theta * second, m.heat_capacity(theta), max_relative = 1e-8);
        }
    }

    #[test]
    fn violations_are_all_reported() {
        let mut m = presets::default_material();
        m.kappa = -1.0;
        m.rho = 0.0;
        m.nu = -0.1;
        let v = m.violations();
        let names: Vec<&str> = v.iter().map(|(k, _)| k.as_str()).collect();
        assert!(names.contains(&"material.kappa"));
        assert!(names.contains(&"material.rho"));
        assert!(names.contains(&"material.nu"));
        let mut m = presets::default_material();
        m.alpha.alpha0 = -2.0 / m.kappa;
        assert!(m.violations().iter().any(|(k, _)| k == "material.alpha.alpha0"));
    }
}
