//! Galerkin system: initial projection, field synthesis and the time step.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::basis::Basis;
use super::config::{Discretization, Field, InitialData};
use super::physics::{entropy_coupling, nonlinear_stress, thermal_source};
use super::state::{Fields, GalerkinState, NodeState};
use crate::density::{DensityModel, R_TAIL_TOL};
use crate::error::{Error, Result};
use crate::hysteresis::{curve_dissipation, curve_outputs, PlayBank};
use crate::inversion::{feedback_coeffs, solve_on_curve};
use crate::material::{cutoff, MaterialParams};
use crate::quadrature::{gauss16, RGrid};

/// The discretized rod: material, density, basis and threshold grid.
#[derive(Debug, Clone)]
pub struct Rod {
    material: MaterialParams,
    density: DensityModel,
    disc: Discretization,
    basis: Basis,
    grid: Arc<RGrid>,
}

impl Rod {
    pub fn new(material: MaterialParams, density: DensityModel, disc: Discretization) -> Result<Self> {
        material.validate()?;
        disc.validate()?;
        let basis = Basis::new(disc.m, disc.nodes(), material.ell)?;
        let grid = Arc::new(RGrid::gauss_legendre(disc.r_nodes, density.r_max(R_TAIL_TOL))?);
        Ok(Self { material, density, disc, basis, grid })
    }

    pub fn material(&self) -> &MaterialParams {
        &self.material
    }

    pub fn density(&self) -> &DensityModel {
        &self.density
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn grid(&self) -> &Arc<RGrid> {
        &self.grid
    }

    /// `∫_0^ℓ f φ dx` by composite 16-point Gauss quadrature.
    fn project_fn(&self, f: &(dyn Fn(f64) -> f64 + Send + Sync), phi: impl Fn(f64) -> f64) -> f64 {
        let panels = (4 * self.disc.m).max(16);
        gauss16().integrate_composite(0.0, self.basis.ell(), panels, |x| f(x) * phi(x))
    }

    fn sine_coeffs(&self, field: &Field) -> Vec<f64> {
        let m = self.disc.m;
        match field {
            Field::Coefficients(c) => (0..m).map(|k| c.get(k).copied().unwrap_or(0.0)).collect(),
            Field::Function(f) => (1..=m).map(|k| self.project_fn(f.as_ref(), |x| self.basis.s(k, x))).collect(),
        }
    }

    fn cosine_coeffs(&self, field: &Field) -> Vec<f64> {
        let m = self.disc.m;
        match field {
            Field::Coefficients(c) => (0..=m).map(|k| c.get(k).copied().unwrap_or(0.0)).collect(),
            Field::Function(f) => (0..=m).map(|k| self.project_fn(f.as_ref(), |x| self.basis.c(k, x))).collect(),
        }
    }

    /// Orthogonal projection of the initial data, with every bank initialised
    /// at the feedback solution for the initial strain and temperature.
    pub fn project_initial(&self, init: &InitialData) -> Result<GalerkinState> {
        let theta_nodes: Vec<f64> = match &init.theta0 {
            Field::Function(f) => self.basis.nodes().iter().map(|x| f(*x)).collect(),
            Field::Coefficients(c) => {
                let mut out = vec![0.0; self.basis.len()];
                self.basis.synth_cos(c, 0, &mut out);
                out
            }
        };
        if let Some((i, t)) = theta_nodes.iter().enumerate().find(|(_, t)| !(**t > 0.0)) {
            return Err(Error::InvalidInitialData(format!(
                "initial temperature {t} at x = {} is not positive",
                self.basis.nodes()[i]
            )));
        }
        let m = self.disc.m;
        let mut state = GalerkinState {
            t: 0.0,
            steps: 0,
            u: self.sine_coeffs(&init.u0),
            v: self.sine_coeffs(&init.u1),
            theta: self.cosine_coeffs(&init.theta0),
            theta_dot: self.disc.regularized_theta.then(|| vec![0.0; m + 1]),
            last_dt: 0.0,
            banks: Vec::new(),
            nodes: Vec::new(),
        };
        if state.u.iter().chain(&state.v).chain(&state.theta).any(|c| !c.is_finite()) {
            return Err(Error::InvalidInitialData("initial data projects to non-finite coefficients".into()));
        }
        let fields = self.reconstruct_fields(&state);
        let virgin = vec![PlayBank::virgin(self.grid.clone()); self.basis.len()];
        let (banks, nodes) = self.solve_nodes(&virgin, &fields, None)?;
        state.banks = banks;
        state.nodes = nodes;
        Ok(state)
    }

    /// Nodal synthesis of `u`, its derivatives, `θ`, `θ_x` and `θ̂ = K_R(θ)`.
    pub fn reconstruct_fields(&self, state: &GalerkinState) -> Fields {
        let n = self.basis.len();
        let b = &self.basis;
        let mut f = Fields {
            x: b.nodes().to_vec(),
            u: vec![0.0; n],
            u_x: vec![0.0; n],
            u_xx: vec![0.0; n],
            u_t: vec![0.0; n],
            u_xt: vec![0.0; n],
            theta: vec![0.0; n],
            theta_x: vec![0.0; n],
            theta_hat: vec![0.0; n],
        };
        b.synth_sin(&state.u, 0, &mut f.u);
        b.synth_sin(&state.u, 1, &mut f.u_x);
        b.synth_sin(&state.u, 2, &mut f.u_xx);
        b.synth_sin(&state.v, 0, &mut f.u_t);
        b.synth_sin(&state.v, 1, &mut f.u_xt);
        b.synth_cos(&state.theta, 0, &mut f.theta);
        b.synth_cos(&state.theta, 1, &mut f.theta_x);
        for (h, t) in f.theta_hat.iter_mut().zip(&f.theta) {
            *h = cutoff(*t, self.material.cutoff);
        }
        f
    }

    /// Solves the feedback relation at every node and evaluates the hysteresis
    /// outputs there. Without `prev` the banks are taken as initial states.
    pub(crate) fn solve_nodes(
        &self,
        banks: &[PlayBank],
        fields: &Fields,
        prev: Option<&[NodeState]>,
    ) -> Result<(Vec<PlayBank>, Vec<NodeState>)> {
        let solved: Vec<(PlayBank, NodeState)> = (0..banks.len())
            .into_par_iter()
            .map(|i| {
                let prev_g = prev.map(|p| p[i].g);
                self.solve_node(&banks[i], fields.u_x[i], fields.theta_hat[i], prev_g)
            })
            .collect::<Result<_>>()?;
        Ok(solved.into_iter().unzip())
    }

    fn solve_node(&self, bank: &PlayBank, u_x: f64, theta_hat: f64, prev_g: Option<f64>) -> Result<(PlayBank, NodeState)> {
        let at = self.density.at(theta_hat);
        let coeffs = feedback_coeffs(u_x, &self.material);
        let sol = solve_on_curve(bank.curve(), &at, coeffs, self.disc.tol_q, Some(bank.last_q()))?;
        let mut hyst = curve_outputs(&sol.curve, &at);
        if prev_g.is_some() {
            hyst.dissipation_increment = curve_dissipation(bank.curve(), &sol.curve, &at);
        }
        let q_residual = (sol.q + coeffs.a * hyst.p - coeffs.b).abs();
        let g = entropy_coupling(u_x, sol.q, &hyst, &self.material);
        let mut next = bank.clone();
        next.advance_with_curve(sol.q, sol.curve);
        let node = NodeState { q: sol.q, coeffs, hyst, g, prev_g: prev_g.unwrap_or(g), q_residual };
        Ok((next, node))
    }

    /// One step of length `dt`.
    ///
    /// The linear modal part of the momentum equation is advanced by the
    /// trapezoidal rule and the temperature implicitly, with all hysteretic and
    /// nonlinear terms taken from the current state. The feedback relation is
    /// then solved at the new strain and temperature, so the returned state
    /// carries hysteresis outputs consistent with its own fields.
    pub fn step(&self, state: &GalerkinState, dt: f64) -> Result<GalerkinState> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidDiscretization(format!("time step {dt} must be positive")));
        }
        let mat = &self.material;
        let b = &self.basis;
        let m = self.disc.m;
        let n = b.len();
        let fields = self.reconstruct_fields(state);

        let mut stress = vec![0.0; n];
        let mut heat = vec![0.0; n];
        for i in 0..n {
            let nf = fields.node(i);
            let ns = &state.nodes[i];
            stress[i] = nonlinear_stress(&nf, &ns.hyst, mat);
            heat[i] = thermal_source(&nf, &ns.hyst, ns.g, ns.prev_g, state.last_dt, mat);
        }

        let stiff_lin = mat.c + mat.e * mat.e / mat.kappa;
        let mut u = Vec::with_capacity(m);
        let mut v = Vec::with_capacity(m);
        for k in 1..=m {
            let lam = b.lambda(k);
            let stiff = mat.gamma * lam * lam + stiff_lin * lam;
            let damp = mat.nu * lam;
            let force = -b.project(&stress, b.dsin_row(k));
            let (u0, v0) = (state.u[k - 1], state.v[k - 1]);
            let lhs = mat.rho + 0.5 * dt * damp + 0.25 * dt * dt * stiff;
            let v1 = (v0 * (mat.rho - 0.5 * dt * damp - 0.25 * dt * dt * stiff) + dt * (force - stiff * u0)) / lhs;
            u.push(u0 + 0.5 * dt * (v0 + v1));
            v.push(v1);
        }

        let mass = self.thermal_mass(&fields.theta_hat)?;
        let source = DVector::from_iterator(m + 1, (0..=m).map(|k| b.project(&heat, b.cos_row(k))));
        let theta_old = DVector::from_column_slice(&state.theta);
        let diffusion = DVector::from_iterator(m + 1, (0..=m).map(|k| mat.mu_heat * b.lambda(k)));
        let (theta, theta_dot) = match &state.theta_dot {
            None => {
                let mut lhs = mass.clone();
                for k in 0..=m {
                    lhs[(k, k)] += dt * diffusion[k];
                }
                let rhs = &mass * &theta_old + dt * source;
                (self.spd_solve(lhs, rhs)?, None)
            }
            Some(w_old) => {
                // (1/m) θ̈ + M θ̇ + μΛθ = F by the trapezoidal rule in (θ, θ̇)
                let w_old = DVector::from_column_slice(w_old);
                let inertia = 1.0 / (m as f64 * dt);
                let mut lhs = 0.5 * &mass;
                let mut rhs = -0.5 * (&mass * &w_old) + source;
                for k in 0..=m {
                    let quarter = 0.25 * dt * diffusion[k];
                    lhs[(k, k)] += inertia + quarter;
                    rhs[k] += (inertia - quarter) * w_old[k] - diffusion[k] * theta_old[k];
                }
                let w_new = self.spd_solve(lhs, rhs)?;
                let theta = &theta_old + 0.5 * dt * (&w_old + &w_new);
                (theta, Some(w_new.as_slice().to_vec()))
            }
        };

        let mut next = GalerkinState {
            t: state.t + dt,
            steps: state.steps + 1,
            u,
            v,
            theta: theta.as_slice().to_vec(),
            theta_dot,
            last_dt: dt,
            banks: Vec::new(),
            nodes: Vec::new(),
        };
        if next.u.iter().chain(&next.v).chain(&next.theta).any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { t: next.t });
        }
        let new_fields = self.reconstruct_fields(&next);
        let (banks, nodes) = self.solve_nodes(&state.banks, &new_fields, Some(&state.nodes))?;
        next.banks = banks;
        next.nodes = nodes;
        Ok(next)
    }

    /// `M_jk = ∫ C_V(θ̂) c_j c_k dx` by nodal quadrature.
    fn thermal_mass(&self, theta_hat: &[f64]) -> Result<DMatrix<f64>> {
        let b = &self.basis;
        let m = self.disc.m;
        let cv: Vec<f64> = theta_hat.iter().map(|t| self.material.heat_capacity(*t)).collect();
        if let Some(c) = cv.iter().find(|c| !(**c > 0.0)) {
            return Err(Error::InvalidMaterial(format!("heat capacity {c} is not positive")));
        }
        let weighted: Vec<f64> = cv.iter().zip(b.weights()).map(|(c, w)| c * w).collect();
        let mut mass = DMatrix::zeros(m + 1, m + 1);
        for j in 0..=m {
            let cj = b.cos_row(j);
            for k in j..=m {
                let ck = b.cos_row(k);
                let s: f64 = weighted.iter().zip(cj).zip(ck).map(|((w, a), c)| w * a * c).sum();
                mass[(j, k)] = s;
                mass[(k, j)] = s;
            }
        }
        Ok(mass)
    }

    fn spd_solve(&self, lhs: DMatrix<f64>, rhs: DVector<f64>) -> Result<DVector<f64>> {
        lhs.cholesky()
            .map(|c| c.solve(&rhs))
            .ok_or_else(|| Error::InvalidMaterial("thermal system matrix is not positive definite".into()))
    }
}
