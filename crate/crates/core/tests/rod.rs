use std::f64::consts::PI;

use approx::assert_relative_eq;
use thermopiezo_core::presets::{default_density, default_material, elastic_material};
use thermopiezo_core::rod::*;
use thermopiezo_core::{DensityModel, MaterialParams, Scenario};

fn rod(material: MaterialParams, density: DensityModel, m: usize) -> Rod {
    Rod::new(material, density, Discretization::with_modes(m)).unwrap()
}

fn start(rod: &Rod, ic: &InitialCondition) -> GalerkinState {
    let mat = rod.material();
    rod.project_initial(&ic.data(mat.ell, mat.theta_c)).unwrap()
}

fn advance(rod: &Rod, mut s: GalerkinState, steps: usize, dt: f64) -> GalerkinState {
    for _ in 0..steps {
        s = rod.step(&s, dt).unwrap();
    }
    s
}

/// Composite Simpson on a fine grid.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn rest_projects_to_uniform_temperature() {
    let r = rod(default_material(), default_density(), 4);
    let s = start(&r, &InitialCondition::Rest);
    assert_relative_eq!(s.theta[0], 1.0, epsilon = 1e-15);
    assert!(s.theta[1..].iter().all(|c| c.abs() < 1e-15));
    assert!(s.u.iter().chain(&s.v).all(|c| *c == 0.0));
}

#[test]
fn single_mode_projects_exactly() {
    let r = rod(default_material(), default_density(), 4);
    let s = start(&r, &InitialCondition::Coefficients { u0: vec![1.0], u1: vec![], theta0: vec![1.0] });
    assert_eq!(s.u, vec![1.0, 0.0, 0.0, 0.0]);
    let f = r.reconstruct_fields(&s);
    assert_relative_eq!(f.u_x[0], PI * 2f64.sqrt(), max_relative = 1e-14);
}

#[test]
fn smooth_projection_matches_fine_quadrature() {
    let mut mat = default_material();
    mat.ell = 1.7;
    let r = rod(mat, default_density(), 8);
    let ic = InitialCondition::Smooth { amplitude: 0.3, velocity: -0.1, theta_ramp: 0.4 };
    let s = start(&r, &ic);
    let ell = mat.ell;
    let amp = (2.0 / ell).sqrt();
    for k in 1..=8 {
        let wk = k as f64 * PI / ell;
        let u = simpson(|x| 0.3 * bump(x, ell) * amp * (wk * x).sin(), 0.0, ell, 20_000);
        let v = simpson(|x| -0.1 * bump(x, ell) * amp * (wk * x).sin(), 0.0, ell, 20_000);
        assert!((s.u[k - 1] - u).abs() < 1e-8, "u_{k}: {} vs {u}", s.u[k - 1]);
        assert!((s.v[k - 1] - v).abs() < 1e-8);
    }
    let th0 = simpson(|x| 1.0 + 0.4 * ramp(x, ell), 0.0, ell, 20_000) / ell.sqrt();
    assert!((s.theta[0] - th0).abs() < 1e-8);
}

#[test]
fn nonpositive_initial_temperature_is_rejected() {
    let r = rod(default_material(), default_density(), 4);
    let ic = InitialCondition::Coefficients { u0: vec![], u1: vec![], theta0: vec![-1.0] };
    assert!(r.project_initial(&ic.data(1.0, 1.0)).is_err());
}

#[test]
fn temperature_cutoff_in_reconstruction() {
    let mat = default_material();
    let r = rod(mat, default_density(), 4);
    let mut s = start(&r, &InitialCondition::Rest);
    s.theta[0] = -1.0;
    assert!(r.reconstruct_fields(&s).theta_hat.iter().all(|h| *h == 0.0));
    s.theta[0] = mat.cutoff + 5.0;
    let f = r.reconstruct_fields(&s);
    assert!(f.theta_hat.iter().all(|h| *h == mat.cutoff));
}

#[test]
fn rest_is_a_fixed_point() {
    let r = rod(default_material(), default_density(), 6);
    let s0 = start(&r, &InitialCondition::Rest);
    let s = advance(&r, s0.clone(), 200, 1e-3);
    assert!(s.u.iter().chain(&s.v).all(|c| c.abs() < 1e-14));
    for (a, b) in s.theta.iter().zip(&s0.theta) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn elastic_mode_oscillates_at_the_linear_frequency() {
    let mat = elastic_material();
    let r = rod(mat, DensityModel::zero(), 8);
    let a = 0.1;
    let s0 = start(&r, &InitialCondition::Mode { k: 2, amplitude: a });
    let dt = 1e-3;
    let s = advance(&r, s0, 1000, dt);
    let lam = (2.0 * PI / mat.ell).powi(2);
    let stiff = mat.gamma * lam * lam + (mat.c + mat.e * mat.e / mat.kappa) * lam;
    let omega = (stiff / mat.rho).sqrt();
    assert_relative_eq!(s.u[1], a * (omega * 1.0).cos(), epsilon = 1e-4 * a);
    assert_relative_eq!(s.v[1], -a * omega * (omega * 1.0).sin(), epsilon = 1e-4 * a * omega);
    for (k, c) in s.u.iter().enumerate() {
        if k != 1 {
            assert!(c.abs() < 1e-14);
        }
    }
}

#[test]
fn linear_energy_matches_modal_sums() {
    let mat = MaterialParams { beta: 0.0, ..default_material() };
    let r = rod(mat, DensityModel::zero(), 6);
    let u0 = vec![0.1, -0.05, 0.02, 0.0, 0.01, 0.003];
    let u1 = vec![0.3, 0.0, -0.2, 0.1];
    let s = start(&r, &InitialCondition::Coefficients { u0: u0.clone(), u1: u1.clone(), theta0: vec![1.0] });
    let e = r.total_energy(&s);
    let lam = |k: usize| (k as f64 * PI / mat.ell).powi(2);
    let kin: f64 = u1.iter().map(|v| 0.5 * mat.rho * v * v).sum();
    let ela: f64 = u0.iter().enumerate().map(|(i, u)| 0.5 * mat.c * lam(i + 1) * u * u).sum();
    let cpl: f64 = u0.iter().enumerate().map(|(i, u)| 0.5 * mat.gamma * lam(i + 1).powi(2) * u * u).sum();
    let ele: f64 = u0.iter().enumerate().map(|(i, u)| 0.5 * mat.e * mat.e / mat.kappa * lam(i + 1) * u * u).sum();
    assert_relative_eq!(e.kinetic, kin, max_relative = 1e-13);
    assert_relative_eq!(e.elastic, ela, max_relative = 1e-13);
    assert_relative_eq!(e.couple, cpl, max_relative = 1e-13);
    assert_relative_eq!(e.electrostatic, ele, max_relative = 1e-13);
    assert_eq!(e.hysteretic, 0.0);
}

#[test]
fn viscosity_drains_mechanical_energy() {
    let mat = MaterialParams { beta: 0.0, nu: 0.05, ..default_material() };
    let r = rod(mat, DensityModel::zero(), 6);
    let mut s = start(&r, &InitialCondition::Smooth { amplitude: 0.1, velocity: 0.0, theta_ramp: 0.0 });
    let mech = |e: EnergyBreakdown| e.kinetic + e.elastic + e.couple + e.electrostatic;
    let mut prev = mech(r.total_energy(&s));
    for _ in 0..300 {
        s = r.step(&s, 1e-3).unwrap();
        let now = mech(r.total_energy(&s));
        assert!(now < prev);
        prev = now;
    }
}

#[test]
fn boundary_values_vanish_after_a_run() {
    let sc = Scenario::default();
    let r = sc.rod().unwrap();
    let s = advance(&r, start(&r, &InitialCondition::Smooth { amplitude: 0.2, velocity: 0.1, theta_ramp: 0.3 }), 100, 1e-3);
    let f = r.reconstruct_fields(&s);
    let n = f.x.len() - 1;
    for v in [f.u[0], f.u[n], f.u_xx[0], f.u_xx[n], f.theta_x[0], f.theta_x[n]] {
        assert!(v.abs() < 1e-12, "{v}");
    }
}

#[test]
fn cached_entropy_production_matches_recomputation() {
    let r = Scenario::default().rod().unwrap();
    let mut s = start(&r, &InitialCondition::default());
    for _ in 0..20 {
        let next = r.step(&s, 1e-3).unwrap();
        let cached = r.entropy_production(&next);
        let fresh = r.entropy_production_between(&s, &next, 1e-3);
        assert!(cached >= 0.0);
        assert_relative_eq!(cached, fresh, max_relative = 1e-12, epsilon = 1e-300);
        s = next;
    }
}

#[test]
fn checkpoint_round_trip_continues_identically() {
    let r = Scenario::default().rod().unwrap();
    let s = advance(&r, start(&r, &InitialCondition::default()), 30, 1e-3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ck.json");
    r.checkpoint(&s, "abc").write(&path).unwrap();
    let ck = Checkpoint::read(&path).unwrap();
    assert_eq!(ck.config_hash, "abc");
    let restored = r.restore(&ck).unwrap();
    assert_eq!(restored, s);
    let a = advance(&r, s, 30, 1e-3);
    let b = advance(&r, restored, 30, 1e-3);
    assert_eq!(a.u, b.u);
    assert_eq!(a.theta, b.theta);
}

#[test]
fn checkpoint_from_another_discretization_is_rejected() {
    let r4 = rod(default_material(), default_density(), 4);
    let r6 = rod(default_material(), default_density(), 6);
    let ck = r4.checkpoint(&start(&r4, &InitialCondition::Rest), "");
    assert!(r6.restore(&ck).is_err());
}

#[test]
fn regularized_temperature_mode_runs() {
    let mut sc = Scenario::default();
    sc.discretization.m = 4;
    sc.discretization.regularized_theta = true;
    sc.initial = InitialCondition::Smooth { amplitude: 0.2, velocity: 0.0, theta_ramp: 0.2 };
    let r = sc.rod().unwrap();
    let s0 = start(&r, &sc.initial);
    assert_eq!(s0.theta_dot.as_deref(), Some(&[0.0; 5][..]));
    let out = r.run(s0, 300, 1e-3, &mut NoOutput);
    assert!(out.summary.completed);
    assert!(out.summary.min_theta > 0.0);
    assert!(out.state.theta.iter().all(|c| c.is_finite()));
}

#[test]
fn run_emits_traces_and_snapshots() {
    let mut sc = Scenario::default();
    sc.discretization.m = 4;
    sc.discretization.output_stride = 7;
    sc.discretization.snapshot_stride = 25;
    let r = sc.rod().unwrap();
    let mut rec = Recorder::default();
    let out = r.run(start(&r, &sc.initial), 50, 1e-3, &mut rec);
    assert!(out.summary.completed);
    // step 0, every 7th step, and the final step
    assert_eq!(rec.traces.len(), 1 + 7 + 1);
    assert_eq!(rec.snapshots.len(), 3);
    assert_eq!(rec.snapshots[0].1.len(), r.basis().len());
    assert_relative_eq!(rec.traces.last().unwrap().t, 0.05, epsilon = 1e-12);
}
