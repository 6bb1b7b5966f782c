//! Shared fixtures for the hysteresis and solver benchmarks.

use thermopiezo_core::rod::{GalerkinState, InitialCondition};
use thermopiezo_core::{MemoryCurve, Rod, Scenario};

/// Deterministic decaying oscillation, a typical memory-building input.
pub fn damped_drive(n: usize, amplitude: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            amplitude * (1.0 - 0.9 * t) * (37.0 * t).sin()
        })
        .collect()
}

/// Memory profile after a decaying drive of `n` reversals' worth of samples.
pub fn rich_curve(n: usize) -> MemoryCurve {
    let mut c = MemoryCurve::virgin();
    for q in damped_drive(n, 2.0) {
        c.advance(q);
    }
    c
}

/// Default scenario at `m` modes, projected and advanced a few steps so the
/// banks carry memory.
pub fn warm_rod(m: usize) -> (Rod, GalerkinState) {
    let mut sc = Scenario::default();
    sc.discretization.m = m;
    sc.initial = InitialCondition::Smooth { amplitude: 0.3, velocity: 0.5, theta_ramp: 0.2 };
    let rod = sc.rod().expect("default scenario is valid");
    let mat = rod.material();
    let mut s = rod.project_initial(&sc.initial.data(mat.ell, mat.theta_c)).expect("projection succeeds");
    for _ in 0..20 {
        s = rod.step(&s, sc.discretization.dt).expect("step succeeds");
    }
    (rod, s)
}
