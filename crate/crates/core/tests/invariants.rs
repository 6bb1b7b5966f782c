use std::sync::Arc;

use proptest::prelude::*;
use thermopiezo_core::hysteresis::{
    curve_dissipation, curve_outputs, play_update, step_energy_identity_check, MemoryCurve, PlayBank,
};
use thermopiezo_core::inversion::{feedback_coeffs, solve_on_curve, FeedbackCoeffs, DEFAULT_TOL};
use thermopiezo_core::presets::{default_density, default_material};
use thermopiezo_core::rod::{observables, NodeFields};
use thermopiezo_core::RGrid;

fn drive(inputs: &[f64]) -> MemoryCurve {
    let mut c = MemoryCurve::virgin();
    for &q in inputs {
        c.advance(q);
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn play_step_energy_identity(xi in -3.0f64..3.0, q in -5.0f64..5.0, r in 1e-3f64..4.0) {
        let new = play_update(xi, q, r).unwrap();
        let d = new - xi;
        prop_assert!((d * (q - new) - r * d.abs()).abs() <= 1e-12);
    }

    #[test]
    fn bank_step_energy_identity(inputs in prop::collection::vec(-3.0f64..3.0, 1..30), n in 2usize..40) {
        let grid = Arc::new(RGrid::gauss_legendre(n, 3.0).unwrap());
        let mut bank = PlayBank::virgin(grid);
        for &q in &inputs {
            let mut next = bank.clone();
            next.advance(q);
            prop_assert!(step_energy_identity_check(&bank, &next, q) <= 1e-12);
            bank = next;
        }
    }

    #[test]
    fn play_is_a_contraction(xa in -2.0f64..2.0, xb in -2.0f64..2.0, qa in prop::collection::vec(-3.0f64..3.0, 1..30), shift in -0.5f64..0.5, r in 0.01f64..2.0) {
        let (mut a, mut b) = (xa, xb);
        let mut bound = (xa - xb).abs();
        for &q in &qa {
            a = play_update(a, q, r).unwrap();
            b = play_update(b, q + shift, r).unwrap();
            bound = bound.max(shift.abs());
            prop_assert!((a - b).abs() <= bound + 1e-12);
        }
    }

    #[test]
    fn refining_a_monotone_segment_changes_nothing(inputs in prop::collection::vec(-3.0f64..3.0, 2..20), splits in 1usize..8) {
        let coarse = drive(&inputs);
        let mut fine = vec![inputs[0]];
        for w in inputs.windows(2) {
            for s in 1..=splits {
                fine.push(w[0] + (w[1] - w[0]) * s as f64 / splits as f64);
            }
        }
        let fine = drive(&fine);
        for r in [0.05, 0.3, 0.9, 1.7, 2.5] {
            prop_assert!((coarse.eval(r) - fine.eval(r)).abs() <= 1e-12);
        }
    }

    #[test]
    fn symmetric_density_gives_odd_operator(inputs in prop::collection::vec(-3.0f64..3.0, 1..20), theta in 0.1f64..20.0) {
        let d = default_density();
        let at = d.at(theta);
        let neg: Vec<f64> = inputs.iter().map(|q| -q).collect();
        let (hp, hn) = (curve_outputs(&drive(&inputs), &at), curve_outputs(&drive(&neg), &at));
        prop_assert!((hp.p + hn.p).abs() <= 1e-12);
        prop_assert!((hp.u - hn.u).abs() <= 1e-12);
    }

    #[test]
    fn dissipation_is_nonnegative(inputs in prop::collection::vec(-3.0f64..3.0, 1..20), q in -3.0f64..3.0, theta in 0.0f64..50.0) {
        let d = default_density();
        let old = drive(&inputs);
        let mut new = old.clone();
        new.advance(q);
        prop_assert!(curve_dissipation(&old, &new, &d.at(theta)) >= 0.0);
    }

    #[test]
    fn inversion_is_monotone_in_the_drive(inputs in prop::collection::vec(-2.0f64..2.0, 0..10), b in -2.0f64..2.0, db in 1e-6f64..1.0, a in 0.0f64..3.0) {
        let d = default_density();
        let at = d.at(1.0);
        let c = drive(&inputs);
        let lo = solve_on_curve(&c, &at, FeedbackCoeffs { a, b }, DEFAULT_TOL, None).unwrap();
        let hi = solve_on_curve(&c, &at, FeedbackCoeffs { a, b: b + db }, DEFAULT_TOL, None).unwrap();
        prop_assert!(hi.q >= lo.q);
        // slope of q + A·P is at least one, so the root moves by at most db
        prop_assert!(hi.q - lo.q <= db + 2e-10);
    }

    #[test]
    fn displacement_identity_holds(eps in -1.5f64..1.5, inputs in prop::collection::vec(-2.0f64..2.0, 0..10), theta in 0.1f64..5.0) {
        let mat = default_material();
        let d = default_density();
        let at = d.at(theta);
        let sol = solve_on_curve(&drive(&inputs), &at, feedback_coeffs(eps, &mat), DEFAULT_TOL, None).unwrap();
        let h = curve_outputs(&sol.curve, &at);
        let f = NodeFields { u_x: eps, theta, theta_hat: theta, ..NodeFields::default() };
        let obs = observables(&f, sol.q, &h, &mat);
        prop_assert!(obs.d_residual.abs() <= 1e-12, "{}", obs.d_residual);
    }
}
