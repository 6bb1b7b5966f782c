use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use thermopiezo_bench::{damped_drive, rich_curve};
use thermopiezo_core::hysteresis::{curve_dissipation, curve_outputs};
use thermopiezo_core::inversion::{feedback_coeffs, solve_on_curve, DEFAULT_TOL};
use thermopiezo_core::presets::{default_density, default_material};
use thermopiezo_core::MemoryCurve;

fn advance(c: &mut Criterion) {
    let inputs = damped_drive(1000, 2.0);
    c.bench_function("curve_advance_1000", |b| {
        b.iter(|| {
            let mut curve = MemoryCurve::virgin();
            for &q in &inputs {
                curve.advance(q);
            }
            black_box(curve)
        })
    });
}

fn outputs(c: &mut Criterion) {
    let d = default_density();
    let at = d.at(1.3);
    let mut g = c.benchmark_group("curve_outputs");
    for n in [10, 100, 1000] {
        let curve = rich_curve(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &curve, |b, curve| {
            b.iter(|| black_box(curve_outputs(curve, &at)))
        });
    }
    g.finish();
}

fn dissipation(c: &mut Criterion) {
    let d = default_density();
    let at = d.at(1.3);
    let old = rich_curve(200);
    let mut new = old.clone();
    new.advance(old.input() + 0.05);
    c.bench_function("curve_dissipation", |b| b.iter(|| black_box(curve_dissipation(&old, &new, &at))));
}

fn inversion(c: &mut Criterion) {
    let d = default_density();
    let mat = default_material();
    let at = d.at(1.0);
    let curve = rich_curve(200);
    let coeffs = feedback_coeffs(0.4, &mat);
    c.bench_function("solve_on_curve_warm", |b| {
        b.iter(|| black_box(solve_on_curve(&curve, &at, coeffs, DEFAULT_TOL, Some(curve.input())).unwrap()))
    });
    c.bench_function("solve_on_curve_cold", |b| {
        b.iter(|| black_box(solve_on_curve(&curve, &at, coeffs, DEFAULT_TOL, None).unwrap()))
    });
}

criterion_group!(benches, advance, outputs, dissipation, inversion);
criterion_main!(benches);
