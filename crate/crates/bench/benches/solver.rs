use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use thermopiezo_bench::warm_rod;

fn step(c: &mut Criterion) {
    let mut g = c.benchmark_group("rod_step");
    for m in [4, 8, 16] {
        let (rod, state) = warm_rod(m);
        g.bench_with_input(BenchmarkId::from_parameter(m), &state, |b, s| {
            b.iter(|| black_box(rod.step(s, 1e-3).unwrap()))
        });
    }
    g.finish();
}

fn diagnostics(c: &mut Criterion) {
    let (rod, state) = warm_rod(8);
    c.bench_function("trace_m8", |b| b.iter(|| black_box(rod.trace(&state))));
    c.bench_function("energy_m8", |b| b.iter(|| black_box(rod.total_energy(&state))));
}

criterion_group!(benches, step, diagnostics);
criterion_main!(benches);
