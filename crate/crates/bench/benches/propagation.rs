use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use holoq_bench::{bench_axis, l2_program, labframe_spec};
use holoq_core::evolve::{integrate, propagate_fixed};
use holoq_core::holonomy::{numeric_default, Evaluation};
use holoq_core::labframe::{labframe_config, simulate_labframe_gate};
use holoq_core::model::hamiltonian_resonant_core;
use holoq_core::numkit::{herm_propagator, hermitian_eigen};
use holoq_core::IntegratorConfig;

fn spectral(c: &mut Criterion) {
    let h = hamiltonian_resonant_core(&bench_axis().params());
    c.bench_function("hermitian_eigen", |b| {
        b.iter(|| hermitian_eigen(black_box(&h)))
    });
    c.bench_function("herm_propagator", |b| {
        b.iter(|| herm_propagator(black_box(&h), black_box(1.3)).unwrap())
    });
}

fn integrator(c: &mut Criterion) {
    let h0 = hamiltonian_resonant_core(&bench_axis().params());
    let h = move |t: f64| h0.scale_re((std::f64::consts::PI * t).sin().powi(2));
    c.bench_function("propagate_fixed_256", |b| {
        b.iter(|| propagate_fixed(&h, 0.0, 1.0, black_box(256), None).unwrap())
    });
    c.bench_function("integrate_default", |b| {
        b.iter(|| integrate(&h, 0.0, 1.0, &IntegratorConfig::default()).unwrap())
    });
}

fn composition(c: &mut Criterion) {
    let program = l2_program();
    c.bench_function("l2_closed_form", |b| {
        b.iter(|| {
            program
                .evaluate(black_box(&Evaluation::ClosedForm))
                .unwrap()
        })
    });
    c.bench_function("l2_numeric", |b| {
        b.iter(|| program.evaluate(black_box(&numeric_default())).unwrap())
    });
}

fn labframe(c: &mut Criterion) {
    let spec = labframe_spec(0.03);
    let cfg = labframe_config(&spec, &IntegratorConfig::default());
    let mut group = c.benchmark_group("labframe");
    group.sample_size(10);
    group.bench_function("ratio_0.03", |b| {
        b.iter(|| simulate_labframe_gate(&spec, &cfg, true).unwrap())
    });
    group.finish();
}

criterion_group!(benches, spectral, integrator, composition, labframe);
criterion_main!(benches);
