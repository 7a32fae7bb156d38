use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use liouville_bench::{constant_data, general_data};
use liouville_core::faa_di_bruno::{log_derivative_mixed, MixedJet};
use liouville_core::{build_quartet, fd_solve, JetField, SolutionField};

fn quartet(c: &mut Criterion) {
    let d = general_data();
    c.bench_function("build_quartet radius 4", |b| {
        b.iter(|| build_quartet(black_box(&d), 4.0, 1e-10).unwrap())
    });
}

fn field(c: &mut Criterion) {
    let f = SolutionField::new(build_quartet(&general_data(), 4.0, 1e-10).unwrap());
    c.bench_function("field value", |b| b.iter(|| f.value(black_box(0.3), black_box(-0.7)).unwrap()));
    c.bench_function("field partials order 4", |b| {
        b.iter(|| f.partials(black_box(0.3), black_box(-0.7), 4).unwrap())
    });
}

fn formulas(c: &mut Criterion) {
    let jet = MixedJet::from_fn(5, 5, |i, k| 0.1 * (i + 2 * k) as f64);
    // Warm the expansion cache so the loop measures evaluation.
    log_derivative_mixed(&jet, 5, 5).unwrap();
    c.bench_function("log derivative mixed (5,5)", |b| {
        b.iter(|| log_derivative_mixed(black_box(&jet), 5, 5).unwrap())
    });
}

fn finite_difference(c: &mut Criterion) {
    let d = constant_data();
    c.bench_function("fd_solve h=0.01", |b| {
        b.iter(|| fd_solve(black_box(&d), 1.0, 1.0, 0.01, 0.5).unwrap())
    });
}

criterion_group!(benches, quartet, field, formulas, finite_difference);
criterion_main!(benches);
