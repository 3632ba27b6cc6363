use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use segal_core::scan::ConstraintProblem;
use segal_core::*;

fn spectrum(n: usize) -> FrequencySpec {
    let freqs: Vec<f64> = (0..n).map(|k| 0.1 * (1.0 + 0.37 * k as f64).powi(2)).collect();
    FrequencySpec::from_frequencies(&freqs).unwrap()
}

fn flows(c: &mut Criterion) {
    let mut group = c.benchmark_group("flow");
    for n in [4, 16, 64] {
        let s = spectrum(n);
        let a = build_generator(&s);
        group.bench_with_input(BenchmarkId::new("closed_form", n), &s, |b, s| {
            b.iter(|| flow_closed_form(s, black_box(7.3)))
        });
        group.bench_with_input(BenchmarkId::new("expm", n), &a, |b, a| {
            b.iter(|| flow_expm(a, black_box(7.3)).unwrap())
        });
    }
    group.finish();
}

fn realization(c: &mut Criterion) {
    let s = spectrum(64);
    c.bench_function("construct_and_verify_64", |b| {
        b.iter(|| {
            let r = construct_unique_realization(black_box(&s));
            verify_axioms(r.metric().matrix(), r.form().matrix(), r.generator(), r.form(), 1e-11)
                .unwrap()
        })
    });
}

fn scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("uniqueness_scan");
    group.sample_size(10);
    for freqs in [vec![0.7, 2.1], vec![0.4, 1.3, 1.3, 6.0]] {
        let s = FrequencySpec::from_frequencies(&freqs).unwrap();
        let problem = ConstraintProblem::for_spec(&s);
        group.bench_with_input(BenchmarkId::from_parameter(s.dim()), &problem, |b, p| {
            b.iter(|| uniqueness_scan(p).unwrap())
        });
    }
    group.finish();
}

fn fock(c: &mut Criterion) {
    let mut group = c.benchmark_group("fock_build");
    for (n, cutoff) in [(1, 8), (2, 5), (3, 4), (4, 6)] {
        let s = spectrum(n);
        group.bench_with_input(BenchmarkId::new(format!("modes{n}"), cutoff), &cutoff, |b, &k| {
            b.iter(|| build_fock(&s, k).unwrap())
        });
    }
    group.finish();
}

criterion_group!(kernels, flows, realization, scan, fock);
criterion_main!(kernels);
