use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use circlewalk_bench::{instance, FIB_INSTANCES};
use circlewalk_core::chain_exact::{psi_disc_star, transition_scan, SpectralState};
use circlewalk_core::diophantine::Rational;
use circlewalk_core::lattice_dist::presets;
use circlewalk_core::montecarlo::clt_experiment;
use circlewalk_core::variance_const::{c_alpha, c_rational, TestFunction};
use circlewalk_core::{IrrationalNumber, SamplerConfig};

fn bench_transition(c: &mut Criterion) {
    let mut group = c.benchmark_group("transition_scan");
    group.sample_size(10);
    for (p, q) in FIB_INSTANCES {
        let (sd, r, grid) = instance(p, q);
        group.bench_with_input(BenchmarkId::from_parameter(q), &grid, |b, grid| {
            b.iter(|| transition_scan(&sd, r, black_box(grid)).unwrap())
        });
    }
    group.finish();
}

fn bench_synthesis(c: &mut Criterion) {
    let mut group = c.benchmark_group("synthesis");
    for q in [233i128, 4096, 65537] {
        let state = SpectralState::new(&presets::uniform12(), Rational::new(1, q).unwrap())
            .unwrap()
            .advance(1000);
        group.bench_with_input(BenchmarkId::from_parameter(q), &state, |b, s| {
            b.iter(|| psi_disc_star(&s.to_distribution().unwrap()))
        });
    }
    group.finish();
}

fn bench_variance(c: &mut Criterion) {
    let sd = presets::uniform12();
    let f = TestFunction::sawtooth();
    let alpha = IrrationalNumber::golden();
    c.bench_function("c_rational 10946/17711", |b| {
        b.iter(|| c_rational(&f, &sd, black_box(Rational::new(10946, 17711).unwrap())).unwrap())
    });
    c.bench_function("c_alpha H=2^16", |b| {
        b.iter(|| c_alpha(&f, &sd, &alpha, black_box(1 << 16)).unwrap())
    });
}

fn bench_clt(c: &mut Criterion) {
    let mut group = c.benchmark_group("clt");
    group.sample_size(10);
    let cfg = SamplerConfig::new(presets::uniform12(), 42, 1 << 12, 256).unwrap();
    let f = TestFunction::cosine(1).unwrap();
    let alpha = IrrationalNumber::golden();
    group.bench_function("N=2^12 M=256", |b| {
        b.iter(|| clt_experiment(&cfg, &f, &alpha, 0.5).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_transition, bench_synthesis, bench_variance, bench_clt);
criterion_main!(benches);
