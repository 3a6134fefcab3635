//! Default rayon pool versus a single-thread pool on the data-parallel
//! kernels. Build with `--no-default-features` to time the sequential path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mdc_core::homogeneous::Crystal;
use mdc_core::lifetime::{excited_population, integral_i};
use mdc_core::trapped::{phonon_integral, phonon_modes_trapped, ModeKind, PhononSpectrum, TrappedCrystal};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("default", rayon::ThreadPoolBuilder::new().build().expect("pool")),
        ("single", rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("pool")),
    ]
}

fn zone_average_2d(c: &mut Criterion) {
    let crystal = Crystal::two_d(20.0);
    let mut group = c.benchmark_group("integral_i_2d");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| integral_i(&crystal, 1.0, 32).expect("integral")))
        });
    }
    group.finish();
}

fn population(c: &mut Criterion) {
    let crystal = Crystal::one_d();
    let times: Vec<f64> = (1..=64).map(|i| i as f64).collect();
    let mut group = c.benchmark_group("excited_population");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| excited_population(&crystal, &times, 1.0, 0.0, 25.0, 0.5, 1 << 14).expect("P_e")))
        });
    }
    group.finish();
}

fn trapped_integral(c: &mut Criterion) {
    let crystal = TrappedCrystal::natural(300, 30.0).expect("crystal");
    let phonons = phonon_modes_trapped(&crystal, ModeKind::PhononLong, 0.0).expect("phonons");
    let u = vec![1.0; crystal.n];
    let mut group = c.benchmark_group("phonon_integral");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| phonon_integral(&crystal, &phonons, &u, 1.0, PhononSpectrum::Exact).expect("I")))
        });
    }
    group.finish();
}

criterion_group!(benches, zone_average_2d, population, trapped_integral);
criterion_main!(benches);
