//! Sequential against data-parallel execution of the hot kernels.
//!
//! With the `parallel` feature each kernel runs twice: inside a one-thread
//! pool, which takes the sequential path, and on the default pool. Built with
//! `--no-default-features` only the sequential variant exists.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zk_core::domain::{build_domain, DomainSpec, Mode, SpectralField, TransverseBc};
use zk_core::operators::{nonlinear_term, SolverParams};
use zk_core::timestepper::{SimState, Stepper};
use zk_core::{forward_transform, inverse_transform};

fn sample(nx: usize, nt: usize) -> SpectralField {
    let b = build_domain(DomainSpec::new_2d(nx, nt, TransverseBc::Dirichlet)).unwrap();
    SpectralField::from_real_modes(
        &b,
        &[
            (Mode::new(1, 1), 0.5),
            (Mode::new(-2, 3), 0.3),
            (Mode::new(3, 2), 0.2),
            (Mode::new(0, 4), 0.1),
        ],
    )
    .unwrap()
}

/// `(label, pool)` pairs; `None` means the ambient pool.
#[cfg(feature = "parallel")]
fn pools() -> Vec<(String, Option<rayon::ThreadPool>)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    vec![
        ("sequential".to_string(), Some(one)),
        (format!("parallel-{}", rayon::current_num_threads()), None),
    ]
}

#[cfg(not(feature = "parallel"))]
fn pools() -> Vec<(String, Option<()>)> {
    vec![("sequential".to_string(), None)]
}

#[cfg(feature = "parallel")]
fn within<R: Send>(pool: &Option<rayon::ThreadPool>, f: impl FnOnce() -> R + Send) -> R {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn within<R>(_: &Option<()>, f: impl FnOnce() -> R) -> R {
    f()
}

fn kernels(c: &mut Criterion) {
    for (nx, nt) in [(64, 32), (128, 64)] {
        let u = sample(nx, nt);
        let params = SolverParams::new(1e-3, 1.0, 1e-3, 1.0);
        let stepper = Stepper::new(u.basis(), &params).unwrap();
        let state = SimState::initial(u.clone());
        let size = format!("{nx}x{nt}");
        for (label, pool) in pools() {
            let mut g = c.benchmark_group(label.as_str());
            g.bench_function(BenchmarkId::new("transform-round-trip", &size), |b| {
                b.iter(|| within(&pool, || forward_transform(&inverse_transform(black_box(&u)))))
            });
            g.bench_function(BenchmarkId::new("nonlinear-term", &size), |b| {
                b.iter(|| within(&pool, || nonlinear_term(black_box(&u), true).unwrap()))
            });
            g.bench_function(BenchmarkId::new("step", &size), |b| {
                b.iter(|| within(&pool, || stepper.step(black_box(&state)).unwrap()))
            });
            g.finish();
        }
    }
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = kernels
}
criterion_main!(benches);
