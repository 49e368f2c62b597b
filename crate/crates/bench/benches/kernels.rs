use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pru_lab_core::harness::{build_state_for_dim, StateFamily};
use pru_lab_core::pru::{pru_unitary, sample_key};
use pru_lab_core::schur_weyl::schur_weyl_basis;
use pru_lab_core::twirls::{haar_twirl_exact, haar_twirl_monte_carlo, pf_twirl, TwirlInput};

fn twirls(c: &mut Criterion) {
    let mut group = c.benchmark_group("twirl");
    for (d, t) in [(4, 2), (4, 3), (8, 2)] {
        let psi = build_state_for_dim(StateFamily::RandomPure, d, t, 2, 1).unwrap();
        let rho = psi.outer_product();
        let id = format!("d{d}_t{t}");
        group.bench_with_input(BenchmarkId::new("haar_exact", &id), &rho, |b, rho| {
            b.iter(|| haar_twirl_exact(black_box(rho), t).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("pf_exact", &id), &rho, |b, rho| {
            b.iter(|| pf_twirl(black_box(rho), t).unwrap())
        });
    }
    let psi = build_state_for_dim(StateFamily::RandomPure, 4, 2, 2, 1).unwrap();
    group.sample_size(10);
    group.bench_function("haar_monte_carlo_d4_t2_1000", |b| {
        b.iter(|| haar_twirl_monte_carlo(TwirlInput::Pure(black_box(&psi)), 2, 1000, 7).unwrap())
    });
    group.finish();
}

fn schur_weyl(c: &mut Criterion) {
    let mut group = c.benchmark_group("schur_weyl_basis");
    group.sample_size(10);
    for (d, t) in [(4, 2), (4, 3), (8, 3)] {
        group.bench_function(format!("d{d}_t{t}"), |b| {
            b.iter(|| schur_weyl_basis(black_box(d), t).unwrap())
        });
    }
    group.finish();
}

fn pru(c: &mut Criterion) {
    let key = sample_key(3);
    let mut group = c.benchmark_group("pru_unitary");
    for n in [1, 2, 4] {
        group.bench_function(format!("n{n}"), |b| {
            b.iter(|| pru_unitary(black_box(&key), n).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, twirls, schur_weyl, pru);
criterion_main!(benches);
