use std::hint::black_box;

use catforge_core::dispersive::{ideal_mixture, optimize_gamma};
use catforge_core::fock::{cat_fock, loss_fock};
use catforge_core::gp::{gp_fidelity, gp_state, GpParams};
use catforge_core::metrology::{homodyne_fisher, qfi_displacement};
use catforge_core::{CoherentMix, Parity, State};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn gp(c: &mut Criterion) {
    let mut group = c.benchmark_group("gp_state");
    for n in 1..=3 {
        let p = GpParams::new(1.2, -0.4, 0.3, 0.8, 0.4, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| b.iter(|| gp_state(black_box(p), 4.0)));
    }
    group.finish();
    let p = GpParams::new(1.2, -0.4, 0.3, 0.8, 0.4, 1);
    c.bench_function("gp_fidelity", |b| b.iter(|| gp_fidelity(black_box(&p), 4.0)));
}

fn phase_space(c: &mut Criterion) {
    let alpha = 4.0;
    let mix = ideal_mixture(alpha, optimize_gamma(alpha).unwrap().gamma).unwrap();
    let coherent = State::Coherent(mix);
    let fock = State::Pure(cat_fock(alpha, Parity::Even, 60).unwrap());
    c.bench_function("wigner_mix", |b| b.iter(|| coherent.wigner(black_box(0.1), black_box(0.2))));
    c.bench_function("wigner_fock", |b| b.iter(|| fock.wigner(black_box(0.1), black_box(0.2))));
    c.bench_function("homodyne_fisher", |b| b.iter(|| homodyne_fisher(&coherent.homodyne())));
}

fn channels(c: &mut Criterion) {
    let psi = cat_fock(3.0, Parity::Even, 50).unwrap();
    c.bench_function("loss_fock", |b| b.iter(|| loss_fock(black_box(&psi), 0.9)));
    let rho = CoherentMix::cat(3.0, Parity::Even).unwrap().to_fock(50).unwrap();
    c.bench_function("qfi_displacement", |b| b.iter(|| qfi_displacement(black_box(&rho))));
}

criterion_group!(benches, gp, phase_space, channels);
criterion_main!(benches);
