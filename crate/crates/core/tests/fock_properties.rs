use catforge_core::fock::{cat_fock, coherent_fock, loss_fock, squeezed_vacuum_fock, Parity, ThreeModeState};
use catforge_core::FockVector;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn state_strategy() -> impl Strategy<Value = FockVector> {
    (1usize..16)
        .prop_flat_map(|d| prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d))
        .prop_filter_map("zero vector", |v| {
            FockVector::new(v.into_iter().map(|(re, im)| C64::new(re, im)).collect()).normalized().ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn loss_keeps_trace_and_positivity(psi in state_strategy()) {
        for tau in [0.0, 0.3, 0.7, 1.0] {
            let rho = loss_fock(&psi, tau).unwrap();
            prop_assert!((rho.trace() - 1.0).norm() < 1e-12);
            prop_assert!(rho.hermiticity_error() < 1e-12);
            prop_assert!(rho.min_eigenvalue() > -1e-12);
        }
    }

    #[test]
    fn matrix_loss_matches_pure_loss(psi in state_strategy(), tau in 0.0f64..1.0) {
        let direct = loss_fock(&psi, tau).unwrap();
        let via_matrix = psi.projector().loss(tau).unwrap();
        prop_assert!(direct.max_abs_diff(&via_matrix) < 1e-12);
    }
}

#[test]
fn loss_composes_on_coherent_states() {
    for (beta, t1, t2) in
        [(C64::new(1.5, 0.3), 0.8, 0.6), (C64::new(-0.7, 1.1), 0.95, 0.4), (C64::new(2.0, 0.0), 0.5, 0.5)]
    {
        let psi = coherent_fock(beta, 50).unwrap();
        let twice = loss_fock(&psi, t1).unwrap().loss(t2).unwrap();
        let once = loss_fock(&psi, t1 * t2).unwrap();
        assert!(twice.max_abs_diff(&once) < 1e-8);
        let shrunk = coherent_fock(beta * (t1 * t2).sqrt(), 50).unwrap().projector();
        assert!(once.max_abs_diff(&shrunk) < 1e-8);
    }
}

#[test]
fn even_states_have_no_odd_amplitudes() {
    let zero = C64::new(0.0, 0.0);
    for a in [0.3, 1.0, 2.5, 4.0] {
        let cat = cat_fock(a, Parity::Even, 80).unwrap();
        assert!(cat.amps().iter().skip(1).step_by(2).all(|c| *c == zero));
    }
    for r in [-0.8, 0.2, 1.0] {
        let sq = squeezed_vacuum_fock(r, 80).unwrap();
        assert!(sq.amps().iter().skip(1).step_by(2).all(|c| *c == zero));
    }
    let odd = cat_fock(2.0, Parity::Odd, 60).unwrap();
    assert!(odd.amps().iter().step_by(2).all(|c| *c == zero));
}

/// `sum_k (s/2)^k (op)^k / k!` applied to `v` until the terms vanish.
fn exp_series(v: &[C64], s: f64, op: impl Fn(&[C64]) -> Vec<C64>) -> Vec<C64> {
    let mut out = v.to_vec();
    let mut term = v.to_vec();
    for k in 1..200 {
        term = op(&term).into_iter().map(|c| c * (s / 2.0 / k as f64)).collect();
        let size: f64 = term.iter().map(|c| c.norm_sqr()).sum();
        out.iter_mut().zip(&term).for_each(|(o, t)| *o += t);
        if size < 1e-40 {
            break;
        }
    }
    out
}

fn raise_twice(v: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for n in 0..v.len().saturating_sub(2) {
        out[n + 2] = v[n] * (((n + 1) * (n + 2)) as f64).sqrt();
    }
    out
}

fn lower_twice(v: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for n in 2..v.len() {
        out[n - 2] = v[n] * ((n * (n - 1)) as f64).sqrt();
    }
    out
}

#[test]
fn factored_squeeze_matches_direct_construction() {
    let dim = 120;
    for r in [0.2f64, 0.5, 1.0] {
        let (lambda, mu) = (r.tanh(), r.cosh());
        let vac = FockVector::vacuum(dim).into_amps();
        let right = exp_series(&vac, -lambda, lower_twice);
        let middle: Vec<C64> = right.iter().enumerate().map(|(n, c)| c * mu.powf(-(n as f64) - 0.5)).collect();
        let left = exp_series(&middle, lambda, raise_twice);
        let direct = squeezed_vacuum_fock(r, dim).unwrap();
        let diff = left.iter().zip(direct.amps()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-9, "r={r}: {diff:e}");
    }
}

#[test]
fn three_mode_operations_preserve_norm() {
    let a = squeezed_vacuum_fock(0.4, 26).unwrap();
    let b = coherent_fock(C64::new(0.5, -0.2), 26).unwrap();
    let c = squeezed_vacuum_fock(-0.3, 26).unwrap();
    let mut st = ThreeModeState::product(&a, &b, &c);
    let start = st.norm_sqr();
    st.apply_beam_splitter(0, 1, 0.7);
    assert!((st.norm_sqr() - start).abs() < 1e-8);
    st.apply_beam_splitter(2, 1, std::f64::consts::FRAC_PI_4);
    assert!((st.norm_sqr() - start).abs() < 1e-8);
    st.apply_displacement(2, C64::new(0.0, 0.3));
    assert!((st.norm_sqr() - start).abs() < 1e-8);
}
