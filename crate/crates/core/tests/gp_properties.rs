use std::sync::atomic::{AtomicBool, Ordering};

use catforge_core::fock::brute_force_three_mode;
use catforge_core::gp::{
    gp_fidelity, gp_optimize, gp_optimize_curve, gp_output_state, gp_state, gp_success_probability, GpFamily,
    GpOptimizeConfig, GpParams,
};
use catforge_core::optimizer::{maximize, OptimizeSpec};
use catforge_core::phasespace::find_wigner_min;
use catforge_core::{CoherentMix, Parity, State};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn params(n: usize) -> impl Strategy<Value = GpParams> {
    (-0.45f64..0.45, -0.45f64..0.45, -0.45f64..0.45, 0.3f64..1.0, 0.0f64..0.5)
        .prop_map(move |(r1, r2, r3, t, beta)| GpParams::new(r1, r2, r3, t, beta, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn analytic_state_matches_oracle(p in prop_oneof![params(1), params(2)]) {
        let oracle = brute_force_three_mode(&p, 36).unwrap();
        let (state, k) = gp_output_state(&p, 120).unwrap();
        prop_assert!(1.0 - state.fidelity(&oracle.state().unwrap()) < 1e-8);
        prop_assert!((gp_success_probability(&p, k).unwrap() - oracle.probability).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn outputs_have_even_parity(
        r1 in -1.5f64..1.5, r2 in -1.5f64..1.5, r3 in -1.5f64..1.5,
        t in 0.05f64..1.0, beta in 0.0f64..1.5, n in 1usize..=3,
    ) {
        let p = GpParams::new(r1, r2, r3, t, beta, n);
        if let Ok((state, _)) = gp_output_state(&p, 100) {
            let zero = C64::new(0.0, 0.0);
            prop_assert!(state.amps().iter().skip(1).step_by(2).all(|c| *c == zero));
        }
    }
}

#[test]
fn probability_is_a_probability_at_every_visited_point() {
    let bad = AtomicBool::new(false);
    for family in [GpFamily::General, GpFamily::Subtraction, GpFamily::Addition] {
        let objective = |x: &[f64]| match gp_fidelity(&family.params(x, 1), 2.5) {
            Ok((f, p)) => {
                if !(p > 0.0 && p <= 1.0) {
                    bad.store(true, Ordering::Relaxed);
                }
                f
            }
            Err(_) => f64::NEG_INFINITY,
        };
        let spec = OptimizeSpec::new(&objective, family.bounds()).restarts(4).seed(3).max_evals(1500);
        let result = maximize(&spec).unwrap();
        assert!(result.evaluations > 100);
    }
    assert!(!bad.load(Ordering::Relaxed));
}

fn gradient(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let h = 1e-4;
    (0..x.len())
        .map(|k| {
            let (mut up, mut down) = (x.to_vec(), x.to_vec());
            up[k] += h;
            down[k] -= h;
            (f(&up) - f(&down)) / (2.0 * h)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn fidelity_and_negativity_climb_together() {
    let family = GpFamily::General;
    for alpha in [2.0, 3.0] {
        let opt = gp_optimize(alpha, 1, family, &GpOptimizeConfig::default(), None).unwrap();
        let cat = State::Coherent(CoherentMix::cat(alpha, Parity::Even).unwrap());
        let y_bar = find_wigner_min(&cat, alpha).unwrap().y;
        let fid = |x: &[f64]| gp_fidelity(&family.params(x, 1), alpha).unwrap().0;
        let neg = |x: &[f64]| -State::Pure(gp_state(&family.params(x, 1), alpha).unwrap().0).wigner(0.0, y_bar);
        let x0 = family.coordinates(&opt.params);

        let (gf, gn) = (gradient(fid, &x0), gradient(neg, &x0));
        let norm = |v: &[f64]| dot(v, v).sqrt();
        assert!(norm(&gf) < 1e-4, "fidelity gradient at the optimum {}", norm(&gf));
        assert!(dot(&gf, &gn) > -1e-4 * norm(&gn));

        for shift in [0.02, -0.05, 0.1] {
            let x: Vec<f64> = x0.iter().enumerate().map(|(i, v)| v + if i % 2 == 0 { shift } else { -shift }).collect();
            let (gf, gn) = (gradient(fid, &x), gradient(neg, &x));
            assert!(dot(&gf, &gn) / (norm(&gf) * norm(&gn)) > 0.9, "alpha={alpha} shift={shift}");
        }
    }
}

#[test]
fn large_target_settings() {
    let opt = gp_optimize(4.0, 1, GpFamily::General, &GpOptimizeConfig::default(), None).unwrap();
    assert!(opt.params.r1.abs().tanh() > 0.9, "{opt:?}");
    assert!(opt.params.t > 0.9, "{opt:?}");
}

#[test]
fn higher_order_is_at_least_as_good() {
    let cfg = GpOptimizeConfig::default();
    let two = gp_optimize(3.0, 1, GpFamily::General, &cfg, None).unwrap();
    let four = gp_optimize(3.0, 2, GpFamily::General, &cfg, None).unwrap();
    assert!(four.fidelity >= two.fidelity, "{} < {}", four.fidelity, two.fidelity);
}

#[test]
fn warm_continuation_never_loses_to_cold_start() {
    let cfg = GpOptimizeConfig::default();
    let alphas = [1.0, 1.5, 2.0, 2.5, 3.0];
    for family in [GpFamily::Subtraction, GpFamily::General] {
        let warm = gp_optimize_curve(&alphas, 1, family, &cfg).unwrap();
        for (w, &alpha) in warm.iter().zip(&alphas) {
            let cold = gp_optimize(alpha, 1, family, &cfg, None).unwrap();
            assert!(
                w.fidelity >= cold.fidelity - 1e-6,
                "{family:?} alpha={alpha}: {} vs {}",
                w.fidelity,
                cold.fidelity
            );
        }
    }
}

#[test]
fn second_order_homodyne_has_three_peaks() {
    let opt = gp_optimize(3.0, 1, GpFamily::General, &GpOptimizeConfig::default(), None).unwrap();
    let (state, _) = gp_state(&opt.params, 3.0).unwrap();
    let profile = State::Pure(state).homodyne();
    let ys: Vec<f64> = (0..=800).map(|i| -4.0 + 8.0 * i as f64 / 800.0).collect();
    let p: Vec<f64> = ys.iter().map(|&y| profile.pdf(y)).collect();
    let floor = 1e-8 * p.iter().copied().fold(0.0, f64::max);
    let peaks = (1..p.len() - 1).filter(|&i| p[i] > floor && p[i] > p[i - 1] && p[i] > p[i + 1]).count();
    assert_eq!(peaks, 3);
    for &y in &ys {
        assert!((profile.pdf(y) - profile.pdf(-y)).abs() < 1e-10);
    }
}

#[test]
fn output_has_stellar_rank_at_most_two_n() {
    let dim = 160;
    let mut k = nalgebra::DMatrix::<f64>::zeros(dim, dim);
    for m in 0..dim - 2 {
        let v = (((m + 1) * (m + 2)) as f64).sqrt() / 2.0;
        k[(m + 2, m)] = v;
        k[(m, m + 2)] = -v;
    }
    for p in [
        GpParams::new(0.4, -0.3, 0.2, 0.7, 0.35, 1),
        GpParams::new(0.6, 0.1, -0.4, 0.5, 0.2, 2),
        GpParams::new(0.3, 0.25, 0.1, 0.8, 0.3, 3),
    ] {
        let chi = p.derived().unwrap().chi;
        let state = gp_output_state(&p, dim).unwrap().0.resized(dim);
        let unsqueeze = (&k * -chi).exp();
        let re = nalgebra::DVector::from_iterator(dim, state.amps().iter().map(|c| c.re));
        let im = nalgebra::DVector::from_iterator(dim, state.amps().iter().map(|c| c.im));
        let (re, im) = (&unsqueeze * re, &unsqueeze * im);
        let outside: f64 = (2 * p.n + 1..dim - 20).map(|j| re[j] * re[j] + im[j] * im[j]).sum();
        assert!(outside < 1e-12, "{p:?}: {outside:e}");
    }
}
