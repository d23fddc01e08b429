//! Bounded derivative-free maximization.
//!
//! Nelder-Mead runs in the unit cube (each coordinate rescaled to its bounds),
//! with points outside the cube reflected back in. Restarts begin at an
//! optional warm-start point followed by a shifted Halton sequence, run in
//! parallel, and are combined in restart order so results are reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Objective handle shared across restart threads.
pub type Objective<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Simplex diameter in unit-cube coordinates.
    pub x: f64,
    /// Spread of objective values across the simplex.
    pub f: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { x: 1e-10, f: 1e-14 }
    }
}

#[derive(Clone)]
pub struct OptimizeSpec<'a> {
    pub objective: Objective<'a>,
    pub bounds: Vec<(f64, f64)>,
    pub restarts: usize,
    pub seed: u64,
    pub tol: Tolerance,
    /// Evaluation budget per restart.
    pub max_evals: usize,
    /// Extra starting point, run before the sampled ones.
    pub warm_start: Option<Vec<f64>>,
    /// Initial simplex edge in unit-cube coordinates.
    pub initial_step: f64,
}

impl<'a> OptimizeSpec<'a> {
    pub fn new(objective: Objective<'a>, bounds: Vec<(f64, f64)>) -> Self {
        Self {
            objective,
            bounds,
            restarts: 8,
            seed: 0,
            tol: Tolerance::default(),
            max_evals: 20_000,
            warm_start: None,
            initial_step: 0.1,
        }
    }

    pub fn restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn tol(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    pub fn warm_start(mut self, x: Option<Vec<f64>>) -> Self {
        self.warm_start = x;
        self
    }

    pub fn initial_step(mut self, step: f64) -> Self {
        self.initial_step = step;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.bounds.is_empty() {
            return Err(Error::Optimizer("no coordinates to optimize".into()));
        }
        if let Some((i, _)) = self.bounds.iter().enumerate().find(|(_, (lo, hi))| !(lo < hi)) {
            return Err(Error::Optimizer(format!("empty bound interval for coordinate {i}")));
        }
        if self.restarts == 0 && self.warm_start.is_none() {
            return Err(Error::Optimizer("no starting points: zero restarts and no warm start".into()));
        }
        if !(self.tol.x > 0.0 && self.tol.f > 0.0 && self.initial_step > 0.0) {
            return Err(Error::Optimizer("tolerances and step must be positive".into()));
        }
        if let Some(w) = &self.warm_start {
            if w.len() != self.bounds.len() {
                return Err(Error::Optimizer("warm start has the wrong dimension".into()));
            }
        }
        Ok(())
    }

    fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.bounds).map(|(v, (lo, hi))| ((v - lo) / (hi - lo)).clamp(0.0, 1.0)).collect()
    }

    fn unit_to_box(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.bounds).map(|(v, (lo, hi))| lo + v * (hi - lo)).collect()
    }

    fn starting_points(&self) -> Vec<Vec<f64>> {
        let d = self.bounds.len();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let shift: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let mut points = Vec::with_capacity(self.restarts + 1);
        if let Some(w) = &self.warm_start {
            points.push(self.to_unit(w));
        }
        let total = self.restarts + points.len();
        let mut index = 1u64;
        while points.len() < total {
            let p = (0..d).map(|k| (halton(index, PRIMES[k % PRIMES.len()]) + shift[k]).fract()).collect();
            points.push(p);
            index += 1;
        }
        points
    }
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Best point of one restart plus its evaluation history.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartResult {
    pub argmax: Vec<f64>,
    pub value: f64,
    pub trace: Vec<f64>,
    /// Best point satisfying the tracked constraint, if one was seen.
    feasible: Option<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub argmax: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Objective values in evaluation order, restarts concatenated in order.
    pub trace: Vec<f64>,
    /// Running best value after each restart.
    pub envelope: Vec<f64>,
}

fn reflect(u: f64) -> f64 {
    let mut v = u.rem_euclid(2.0);
    if v > 1.0 {
        v = 2.0 - v;
    }
    v
}

struct Runner<'s, 'a> {
    spec: &'s OptimizeSpec<'a>,
    constraint: Option<Objective<'s>>,
    trace: Vec<f64>,
    feasible: Option<(Vec<f64>, f64)>,
}

impl Runner<'_, '_> {
    fn eval(&mut self, u: &[f64]) -> f64 {
        let x = self.spec.unit_to_box(u);
        let v = (self.spec.objective)(&x);
        let v = if v.is_finite() { v } else { f64::NEG_INFINITY };
        self.trace.push(v);
        if let Some(g) = self.constraint {
            if g(&x) >= 0.0 && self.feasible.as_ref().is_none_or(|(_, best)| v > *best) {
                self.feasible = Some((x, v));
            }
        }
        v
    }

    fn budget_left(&self) -> bool {
        self.trace.len() < self.spec.max_evals
    }

    /// Simplex search from `start`; returns best unit point and value.
    fn nelder_mead(&mut self, start: &[f64]) -> (Vec<f64>, f64) {
        let d = start.len();
        let step = self.spec.initial_step;
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
        let v0 = self.eval(start);
        simplex.push((start.to_vec(), v0));
        for k in 0..d {
            let mut p = start.to_vec();
            p[k] = if p[k] + step <= 1.0 { p[k] + step } else { p[k] - step };
            let v = self.eval(&p);
            simplex.push((p, v));
        }
        // maximize: keep simplex sorted by descending value
        let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| b.1.total_cmp(&a.1));
        order(&mut simplex);
        while self.budget_left() {
            let best = simplex[0].1;
            let worst = simplex[d].1;
            let diameter = simplex[1..]
                .iter()
                .map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            let spread = if best.is_finite() && worst.is_finite() { best - worst } else { f64::INFINITY };
            if diameter < self.spec.tol.x && spread <= self.spec.tol.f.max(self.spec.tol.f * best.abs()) {
                break;
            }
            if diameter < 1e-15 {
                break;
            }
            let mut centroid = vec![0.0; d];
            for (p, _) in &simplex[..d] {
                centroid.iter_mut().zip(p).for_each(|(c, v)| *c += v / d as f64);
            }
            let along = |t: f64, worst: &[f64]| -> Vec<f64> {
                centroid.iter().zip(worst).map(|(c, w)| reflect(c + t * (c - w))).collect()
            };
            let worst_point = simplex[d].0.clone();
            let xr = along(1.0, &worst_point);
            let fr = self.eval(&xr);
            if fr > simplex[0].1 {
                let xe = along(2.0, &worst_point);
                let fe = self.eval(&xe);
                simplex[d] = if fe > fr { (xe, fe) } else { (xr, fr) };
            } else if fr > simplex[d - 1].1 {
                simplex[d] = (xr, fr);
            } else {
                let (xc, fc) = if fr > simplex[d].1 {
                    let xc = along(0.5, &worst_point);
                    let fc = self.eval(&xc);
                    (xc, fc)
                } else {
                    let xc = along(-0.5, &worst_point);
                    let fc = self.eval(&xc);
                    (xc, fc)
                };
                if fc > simplex[d].1.max(fr) || (fc >= simplex[d].1 && fc.is_finite()) {
                    simplex[d] = (xc, fc);
                } else {
                    let head = simplex[0].0.clone();
                    for item in simplex.iter_mut().skip(1) {
                        let p: Vec<f64> = head.iter().zip(&item.0).map(|(h, v)| h + 0.5 * (v - h)).collect();
                        let v = self.eval(&p);
                        *item = (p, v);
                    }
                }
            }
            order(&mut simplex);
        }
        simplex.swap_remove(0)
    }

    /// Nelder-Mead, re-seeded at its own optimum until it stops improving.
    fn run(mut self, start: &[f64]) -> RestartResult {
        let (mut best_u, mut best) = self.nelder_mead(start);
        for _ in 0..4 {
            if !self.budget_left() {
                break;
            }
            let (u, v) = self.nelder_mead(&best_u);
            let improved = v > best + self.spec.tol.f.max(1e-15 * best.abs());
            if v >= best {
                best_u = u;
                best = v;
            }
            if !improved {
                break;
            }
        }
        RestartResult {
            argmax: self.spec.unit_to_box(&best_u),
            value: best,
            trace: self.trace,
            feasible: self.feasible,
        }
    }
}

fn run_restarts(spec: &OptimizeSpec, constraint: Option<Objective>) -> Result<Vec<RestartResult>> {
    spec.validate()?;
    let starts = spec.starting_points();
    Ok(starts.par_iter().map(|s| Runner { spec, constraint, trace: Vec::new(), feasible: None }.run(s)).collect())
}

fn combine(runs: Vec<RestartResult>) -> Result<OptimizeResult> {
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut trace = Vec::new();
    let mut envelope = Vec::with_capacity(runs.len());
    for r in runs {
        trace.extend_from_slice(&r.trace);
        if r.value.is_finite() && best.as_ref().is_none_or(|(_, v)| r.value > *v) {
            best = Some((r.argmax, r.value));
        }
        envelope.push(best.as_ref().map_or(f64::NEG_INFINITY, |b| b.1));
    }
    let (argmax, value) = best.ok_or_else(|| Error::Optimizer("objective non-finite at every visited point".into()))?;
    Ok(OptimizeResult { argmax, value, evaluations: trace.len(), trace, envelope })
}

/// Maximizes `spec.objective` over the box `spec.bounds`.
pub fn maximize(spec: &OptimizeSpec) -> Result<OptimizeResult> {
    combine(run_restarts(spec, None)?)
}

/// Maximizes `spec.objective` subject to `constraint(x) >= 0`.
///
/// Exterior quadratic penalty, weight ×10 over 5 stages. If the final point
/// still violates the constraint it is pulled back by bisection along the
/// segment towards the best feasible point seen during the search.
pub fn maximize_constrained(spec: &OptimizeSpec, constraint: Objective) -> Result<OptimizeResult> {
    const STAGES: usize = 5;
    const INITIAL_WEIGHT: f64 = 1e4;
    const FEASIBILITY_TOL: f64 = 1e-8;

    let mut weight = INITIAL_WEIGHT;
    let mut current = spec.warm_start.clone();
    let mut trace = Vec::new();
    let mut envelope = Vec::new();
    let mut feasible: Option<(Vec<f64>, f64)> = None;
    let mut last: Option<Vec<f64>> = None;
    for stage in 0..STAGES {
        let penalized = |x: &[f64]| {
            let g = constraint(x);
            (spec.objective)(x) - weight * g.min(0.0).powi(2)
        };
        let mut staged = spec.clone();
        staged.objective = &penalized;
        staged.warm_start = current.clone();
        if stage > 0 {
            staged.restarts = 0;
            staged.initial_step = spec.initial_step * 0.1;
        }
        let runs = run_restarts(&staged, Some(constraint))?;
        for r in &runs {
            if let Some((x, _)) = &r.feasible {
                let v = (spec.objective)(x);
                if feasible.as_ref().is_none_or(|(_, best)| v > *best) {
                    feasible = Some((x.clone(), v));
                }
            }
        }
        let result = combine(runs)?;
        trace.extend_from_slice(&result.trace);
        envelope.extend_from_slice(&result.envelope);
        current = Some(result.argmax.clone());
        last = Some(result.argmax);
        weight *= 10.0;
    }
    let mut x = last.expect("at least one stage ran");
    if constraint(&x) < -FEASIBILITY_TOL {
        let (xf, _) = feasible.clone().ok_or_else(|| Error::Infeasible(constraint(&x)))?;
        // largest t with g(xf + t (x - xf)) >= 0
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let point = |t: f64| -> Vec<f64> { xf.iter().zip(&x).map(|(a, b)| a + t * (b - a)).collect() };
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if constraint(&point(mid)) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        x = point(lo);
    }
    let g = constraint(&x);
    if g < -FEASIBILITY_TOL {
        return Err(Error::Infeasible(g));
    }
    let mut value = (spec.objective)(&x);
    if let Some((xf, vf)) = feasible {
        if vf > value {
            x = xf;
            value = vf;
        }
    }
    Ok(OptimizeResult { argmax: x, value, evaluations: trace.len(), trace, envelope })
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    [(a, fa), (b, fb), (x, fx)].into_iter().fold((x, fx), |best, c| if c.1 > best.1 { c } else { best })
}

/// Maximizes `f` on `[lo, hi]` by a uniform scan of `grid` points followed by
/// golden-section refinement around the best cell.
pub fn scan_then_refine(f: impl Fn(f64) -> f64, lo: f64, hi: f64, grid: usize, tol: f64) -> (f64, f64) {
    let grid = grid.max(2);
    let h = (hi - lo) / (grid - 1) as f64;
    let (mut best_i, mut best_v) = (0, f64::NEG_INFINITY);
    for i in 0..grid {
        let v = f(lo + h * i as f64);
        if v > best_v {
            best_i = i;
            best_v = v;
        }
    }
    let a = (lo + h * best_i as f64 - h).max(lo);
    let b = (lo + h * best_i as f64 + h).min(hi);
    let (x, v) = golden_section_max(&f, a, b, tol);
    if v >= best_v {
        (x, v)
    } else {
        (lo + h * best_i as f64, best_v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn one_dimensional_parabola() {
        let f = |x: &[f64]| -(x[0] - 0.3).powi(2);
        let r = maximize(&OptimizeSpec::new(&f, vec![(0.0, 1.0)])).unwrap();
        assert_abs_diff_eq!(r.argmax[0], 0.3, epsilon = 1e-8);
        assert_eq!(r.evaluations, r.trace.len());
    }

    #[test]
    fn rosenbrock_in_box() {
        let f = |x: &[f64]| -((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let r = maximize(&OptimizeSpec::new(&f, vec![(-2.0, 2.0), (-1.0, 3.0)])).unwrap();
        assert_abs_diff_eq!(r.argmax[0], 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(r.argmax[1], 1.0, epsilon = 1e-5);
    }

    #[test]
    fn maximum_on_the_boundary() {
        let f = |x: &[f64]| x[0] + x[1];
        let r = maximize(&OptimizeSpec::new(&f, vec![(0.0, 1.0), (0.0, 2.0)])).unwrap();
        assert_abs_diff_eq!(r.value, 3.0, epsilon = 1e-8);
    }

    #[test]
    fn non_finite_regions_are_avoided() {
        let f = |x: &[f64]| if x[0] < 0.5 { f64::NAN } else { -(x[0] - 0.7).powi(2) };
        let r = maximize(&OptimizeSpec::new(&f, vec![(0.0, 1.0)])).unwrap();
        assert_abs_diff_eq!(r.argmax[0], 0.7, epsilon = 1e-7);
    }

    #[test]
    fn all_non_finite_is_an_error() {
        let f = |_: &[f64]| f64::NAN;
        assert!(maximize(&OptimizeSpec::new(&f, vec![(0.0, 1.0)])).is_err());
    }

    #[test]
    fn invalid_specs_rejected() {
        let f = |x: &[f64]| x[0];
        assert!(maximize(&OptimizeSpec::new(&f, vec![(1.0, 0.0)])).is_err());
        assert!(maximize(&OptimizeSpec::new(&f, vec![(0.0, 1.0)]).restarts(0)).is_err());
        assert!(maximize(&OptimizeSpec::new(&f, vec![])).is_err());
    }

    #[test]
    fn deterministic_trace() {
        let f = |x: &[f64]| (3.0 * x[0]).sin() * (2.0 * x[1]).cos() - 0.1 * x[0] * x[0];
        let spec = OptimizeSpec::new(&f, vec![(-3.0, 3.0), (-3.0, 3.0)]).seed(42);
        let a = maximize(&spec).unwrap();
        let b = maximize(&spec).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.argmax, b.argmax);
        assert!(a.envelope.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn constrained_inactive_matches_unconstrained() {
        let f = |x: &[f64]| -(x[0] - 0.3).powi(2);
        let g = |_: &[f64]| 1.0;
        let spec = OptimizeSpec::new(&f, vec![(0.0, 1.0)]);
        let c = maximize_constrained(&spec, &g).unwrap();
        let u = maximize(&spec).unwrap();
        assert_abs_diff_eq!(c.argmax[0], u.argmax[0], epsilon = 1e-8);
    }

    #[test]
    fn constrained_active_lands_on_boundary() {
        let f = |x: &[f64]| x[0] + x[1];
        let g = |x: &[f64]| 1.0 - x[0] * x[0] - x[1] * x[1];
        let spec = OptimizeSpec::new(&f, vec![(-2.0, 2.0), (-2.0, 2.0)]);
        let r = maximize_constrained(&spec, &g).unwrap();
        assert!(g(&r.argmax) >= -1e-8);
        assert_abs_diff_eq!(r.value, 2f64.sqrt(), epsilon = 1e-4);
    }

    #[test]
    fn golden_section_finds_peak() {
        let (x, _) = golden_section_max(|x| -(x - 1.234).powi(2), 0.0, 3.0, 1e-12);
        assert_abs_diff_eq!(x, 1.234, epsilon = 1e-8);
        let (x, _) = scan_then_refine(|x: f64| (x * 5.0).sin(), 0.0, 3.0, 50, 1e-12);
        assert_abs_diff_eq!((x * 5.0).sin(), 1.0, epsilon = 1e-12);
    }
}
