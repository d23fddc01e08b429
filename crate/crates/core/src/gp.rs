//! Heralded Gaussian cat breeding: three squeezed inputs, two beam splitters,
//! two displacements and a two-detector photon-number herald.
//!
//! The heralded signal is `sum_k C_2k (a - lambda2 a^dag)^(2k) |chi>` with
//! `|chi>` a squeezed vacuum, so the whole circuit reduces to one squeezed
//! state and a short operator polynomial.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{squeezed_vacuum_fock, truncation_for, FockVector, Parity};
use crate::optimizer::{maximize, OptimizeSpec};

/// Circuit parameters `(r1, r2, r3, T, beta)` and herald order `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpParams {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub t: f64,
    pub beta: f64,
    pub n: usize,
}

impl GpParams {
    pub fn new(r1: f64, r2: f64, r3: f64, t: f64, beta: f64, n: usize) -> Self {
        Self { r1, r2, r3, t, beta, n }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.n) {
            return Err(Error::UnsupportedOrder(self.n));
        }
        if !(self.t > 0.0 && self.t <= 1.0) {
            return Err(Error::OutOfRange(format!("transmissivity {} outside (0, 1]", self.t)));
        }
        let finite = [self.r1, self.r2, self.r3, self.beta].iter().all(|v| v.is_finite());
        if !finite || self.beta < 0.0 {
            return Err(Error::OutOfRange("squeezings must be finite and beta >= 0".into()));
        }
        Ok(())
    }

    pub fn derived(&self) -> Result<GpDerived> {
        self.validate()?;
        GpDerived::new(self)
    }
}

/// Photon-subtraction subset `(r1, 0, 0, T, 0)`.
pub fn ps_params(r1: f64, t: f64, n: usize) -> GpParams {
    GpParams::new(r1, 0.0, 0.0, t, 0.0, n)
}

/// Photon-addition subset `(r1, -r1, 0, 1/2, beta)`.
pub fn pa_params(r1: f64, beta: f64, n: usize) -> GpParams {
    GpParams::new(r1, -r1, 0.0, 0.5, beta, n)
}

/// Rescales the two-detector rate of the subtraction subset to a single detector,
/// `2^(2n) (n!)^2 / (2n)!`.
pub fn ps_success_rescale(p_raw: f64, n: usize) -> f64 {
    let nf: f64 = (1..=n).map(|k| k as f64).product();
    let n2f: f64 = (1..=2 * n).map(|k| k as f64).product();
    p_raw * 4f64.powi(n as i32) * nf * nf / n2f
}

/// Quantities derived from [`GpParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpDerived {
    pub lambda: [f64; 3],
    pub mu: [f64; 3],
    pub xi: f64,
    pub chi: f64,
    pub beta_tilde: f64,
}

impl GpDerived {
    fn new(p: &GpParams) -> Result<Self> {
        let r = [p.r1, p.r2, p.r3];
        let lambda = r.map(f64::tanh);
        let mu = r.map(f64::cosh);
        let xi = p.t * lambda[0] + (1.0 - p.t) * lambda[1];
        if !(xi.abs() < 1.0) {
            return Err(Error::CoreUndefined(xi.abs()));
        }
        Ok(Self { lambda, mu, xi, chi: xi.atanh(), beta_tilde: p.beta * (1.0 + lambda[2]) })
    }
}

/// `[C_0, C_2, ..., C_2n]` for the heralded polynomial.
pub fn gp_coefficients(d: &GpDerived, t: f64, n: usize) -> Result<Vec<f64>> {
    let [_, l2, l3] = d.lambda;
    let b = d.beta_tilde * d.beta_tilde;
    let s = (1.0 - t) / t;
    match n {
        1 => Ok(vec![l2 - l3 + 2.0 * b, s]),
        2 => Ok(vec![
            3.0 * l2 * l2 - 2.0 * l2 * (l3 - 2.0 * b) + 3.0 * l3 * l3 - 12.0 * l3 * b + 4.0 * b * b,
            s * (6.0 * l2 - 2.0 * l3 + 4.0 * b),
            s * s,
        ]),
        3 => {
            let h2 = 3.0 * l3 * l3 - 12.0 * l3 * b + 4.0 * b * b;
            Ok(vec![
                15.0 * l2.powi(3) - 15.0 * l3.powi(3) + 90.0 * l3 * l3 * b - 60.0 * l3 * b * b + 8.0 * b.powi(3)
                    - 9.0 * l2 * l2 * (l3 - 2.0 * b)
                    + 3.0 * l2 * h2,
                3.0 * s * (15.0 * l2 * l2 + h2 - 6.0 * l2 * (l3 - 2.0 * b)),
                3.0 * s * s * (5.0 * l2 - l3 + 2.0 * b),
                s.powi(3),
            ])
        }
        _ => Err(Error::UnsupportedOrder(n)),
    }
}

/// Number-basis size that resolves the squeezed core to ~1e-16 and the target cat.
pub fn gp_dim(d: &GpDerived, n: usize, alpha: f64) -> usize {
    const MAX_DIM: usize = 40_000;
    let l2 = d.xi * d.xi;
    let core = if l2 < 1e-300 {
        2
    } else {
        // |c_2m|^2 <= lambda^(2m); geometric tail lambda^(2m)/(1-lambda^2)
        let m = ((1e-16 * (1.0 - l2)).ln() / l2.ln()).ceil().max(1.0);
        (2.0 * m).min(MAX_DIM as f64) as usize + 2
    };
    let dim = (core + 2 * n + 4).max(truncation_for(alpha));
    dim + dim % 2
}

/// Normalized heralded state and its squared norm `K_2n`.
pub fn gp_output_state(p: &GpParams, dim: usize) -> Result<(FockVector, f64)> {
    let d = p.derived()?;
    let coeffs: Vec<C64> = gp_coefficients(&d, p.t, p.n)?.into_iter().map(|c| C64::new(c, 0.0)).collect();
    let core = squeezed_vacuum_fock(d.chi, dim)?;
    let (out, k) = crate::fock::apply_polynomial(&core, &coeffs, d.lambda[1])?;
    if !(k >= 1e-14) {
        return Err(Error::HeraldImpossible { norm: k });
    }
    Ok((out.normalized()?, k))
}

/// Probability of the `(n, n)` herald.
pub fn gp_success_probability(p: &GpParams, k: f64) -> Result<f64> {
    let d = p.derived()?;
    let nf: f64 = (1..=p.n).map(|j| j as f64).product();
    let pref = (-2.0 * (1.0 + d.lambda[2]) * p.beta * p.beta).exp()
        / ((2f64.powi(p.n as i32) * nf).powi(2) * d.mu[0] * d.mu[1] * d.mu[2]);
    Ok(pref * k / (1.0 - d.xi * d.xi).sqrt())
}

/// Heralded state at an automatically chosen truncation, with its herald probability.
pub fn gp_state(p: &GpParams, alpha: f64) -> Result<(FockVector, f64)> {
    let d = p.derived()?;
    let (state, k) = gp_output_state(p, gp_dim(&d, p.n, alpha))?;
    Ok((state, gp_success_probability(p, k)?))
}

/// `<cat_+(alpha)|psi>` with cat amplitudes generated on the fly.
pub fn even_cat_overlap(alpha: f64, psi: &FockVector) -> C64 {
    let norm = crate::coherent::cat_norm(alpha, Parity::Even);
    let mut c = (-alpha * alpha / 2.0).exp();
    let mut acc = C64::new(0.0, 0.0);
    for (n, a) in psi.amps().iter().enumerate() {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
            if c == 0.0 {
                break;
            }
        }
        if n % 2 == 0 {
            acc += a * (2.0 * c / norm);
        }
    }
    acc
}

/// Fidelity with the even cat and herald probability.
pub fn gp_fidelity(p: &GpParams, alpha: f64) -> Result<(f64, f64)> {
    let (state, prob) = gp_state(p, alpha)?;
    Ok((even_cat_overlap(alpha, &state).norm_sqr(), prob))
}

/// Which parameter subset the optimizer explores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GpFamily {
    /// All five parameters.
    General,
    /// `(r1, T)` with the remaining parameters zero.
    Subtraction,
    /// `(r1, beta)` with `r2 = -r1`, `r3 = 0`, `T = 1/2`.
    Addition,
}

impl GpFamily {
    pub fn bounds(self) -> Vec<(f64, f64)> {
        const R: (f64, f64) = (-2.5, 2.5);
        const T: (f64, f64) = (0.05, 0.999);
        const B: (f64, f64) = (0.0, 2.0);
        match self {
            GpFamily::General => vec![R, R, R, T, B],
            GpFamily::Subtraction => vec![R, T],
            GpFamily::Addition => vec![R, B],
        }
    }

    pub fn params(self, x: &[f64], n: usize) -> GpParams {
        match self {
            GpFamily::General => GpParams::new(x[0], x[1], x[2], x[3], x[4], n),
            GpFamily::Subtraction => ps_params(x[0], x[1], n),
            GpFamily::Addition => pa_params(x[0], x[1], n),
        }
    }

    pub fn coordinates(self, p: &GpParams) -> Vec<f64> {
        match self {
            GpFamily::General => vec![p.r1, p.r2, p.r3, p.t, p.beta],
            GpFamily::Subtraction => vec![p.r1, p.t],
            GpFamily::Addition => vec![p.r1, p.beta],
        }
    }

    /// Success rate reported for the family (single-detector rate for subtraction).
    pub fn reported_probability(self, raw: f64, n: usize) -> f64 {
        match self {
            GpFamily::Subtraction => ps_success_rescale(raw, n),
            _ => raw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpOptimizeConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_evals: usize,
}

impl Default for GpOptimizeConfig {
    fn default() -> Self {
        Self { restarts: 8, seed: 7, max_evals: 4000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpOptimum {
    pub alpha: f64,
    pub family: GpFamily,
    pub params: GpParams,
    pub fidelity: f64,
    /// Herald probability (single-detector rate for the subtraction family).
    pub probability: f64,
    pub evaluations: usize,
}

/// Weight of the herald probability added to the fidelity objective.
pub const RATE_WEIGHT: f64 = 1e-6;

/// Maximizes the cat fidelity over the chosen family, optionally warm-started,
/// then returns the highest-rate setting that keeps that fidelity.
pub fn gp_optimize(
    alpha: f64,
    n: usize,
    family: GpFamily,
    config: &GpOptimizeConfig,
    warm: Option<&GpParams>,
) -> Result<GpOptimum> {
    if !(0.0..=6.0).contains(&alpha) {
        return Err(Error::OutOfRange(format!("target amplitude {alpha} outside [0, 6]")));
    }
    if !(1..=3).contains(&n) {
        return Err(Error::UnsupportedOrder(n));
    }
    // The output state is often invariant along curves of the parameter box;
    // the small rate bonus picks the highest-rate point of the optimal set and
    // costs at most RATE_WEIGHT in fidelity.
    let objective = |x: &[f64]| match gp_fidelity(&family.params(x, n), alpha) {
        Ok((f, p)) => f + RATE_WEIGHT * p,
        Err(_) => f64::NEG_INFINITY,
    };
    let spec = OptimizeSpec::new(&objective, family.bounds())
        .restarts(config.restarts)
        .seed(config.seed)
        .max_evals(config.max_evals)
        .warm_start(warm.map(|w| family.coordinates(w)));
    let result = maximize(&spec)?;

    let params = family.params(&result.argmax, n);
    let (fidelity, raw) = gp_fidelity(&params, alpha)?;
    Ok(GpOptimum {
        alpha,
        family,
        params,
        fidelity,
        probability: family.reported_probability(raw, n),
        evaluations: result.evaluations,
    })
}

/// Optimizes along an increasing amplitude grid, warm-starting each point from
/// the previous optimum.
pub fn gp_optimize_curve(
    alphas: &[f64],
    n: usize,
    family: GpFamily,
    config: &GpOptimizeConfig,
) -> Result<Vec<GpOptimum>> {
    let mut out: Vec<GpOptimum> = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let warm = out.last().map(|o| o.params);
        out.push(gp_optimize(alpha, n, family, config, warm.as_ref())?);
    }
    Ok(out)
}
