//! Wigner functions, homodyne distributions and distillable squeezing.
//!
//! Phase-space coordinates are `zeta = x + i y` in amplitude units, so the
//! vacuum Wigner function is `(2/pi) exp(-2|zeta|^2)`. Homodyne densities are
//! evaluated on the `y` quadrature with eigenfunctions `<y|n> = i^n psi_n(y)`,
//! where `psi_n` are the normalized Hermite functions.

use std::f64::consts::{FRAC_1_PI, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::coherent::CoherentMix;
use crate::error::{Error, Result};
use crate::fock::{displacement_elements, FockMatrix, FockVector};
use crate::optimizer::scan_then_refine;
use crate::quad::integrate;
use crate::state::State;

/// `(2/pi) Tr[rho D(2 zeta) Pi]`, an exact finite sum over the stored levels.
pub fn wigner_fock(rho: &FockMatrix, x: f64, y: f64) -> f64 {
    let n = rho.dim();
    let d = displacement_elements(C64::new(2.0 * x, 2.0 * y), n, n);
    let mut acc = C64::new(0.0, 0.0);
    for row in 0..n {
        for m in 0..n {
            let term = rho.get(m, row) * d[row * n + m];
            if m % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
    }
    2.0 * FRAC_1_PI * acc.re
}

/// Wigner function of a pure number-basis state.
pub fn wigner_pure(psi: &FockVector, x: f64, y: f64) -> f64 {
    let amps = significant(psi.amps());
    let n = amps.len();
    let d = displacement_elements(C64::new(2.0 * x, 2.0 * y), n, n);
    let mut acc = C64::new(0.0, 0.0);
    for row in 0..n {
        let mut inner = C64::new(0.0, 0.0);
        for m in 0..n {
            let term = d[row * n + m] * amps[m];
            if m % 2 == 0 {
                inner += term;
            } else {
                inner -= term;
            }
        }
        acc += amps[row].conj() * inner;
    }
    2.0 * FRAC_1_PI * acc.re
}

/// Leading amplitudes carrying all but ~1e-24 of the norm.
fn significant(amps: &[C64]) -> &[C64] {
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let mut tail = 0.0;
    let mut end = amps.len();
    while end > 1 {
        let next = tail + amps[end - 1].norm_sqr();
        if next > 1e-24 * total {
            break;
        }
        tail = next;
        end -= 1;
    }
    &amps[..end]
}

/// Closed-form Wigner function of a coherent mixture.
pub fn wigner_mix(m: &CoherentMix, x: f64, y: f64) -> f64 {
    let zeta = C64::new(x, y);
    let k = m.len();
    let betas = m.betas();
    let mut acc = C64::new(0.0, 0.0);
    let mut scale = 0.0f64;
    for i in 0..k {
        let bi = betas[i];
        let gamma = 2.0 * zeta - bi;
        for j in 0..k {
            let bj = betas[j];
            let exponent =
                zeta.conj() * bi - zeta * bi.conj() - 0.5 * bj.norm_sqr() - 0.5 * gamma.norm_sqr() + bj.conj() * gamma;
            let term = m.coeff(i, j) * exponent.exp();
            scale += term.norm();
            acc += term;
        }
    }
    debug_assert!(acc.im.abs() <= 1e-12 * scale.max(1.0), "imaginary Wigner residue {}", acc.im);
    2.0 * FRAC_1_PI * acc.re
}

/// Closed-form Wigner function of the even cat.
pub fn wigner_even_cat(alpha: f64, x: f64, y: f64) -> f64 {
    let g = |dx: f64| (-2.0 * (dx * dx + y * y)).exp();
    (2.0 * g(x) * (4.0 * alpha * y).cos() + g(x - alpha) + g(x + alpha)) / (PI * (1.0 + (-2.0 * alpha * alpha).exp()))
}

/// Closed-form homodyne density of the even cat.
pub fn homodyne_even_cat(alpha: f64, y: f64) -> f64 {
    let a2 = alpha * alpha;
    // e^{-y^2 + 2a^2}/(1 + e^{2a^2}) rewritten to avoid overflow
    (-y * y).exp() * (1.0 + (2.0 * 2f64.sqrt() * alpha * y).cos()) / (PI.sqrt() * (1.0 + (-2.0 * a2).exp()))
}

/// Which quadrature cut a grid follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Varies `x` at fixed `y`.
    X,
    /// Varies `y` at fixed `x`.
    Y,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub axis: Axis,
    pub points: Vec<f64>,
    pub values: Vec<f64>,
}

impl PhaseGrid {
    /// Wigner cut through the fixed coordinate `at`.
    pub fn wigner_cut(state: &State, axis: Axis, points: &[f64], at: f64) -> Self {
        use rayon::prelude::*;
        let values = points
            .par_iter()
            .map(|&p| match axis {
                Axis::X => state.wigner(p, at),
                Axis::Y => state.wigner(at, p),
            })
            .collect();
        Self { axis, points: points.to_vec(), values }
    }

    pub fn homodyne(profile: &HomodyneProfile, points: &[f64]) -> Self {
        let values = points.iter().map(|&y| profile.pdf(y)).collect();
        Self { axis: Axis::Y, points: points.to_vec(), values }
    }

    pub fn trapezoid(&self) -> f64 {
        self.points.windows(2).zip(self.values.windows(2)).map(|(p, v)| 0.5 * (p[1] - p[0]) * (v[0] + v[1])).sum()
    }
}

/// `n` evenly spaced points covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `p(y)` with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneSample {
    pub p: f64,
    pub dp: f64,
    pub d2p: f64,
}

#[derive(Debug, Clone)]
enum Basis {
    Fock,
    Coherent(Vec<C64>),
}

/// Homodyne density `p(y) = sum_k w_k |g_k(y)|^2` with `w_k >= 0`.
///
/// Mixed states are split into weighted pure components (spectral
/// decomposition of the number-basis matrix or of the coherent coefficient
/// matrix), which keeps `p` manifestly nonnegative and bounds `p'^2/p`.
#[derive(Debug, Clone)]
pub struct HomodyneProfile {
    basis: Basis,
    components: Vec<(f64, Vec<C64>)>,
    dim: usize,
}

impl HomodyneProfile {
    pub fn new(state: &State) -> Self {
        match state {
            State::Pure(v) => {
                let amps = significant(v.amps()).to_vec();
                let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
                Self { basis: Basis::Fock, dim: amps.len(), components: vec![(1.0 / norm, amps)] }
            }
            State::Mixed(m) => {
                let (values, vectors) = m.eigen();
                let top = values.iter().copied().fold(0.0, f64::max);
                let components: Vec<(f64, Vec<C64>)> = values
                    .into_iter()
                    .zip(vectors)
                    .filter(|(w, _)| *w > 1e-15 * top)
                    .map(|(w, v)| (w, v.into_amps()))
                    .collect();
                Self { basis: Basis::Fock, dim: m.dim(), components }
            }
            State::Coherent(mix) => {
                let eig = mix.coeff_eigen();
                let top = eig.iter().map(|(w, _)| w.abs()).fold(0.0, f64::max);
                // negative weights are either rounding noise or cancel through the Gram matrix
                let components = eig.into_iter().filter(|(w, _)| w.abs() > 1e-15 * top).collect();
                Self { basis: Basis::Coherent(mix.betas().to_vec()), dim: mix.len(), components }
            }
        }
    }

    /// `(g, g', g'')` of one component at `y`.
    fn amplitudes(basis_vals: &[(C64, C64, C64)], v: &[C64]) -> (C64, C64, C64) {
        let mut out = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for (c, (f, df, d2f)) in v.iter().zip(basis_vals) {
            out.0 += c * f;
            out.1 += c * df;
            out.2 += c * d2f;
        }
        out
    }

    /// Basis functions `<y|e_i>` with first and second derivatives.
    fn basis_values(&self, y: f64) -> Vec<(C64, C64, C64)> {
        match &self.basis {
            Basis::Fock => {
                let psi = hermite_functions(y, self.dim + 1);
                let phase = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
                (0..self.dim)
                    .map(|n| {
                        let nf = n as f64;
                        let lower = if n > 0 { psi[n - 1] } else { 0.0 };
                        let d = ((nf / 2.0).sqrt() * lower) - ((nf + 1.0) / 2.0).sqrt() * psi[n + 1];
                        let d2 = (y * y - (2.0 * nf + 1.0)) * psi[n];
                        let ph = phase[n % 4];
                        (ph * psi[n], ph * d, ph * d2)
                    })
                    .collect()
            }
            Basis::Coherent(betas) => betas
                .iter()
                .map(|b| {
                    let s = 2f64.sqrt();
                    let exponent = -0.5 * b.norm_sqr() - 0.5 * y * y + C64::new(0.0, s) * b * y + 0.5 * b * b;
                    let f = exponent.exp() * PI.powf(-0.25);
                    let lin = C64::new(-y, 0.0) + C64::new(0.0, s) * b;
                    (f, lin * f, (lin * lin - 1.0) * f)
                })
                .collect(),
        }
    }

    pub fn sample(&self, y: f64) -> HomodyneSample {
        let basis = self.basis_values(y);
        let mut s = HomodyneSample { p: 0.0, dp: 0.0, d2p: 0.0 };
        for (w, v) in &self.components {
            let (g, dg, d2g) = Self::amplitudes(&basis, v);
            s.p += w * g.norm_sqr();
            s.dp += w * 2.0 * (dg * g.conj()).re;
            s.d2p += w * 2.0 * ((d2g * g.conj()).re + dg.norm_sqr());
        }
        s
    }

    pub fn pdf(&self, y: f64) -> f64 {
        self.sample(y).p
    }

    /// Upper bound on the integrand `p'^2/p` from Cauchy-Schwarz: `4 sum_k w_k |g_k'|^2`.
    pub(crate) fn score_bound(&self, y: f64) -> f64 {
        let basis = self.basis_values(y);
        self.components
            .iter()
            .filter(|(w, _)| *w > 0.0)
            .map(|(w, v)| 4.0 * w * Self::amplitudes(&basis, v).1.norm_sqr())
            .sum()
    }

    /// Symmetric integration half-width covering the distribution.
    pub fn extent(&self) -> f64 {
        // second moment of y from a coarse quadrature of the density itself
        let (m0, m1, m2) = (0..=800).fold((0.0, 0.0, 0.0), |acc, i| {
            let y = -40.0 + 0.1 * i as f64;
            let p = self.pdf(y);
            (acc.0 + p, acc.1 + p * y, acc.2 + p * y * y)
        });
        let mean = m1 / m0;
        let sigma = (m2 / m0 - mean * mean).max(0.0).sqrt();
        (mean.abs() + 12.0 * sigma + 4.0).min(40.0)
    }

    /// `int p(y) dy` over [`extent`](Self::extent).
    pub fn normalization(&self) -> f64 {
        let l = self.extent();
        integrate(|y| self.pdf(y), -l, l, 64, 1e-12, 1e-14).value
    }
}

/// Normalized Hermite functions `psi_0 .. psi_{len-1}` at `y`.
pub fn hermite_functions(y: f64, len: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(len.max(2));
    psi.push(PI.powf(-0.25) * (-0.5 * y * y).exp());
    psi.push(2f64.sqrt() * y * psi[0]);
    for n in 1..len.saturating_sub(1) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * y * psi[n] - (nf / (nf + 1.0)).sqrt() * psi[n - 1];
        psi.push(next);
    }
    psi.truncate(len.max(1));
    psi
}

/// `V = p(0)/|p''(0)|` and the quantities behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistillableReport {
    pub variance: f64,
    pub p0: f64,
    pub p2: f64,
}

impl DistillableReport {
    /// Below the vacuum value 1/2.
    pub fn nonclassical(&self) -> bool {
        self.variance < 0.5
    }
}

pub fn distillable_variance(profile: &HomodyneProfile) -> Result<DistillableReport> {
    let s = profile.sample(0.0);
    if s.d2p.abs() < 1e-12 {
        return Err(Error::FlatAtOrigin(s.d2p.abs()));
    }
    Ok(DistillableReport { variance: s.p / s.d2p.abs(), p0: s.p, p2: s.d2p })
}

/// Result of the interference-minimum search along `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerMinimum {
    pub y: f64,
    pub value: f64,
    /// Whether the located minimum is negative.
    pub negative: bool,
}

/// First interference minimum of `W(0, y)` on `y in (0, pi/(2 alpha))`.
pub fn find_wigner_min(state: &State, alpha: f64) -> Result<WignerMinimum> {
    if !(alpha > 0.0) {
        return Err(Error::OutOfRange(format!("amplitude must be positive, got {alpha}")));
    }
    let hi = PI / (2.0 * alpha);
    let (y, neg) = scan_then_refine(|y| -state.wigner(0.0, y), hi * 1e-3, hi * (1.0 - 1e-3), 65, 1e-10);
    let value = -neg;
    Ok(WignerMinimum { y, value, negative: value < 0.0 })
}

/// `int int W dx dy` over a square of half-width `half` by nested adaptive quadrature.
pub fn wigner_integral(state: &State, half: f64) -> f64 {
    integrate(|y| integrate(|x| state.wigner(x, y), -half, half, 8, 1e-7, 1e-12).value, -half, half, 16, 1e-7, 1e-12)
        .value
}
