//! Truncated Fock-space numerics.
//!
//! States live in the number basis `{|0>, ..., |N-1>}`. Constructors check the
//! tail-mass invariant so that downstream code can trust the truncation.

mod three_mode;

pub use three_mode::{brute_force_three_mode, ThreeModeHerald, ThreeModeState};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tail-mass limit used by state constructors.
pub const TAIL_LIMIT: f64 = 1e-8;

/// Photon-number parity of a cat state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// `+1` for even, `-1` for odd.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Truncation `ceil(|beta|^2 + 8|beta| + 20)` for states of amplitude up to `beta_max`.
pub fn truncation_for(beta_max: f64) -> usize {
    let b = beta_max.abs();
    (b * b + 8.0 * b + 20.0).ceil() as usize
}

/// Natural logarithms of `n!` for `n < len`.
pub(crate) fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len.max(1));
    out.push(0.0);
    for n in 1..len {
        let prev = out[n - 1];
        out.push(prev + (n as f64).ln());
    }
    out
}

/// Pure state as amplitudes in the number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<C64>,
}

impl FockVector {
    pub fn new(amps: Vec<C64>) -> Self {
        assert!(!amps.is_empty(), "Fock vector needs at least one level");
        Self { amps }
    }

    pub fn from_real(amps: &[f64]) -> Self {
        Self::new(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// `|n>` in a basis of dimension `dim`.
    pub fn number(n: usize, dim: usize) -> Self {
        assert!(n < dim);
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[n] = C64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn vacuum(dim: usize) -> Self {
        Self::number(0, dim)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Rescales to unit norm; fails on a zero vector.
    pub fn normalize(&mut self) -> Result<()> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::DegenerateInput("cannot normalize a zero vector"));
        }
        let inv = 1.0 / n2.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// Mass held in levels `n > 0.9 * (dim - 1)`.
    pub fn tail_mass(&self) -> f64 {
        let n_max = (self.dim() - 1) as f64;
        self.amps.iter().enumerate().filter(|(n, _)| *n as f64 > 0.9 * n_max).map(|(_, a)| a.norm_sqr()).sum::<f64>()
            / self.norm_sqr().max(f64::MIN_POSITIVE)
    }

    pub fn check_truncation(&self, limit: f64) -> Result<()> {
        let tail_mass = self.tail_mass();
        if tail_mass < limit {
            Ok(())
        } else {
            Err(Error::TruncationTooSmall { dim: self.dim(), tail_mass, limit })
        }
    }

    /// `<self|other>`; the shorter vector is zero-padded.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amps.iter().zip(other.amps.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|^2` for normalized inputs.
    pub fn fidelity(&self, other: &FockVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amps.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum::<f64>() / self.norm_sqr()
    }

    /// Zero-pads or truncates to `dim` levels.
    pub fn resized(&self, dim: usize) -> Self {
        let mut amps = self.amps.clone();
        amps.resize(dim, C64::new(0.0, 0.0));
        Self { amps }
    }

    pub fn projector(&self) -> FockMatrix {
        let d = self.dim();
        let mut elems = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                elems[i * d + j] = self.amps[i] * self.amps[j].conj();
            }
        }
        FockMatrix { dim: d, elems }
    }

    /// `a|psi>`, keeping the dimension.
    pub fn lowered(&self) -> Self {
        let d = self.dim();
        let mut out = vec![C64::new(0.0, 0.0); d];
        for n in 0..d - 1 {
            out[n] = self.amps[n + 1] * ((n + 1) as f64).sqrt();
        }
        Self { amps: out }
    }

    /// `a^dag|psi>` in a basis one level larger, so no amplitude is lost.
    pub fn raised(&self) -> Self {
        let d = self.dim();
        let mut out = vec![C64::new(0.0, 0.0); d + 1];
        for n in 0..d {
            out[n + 1] = self.amps[n] * ((n + 1) as f64).sqrt();
        }
        Self { amps: out }
    }
}

/// Squeezing parameter with the derived BCH quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeSpec {
    pub r: f64,
}

impl SqueezeSpec {
    pub fn new(r: f64) -> Self {
        Self { r }
    }

    /// `tanh r`
    pub fn lambda(&self) -> f64 {
        self.r.tanh()
    }

    /// `cosh r`
    pub fn mu(&self) -> f64 {
        self.r.cosh()
    }
}

/// Coherent state `|beta>` truncated to `dim` levels.
pub fn coherent_fock(beta: C64, dim: usize) -> Result<FockVector> {
    let mut amps = Vec::with_capacity(dim);
    let mut c = C64::new((-beta.norm_sqr() / 2.0).exp(), 0.0);
    amps.push(c);
    for n in 1..dim {
        c = c * beta / (n as f64).sqrt();
        amps.push(c);
    }
    let v = FockVector::new(amps);
    v.check_truncation(TAIL_LIMIT)?;
    v.normalized()
}

/// Squeezed vacuum `S(r)|0>` with `S(r) = exp[r(a^dag^2 - a^2)/2]`.
pub fn squeezed_vacuum_fock(r: f64, dim: usize) -> Result<FockVector> {
    let sq = SqueezeSpec::new(r);
    let half_lambda = sq.lambda() / 2.0;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    // amplitude of |2k>: mu^{-1/2} (lambda/2)^k sqrt((2k)!)/k!
    let mut c = sq.mu().powf(-0.5);
    let mut k = 0usize;
    while 2 * k < dim {
        amps[2 * k] = C64::new(c, 0.0);
        let kf = k as f64;
        c *= half_lambda * ((2.0 * kf + 1.0) * (2.0 * kf + 2.0)).sqrt() / (kf + 1.0);
        k += 1;
    }
    let v = FockVector::new(amps);
    v.check_truncation(TAIL_LIMIT)?;
    v.normalized()
}

/// Even or odd cat `(|alpha> +- |-alpha>)/N_+-` for real `alpha >= 0`.
pub fn cat_fock(alpha: f64, parity: Parity, dim: usize) -> Result<FockVector> {
    if alpha < 0.0 || !alpha.is_finite() {
        return Err(Error::OutOfRange(format!("cat amplitude must be >= 0, got {alpha}")));
    }
    if parity == Parity::Odd && alpha == 0.0 {
        return Err(Error::DegenerateInput("odd cat at zero amplitude"));
    }
    let keep = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let mut c = (-alpha * alpha / 2.0).exp();
    for (n, slot) in amps.iter_mut().enumerate() {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        if n % 2 == keep {
            *slot = C64::new(2.0 * c, 0.0);
        }
    }
    let v = FockVector::new(amps);
    if v.norm_sqr() == 0.0 {
        // odd cat with alpha so small the amplitudes underflow
        return Err(Error::DegenerateInput("cat amplitudes vanish"));
    }
    v.check_truncation(TAIL_LIMIT)?;
    v.normalized()
}

/// Applies `sum_k coeffs[k] (a - lambda2 a^dag)^(2k)` to `state`.
///
/// The result lives in a basis `2 * (coeffs.len() - 1)` levels larger than the
/// input, which makes the action exact on the truncated input. Returns the
/// unnormalized vector together with its squared norm.
pub fn apply_polynomial(state: &FockVector, coeffs: &[C64], lambda2: f64) -> Result<(FockVector, f64)> {
    if coeffs.is_empty() {
        return Err(Error::OutOfRange("empty coefficient list".into()));
    }
    let degree = 2 * (coeffs.len() - 1);
    let out_dim = state.dim() + degree;
    let mut acc = vec![C64::new(0.0, 0.0); out_dim];
    // power holds (a - lambda2 a^dag)^(2k)|state>, padded to out_dim
    let mut power = state.resized(out_dim).into_amps();
    let mut work = vec![C64::new(0.0, 0.0); out_dim];
    for (k, ck) in coeffs.iter().enumerate() {
        if k > 0 {
            for _ in 0..2 {
                apply_quadrature_like(&power, lambda2, &mut work);
                std::mem::swap(&mut power, &mut work);
            }
        }
        if *ck != C64::new(0.0, 0.0) {
            for (a, p) in acc.iter_mut().zip(power.iter()) {
                *a += ck * p;
            }
        }
    }
    let out = FockVector::new(acc);
    let k = out.norm_sqr();
    Ok((out, k))
}

/// `out = (a - lambda a^dag) v`. The caller guarantees the top level of `v` is
/// empty whenever the raise matters.
fn apply_quadrature_like(v: &[C64], lambda: f64, out: &mut [C64]) {
    let d = v.len();
    for n in 0..d {
        let mut x = C64::new(0.0, 0.0);
        if n + 1 < d {
            x += v[n + 1] * ((n + 1) as f64).sqrt();
        }
        if n > 0 {
            x -= v[n - 1] * (lambda * (n as f64).sqrt());
        }
        out[n] = x;
    }
}

/// Pure-loss channel of transmissivity `tau` applied to a pure state.
///
/// Sums the Kraus branches `E_l = sum_m sqrt(C(m,l) (1-tau)^l tau^(m-l)) |m-l><m|`,
/// which reproduces the binomial double sum for the lossy density matrix.
pub fn loss_fock(state: &FockVector, tau: f64) -> Result<FockMatrix> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::OutOfRange(format!("transmissivity {tau} outside [0, 1]")));
    }
    let d = state.dim();
    let lnf = ln_factorials(d);
    let mut elems = vec![C64::new(0.0, 0.0); d * d];
    let mut branch = vec![C64::new(0.0, 0.0); d];
    for l in 0..d {
        let mut any = false;
        for m in l..d {
            let w = kraus_weight(m, l, tau, &lnf);
            branch[m - l] = state.amps[m] * w;
            any |= w != 0.0;
        }
        if !any {
            continue;
        }
        let len = d - l;
        for j in 0..len {
            if branch[j] == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..len {
                elems[j * d + k] += branch[j] * branch[k].conj();
            }
        }
    }
    let mut rho = FockMatrix { dim: d, elems };
    rho.renormalize()?;
    Ok(rho)
}

/// `sqrt(C(m,l) (1-tau)^l tau^(m-l))` with `0^0 = 1`.
fn kraus_weight(m: usize, l: usize, tau: f64, lnf: &[f64]) -> f64 {
    let lost = l as f64;
    let kept = (m - l) as f64;
    if (tau == 1.0 && l > 0) || (tau == 0.0 && m > l) {
        return 0.0;
    }
    let mut ln = lnf[m] - lnf[l] - lnf[m - l];
    if l > 0 {
        ln += lost * (1.0 - tau).ln();
    }
    if m > l {
        ln += kept * tau.ln();
    }
    (0.5 * ln).exp()
}

/// Exact matrix elements `<n|D(beta)|k>` for `n < rows`, `k < cols`.
///
/// Columns follow `D|k> = (a^dag - conj(beta)) D|k-1> / sqrt(k)`, which only
/// ever reads lower levels, so no truncation error enters the listed entries.
/// Stored row-major as `rows x cols`.
pub fn displacement_elements(beta: C64, rows: usize, cols: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); rows * cols];
    let mut col = vec![C64::new(0.0, 0.0); rows];
    let mut c = C64::new((-beta.norm_sqr() / 2.0).exp(), 0.0);
    for (n, slot) in col.iter_mut().enumerate() {
        if n > 0 {
            c = c * beta / (n as f64).sqrt();
        }
        *slot = c;
    }
    let bc = beta.conj();
    let mut next = vec![C64::new(0.0, 0.0); rows];
    for k in 0..cols {
        if k > 0 {
            let inv = 1.0 / (k as f64).sqrt();
            for n in 0..rows {
                let mut x = -bc * col[n];
                if n > 0 {
                    x += col[n - 1] * (n as f64).sqrt();
                }
                next[n] = x * inv;
            }
            std::mem::swap(&mut col, &mut next);
        }
        for n in 0..rows {
            out[n * cols + k] = col[n];
        }
    }
    out
}

/// `D(beta)|psi>` in a basis of `out_dim` levels (exact on the listed entries).
pub fn displace_fock(state: &FockVector, beta: C64, out_dim: usize) -> FockVector {
    let cols = state.dim();
    let d = displacement_elements(beta, out_dim, cols);
    let amps = (0..out_dim).map(|n| (0..cols).map(|k| d[n * cols + k] * state.amps[k]).sum()).collect();
    FockVector::new(amps)
}

/// Mixed state as a dense Hermitian matrix in the number basis (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    dim: usize,
    elems: Vec<C64>,
}

impl FockMatrix {
    /// Builds from row-major elements, checking the density-operator invariants.
    pub fn new(dim: usize, elems: Vec<C64>) -> Result<Self> {
        if elems.len() != dim * dim || dim == 0 {
            return Err(Error::InvalidState(format!("expected {} elements, got {}", dim * dim, elems.len())));
        }
        let m = Self { dim, elems };
        m.validate()?;
        Ok(m)
    }

    /// Builds without validation; used for intermediate sums.
    pub(crate) fn from_raw(dim: usize, elems: Vec<C64>) -> Self {
        debug_assert_eq!(elems.len(), dim * dim);
        Self { dim, elems }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.elems[i * self.dim + j]
    }

    pub fn elems(&self) -> &[C64] {
        &self.elems
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Divides by the trace.
    pub fn renormalize(&mut self) -> Result<()> {
        let t = self.trace().re;
        if !(t > 0.0) {
            return Err(Error::DegenerateInput("zero-trace density matrix"));
        }
        self.elems.iter_mut().for_each(|e| *e /= t);
        Ok(())
    }

    /// `<psi|rho|psi>`, zero-padding whichever side is shorter.
    pub fn expectation(&self, psi: &FockVector) -> f64 {
        let d = self.dim.min(psi.dim());
        let a = psi.amps();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            let mut row = C64::new(0.0, 0.0);
            for j in 0..d {
                row += self.get(i, j) * a[j];
            }
            acc += a[i].conj() * row;
        }
        acc.re
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim).map(|n| n as f64 * self.get(n, n).re).sum()
    }

    /// Hermitian eigen-decomposition, eigenvalues ascending.
    pub fn eigen(&self) -> (Vec<f64>, Vec<FockVector>) {
        let d = self.dim;
        let m = DMatrix::from_fn(d, d, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5);
        let eig = m.symmetric_eigen();
        let mut idx: Vec<usize> = (0..d).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors =
            idx.iter().map(|&i| FockVector::new(eig.eigenvectors.column(i).iter().copied().collect())).collect();
        (values, vectors)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().0.first().copied().unwrap_or(0.0)
    }

    /// Hermitian within 1e-10, unit trace within 1e-8, spectrum above -1e-8.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::InvalidState(format!("not Hermitian (error {herm:.3e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = self.min_eigenvalue();
        if min < -1e-8 {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// Zero-pads or truncates to `dim` levels.
    pub fn resized(&self, dim: usize) -> Self {
        let mut elems = vec![C64::new(0.0, 0.0); dim * dim];
        let d = self.dim.min(dim);
        for i in 0..d {
            for j in 0..d {
                elems[i * dim + j] = self.get(i, j);
            }
        }
        Self { dim, elems }
    }

    /// Largest entrywise deviation from `other` after padding both to a common size.
    pub fn max_abs_diff(&self, other: &FockMatrix) -> f64 {
        let d = self.dim.max(other.dim);
        let (a, b) = (self.resized(d), other.resized(d));
        a.elems.iter().zip(b.elems.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    /// Pure-loss channel `sum_l E_l rho E_l^dag` with the Kraus weights of [`loss_fock`].
    pub fn loss(&self, tau: f64) -> Result<FockMatrix> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::OutOfRange(format!("transmissivity {tau} outside [0, 1]")));
        }
        let d = self.dim;
        let lnf = ln_factorials(d);
        let w: Vec<f64> = (0..d * d)
            .map(|i| {
                let (m, l) = (i / d, i % d);
                if l <= m {
                    kraus_weight(m, l, tau, &lnf)
                } else {
                    0.0
                }
            })
            .collect();
        let mut elems = vec![C64::new(0.0, 0.0); d * d];
        for l in 0..d {
            for m in l..d {
                let wm = w[m * d + l];
                if wm == 0.0 {
                    continue;
                }
                for k in l..d {
                    let wk = w[k * d + l];
                    if wk != 0.0 {
                        elems[(m - l) * d + (k - l)] += self.get(m, k) * (wm * wk);
                    }
                }
            }
        }
        Ok(FockMatrix { dim: d, elems })
    }

    /// Mass on levels `n > 0.9 * (dim - 1)`.
    pub fn tail_mass(&self) -> f64 {
        let n_max = (self.dim - 1) as f64;
        (0..self.dim).filter(|&n| n as f64 > 0.9 * n_max).map(|n| self.get(n, n).re).sum()
    }
}

impl From<&FockVector> for FockMatrix {
    fn from(v: &FockVector) -> Self {
        v.projector()
    }
}
