//! Exact density operators spanned by finitely many coherent states.
//!
//! A [`CoherentMix`] stores `rho = sum_ij c_ij |beta_i><beta_j|`. Displacement
//! and pure loss map this family into itself, so every dispersive-protocol
//! state is represented without truncation. Global phases produced by
//! displacements are folded into `c_ij`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{coherent_fock, FockMatrix, FockVector, Parity};

/// `<beta|gamma> = exp(-|beta|^2/2 - |gamma|^2/2 + conj(beta) gamma)`.
pub fn coherent_overlap(beta: C64, gamma: C64) -> C64 {
    (-0.5 * beta.norm_sqr() - 0.5 * gamma.norm_sqr() + beta.conj() * gamma).exp()
}

/// Cat normalization `N_+- = sqrt(2 (1 +- e^{-2 alpha^2}))`.
pub fn cat_norm(alpha: f64, parity: Parity) -> f64 {
    let e = (-2.0 * alpha * alpha).exp();
    match parity {
        Parity::Even => (2.0 * (1.0 + e)).sqrt(),
        Parity::Odd => (-2.0 * (-2.0 * alpha * alpha).exp_m1()).sqrt(),
    }
}

/// `<cat_+-(alpha)|beta>`.
pub fn cat_overlap(alpha: f64, parity: Parity, beta: C64) -> C64 {
    let a = C64::new(alpha, 0.0);
    (coherent_overlap(a, beta) + parity.sign() * coherent_overlap(-a, beta)) / cat_norm(alpha, parity)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentMix {
    betas: Vec<C64>,
    /// Row-major `k x k`.
    coeffs: Vec<C64>,
}

impl CoherentMix {
    /// Builds from kets and a row-major coefficient matrix; checks Hermiticity.
    pub fn new(betas: Vec<C64>, coeffs: Vec<C64>) -> Result<Self> {
        let k = betas.len();
        if k == 0 || coeffs.len() != k * k {
            return Err(Error::InvalidState(format!("{} kets need {} coefficients, got {}", k, k * k, coeffs.len())));
        }
        let m = Self { betas, coeffs };
        let herm = m.hermiticity_error();
        if herm > 1e-12 {
            return Err(Error::InvalidState(format!("coefficients not Hermitian (error {herm:.3e})")));
        }
        Ok(m)
    }

    /// `|psi><psi|` with `|psi> = sum_i amps_i |betas_i>`, normalized.
    pub fn pure(betas: Vec<C64>, amps: &[C64]) -> Result<Self> {
        assert_eq!(betas.len(), amps.len());
        let k = betas.len();
        let mut coeffs = vec![C64::new(0.0, 0.0); k * k];
        for i in 0..k {
            for j in 0..k {
                coeffs[i * k + j] = amps[i] * amps[j].conj();
            }
        }
        let mut m = Self::new(betas, coeffs)?;
        m.normalize()?;
        Ok(m)
    }

    pub fn coherent(beta: C64) -> Self {
        Self { betas: vec![beta], coeffs: vec![C64::new(1.0, 0.0)] }
    }

    pub fn vacuum() -> Self {
        Self::coherent(C64::new(0.0, 0.0))
    }

    /// `|cat_+-><cat_+-|` with kets `{alpha, -alpha}`.
    pub fn cat(alpha: f64, parity: Parity) -> Result<Self> {
        if alpha < 0.0 {
            return Err(Error::OutOfRange(format!("cat amplitude must be >= 0, got {alpha}")));
        }
        if parity == Parity::Odd && alpha == 0.0 {
            return Err(Error::DegenerateInput("odd cat at zero amplitude"));
        }
        if alpha == 0.0 {
            return Ok(Self::vacuum());
        }
        let n2 = cat_norm(alpha, parity).powi(2);
        let s = parity.sign();
        let a = C64::new(alpha, 0.0);
        let c = |x: f64| C64::new(x / n2, 0.0);
        Self::new(vec![a, -a], vec![c(1.0), c(s), c(s), c(1.0)])
    }

    /// Convex combination `sum_k w_k rho_k` (block-diagonal coefficients).
    pub fn mixture(parts: &[(f64, &CoherentMix)]) -> Result<Self> {
        let total: usize = parts.iter().map(|(_, m)| m.len()).sum();
        let mut betas = Vec::with_capacity(total);
        let mut coeffs = vec![C64::new(0.0, 0.0); total * total];
        let mut offset = 0;
        for (w, m) in parts {
            let k = m.len();
            betas.extend_from_slice(&m.betas);
            for i in 0..k {
                for j in 0..k {
                    coeffs[(offset + i) * total + offset + j] = m.coeff(i, j) * *w;
                }
            }
            offset += k;
        }
        Self::new(betas, coeffs)
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    pub fn betas(&self) -> &[C64] {
        &self.betas
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> C64 {
        self.coeffs[i * self.len() + j]
    }

    pub fn max_amplitude(&self) -> f64 {
        self.betas.iter().map(|b| b.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        let k = self.len();
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in i..k {
                worst = worst.max((self.coeff(i, j) - self.coeff(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `Tr rho = sum_ij c_ij <beta_j|beta_i>`.
    pub fn trace(&self) -> C64 {
        let k = self.len();
        let mut t = C64::new(0.0, 0.0);
        for i in 0..k {
            for j in 0..k {
                t += self.coeff(i, j) * coherent_overlap(self.betas[j], self.betas[i]);
            }
        }
        t
    }

    pub fn normalize(&mut self) -> Result<()> {
        let t = self.trace().re;
        if !(t > 0.0) {
            return Err(Error::DegenerateInput("zero-trace coherent mixture"));
        }
        self.coeffs.iter_mut().for_each(|c| *c /= t);
        Ok(())
    }

    /// Smallest eigenvalue of the Gram matrix `<beta_i|beta_j>`.
    pub fn gram_min_eigenvalue(&self) -> f64 {
        let k = self.len();
        let g = DMatrix::from_fn(k, k, |i, j| coherent_overlap(self.betas[i], self.betas[j]));
        g.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Eigen-decomposition of the coefficient matrix, `c = sum_k w_k u_k u_k^dag`.
    pub(crate) fn coeff_eigen(&self) -> Vec<(f64, Vec<C64>)> {
        let k = self.len();
        let m = DMatrix::from_fn(k, k, |i, j| (self.coeff(i, j) + self.coeff(j, i).conj()) * 0.5);
        let eig = m.symmetric_eigen();
        (0..k).map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect())).collect()
    }

    /// `D(delta) rho D(delta)^dag`.
    pub fn displace(&self, delta: C64) -> Self {
        let phases: Vec<C64> = self.betas.iter().map(|b| (0.5 * (delta * b.conj() - delta.conj() * b)).exp()).collect();
        let k = self.len();
        let mut coeffs = self.coeffs.clone();
        for i in 0..k {
            for j in 0..k {
                coeffs[i * k + j] *= phases[i] * phases[j].conj();
            }
        }
        Self { betas: self.betas.iter().map(|b| b + delta).collect(), coeffs }
    }

    /// Pure loss of transmissivity `tau`.
    pub fn loss(&self, tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::OutOfRange(format!("transmissivity {tau} outside [0, 1]")));
        }
        let k = self.len();
        let lost = 1.0 - tau;
        let mut coeffs = self.coeffs.clone();
        for i in 0..k {
            for j in 0..k {
                let (bi, bj) = (self.betas[i], self.betas[j]);
                let env = (-0.5 * lost * (bi.norm_sqr() + bj.norm_sqr()) + lost * bi * bj.conj()).exp();
                coeffs[i * k + j] *= env;
            }
        }
        let s = tau.sqrt();
        Ok(Self { betas: self.betas.iter().map(|b| b * s).collect(), coeffs })
    }

    /// `<cat|rho|cat>` in closed form.
    pub fn fidelity_with_cat(&self, alpha: f64, parity: Parity) -> f64 {
        let ov: Vec<C64> = if alpha == 0.0 {
            self.betas.iter().map(|b| coherent_overlap(C64::new(0.0, 0.0), *b)).collect()
        } else {
            self.betas.iter().map(|b| cat_overlap(alpha, parity, *b)).collect()
        };
        let k = self.len();
        let mut f = C64::new(0.0, 0.0);
        for i in 0..k {
            for j in 0..k {
                f += self.coeff(i, j) * ov[i] * ov[j].conj();
            }
        }
        f.re
    }

    /// `<psi|rho|psi>` for a Fock-basis pure state.
    pub fn expectation_fock(&self, psi: &FockVector) -> Result<f64> {
        let kets = self.fock_kets(psi.dim())?;
        let ov: Vec<C64> = kets.iter().map(|k| psi.inner(k)).collect();
        let k = self.len();
        let mut f = C64::new(0.0, 0.0);
        for i in 0..k {
            for j in 0..k {
                f += self.coeff(i, j) * ov[i] * ov[j].conj();
            }
        }
        Ok(f.re)
    }

    fn fock_kets(&self, dim: usize) -> Result<Vec<FockVector>> {
        // unnormalized truncated kets keep sum_ij c_ij <beta_j|beta_i> exact up to the tail
        self.betas
            .iter()
            .map(|b| {
                coherent_fock(*b, dim)?;
                let mut amps = Vec::with_capacity(dim);
                let mut c = C64::new((-b.norm_sqr() / 2.0).exp(), 0.0);
                amps.push(c);
                for n in 1..dim {
                    c = c * b / (n as f64).sqrt();
                    amps.push(c);
                }
                Ok(FockVector::new(amps))
            })
            .collect()
    }

    /// Dense number-basis representation.
    pub fn to_fock(&self, dim: usize) -> Result<FockMatrix> {
        let kets = self.fock_kets(dim)?;
        let k = self.len();
        let mut elems = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..k {
            for j in 0..k {
                let c = self.coeff(i, j);
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let (a, b) = (kets[i].amps(), kets[j].amps());
                for n in 0..dim {
                    let an = c * a[n];
                    for m in 0..dim {
                        elems[n * dim + m] += an * b[m].conj();
                    }
                }
            }
        }
        let rho = FockMatrix::from_raw(dim, elems);
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-8 {
            return Err(Error::TruncationTooSmall { dim, tail_mass: (1.0 - tr.re).abs(), limit: 1e-8 });
        }
        Ok(rho)
    }

    /// Largest entrywise difference in kets and coefficients (same ordering assumed).
    pub fn max_abs_diff(&self, other: &CoherentMix) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        let kets = self.betas.iter().zip(&other.betas).map(|(a, b)| (a - b).norm());
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm());
        kets.chain(coeffs).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{cat_fock, displace_fock, loss_fock, truncation_for};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn overlap_closed_forms() {
        assert_abs_diff_eq!(coherent_overlap(c(0.3, -1.0), c(0.3, -1.0)).re, 1.0, epsilon = 1e-15);
        let a = 1.7;
        assert_abs_diff_eq!(coherent_overlap(c(a, 0.0), c(-a, 0.0)).re, (-2.0 * a * a).exp(), epsilon = 1e-15);
    }

    #[test]
    fn overlap_matches_fock_inner_product() {
        let (b, g) = (c(1.0, 1.0), c(2.0, 0.0));
        let fb = coherent_fock(b, 80).unwrap();
        let fg = coherent_fock(g, 80).unwrap();
        assert_abs_diff_eq!((coherent_overlap(b, g) - fb.inner(&fg)).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn displacement_identity_and_vacuum() {
        let m = CoherentMix::cat(1.2, Parity::Even).unwrap();
        assert_eq!(m.displace(c(0.0, 0.0)), m);
        let v = CoherentMix::vacuum().displace(c(0.0, 0.7));
        assert_eq!(v.betas(), &[c(0.0, 0.7)]);
        assert_abs_diff_eq!(v.coeff(0, 0).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn displaced_odd_cat_matches_fock_displacement() {
        let (alpha, gamma) = (1.5, 0.4);
        let m = CoherentMix::cat(alpha, Parity::Odd).unwrap().displace(c(0.0, gamma));
        let dim = 60;
        let psi = displace_fock(&cat_fock(alpha, Parity::Odd, 40).unwrap(), c(0.0, gamma), dim);
        let rho = m.to_fock(dim).unwrap();
        assert!(rho.max_abs_diff(&psi.projector()) < 1e-8);
    }

    #[test]
    fn loss_identity_and_cat_cross_terms() {
        let alpha = 2.0;
        let cat = CoherentMix::cat(alpha, Parity::Even).unwrap();
        assert!(cat.loss(1.0).unwrap().max_abs_diff(&cat) < 1e-15);
        let tau = 0.999;
        let lossy = cat.loss(tau).unwrap();
        let scale = (-2.0 * (1.0 - tau) * alpha * alpha).exp();
        assert_abs_diff_eq!((lossy.coeff(0, 1) - cat.coeff(0, 1) * scale).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((lossy.coeff(0, 0) - cat.coeff(0, 0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lossy.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn loss_matches_fock_channel() {
        let alpha = 2.0;
        let dim = truncation_for(alpha);
        let lossy = CoherentMix::cat(alpha, Parity::Even).unwrap().loss(0.9).unwrap();
        let fock = loss_fock(&cat_fock(alpha, Parity::Even, dim).unwrap(), 0.9).unwrap();
        assert!(lossy.to_fock(dim).unwrap().max_abs_diff(&fock) < 1e-7);
    }

    #[test]
    fn cat_fidelities() {
        let alpha = 1.3;
        let even = CoherentMix::cat(alpha, Parity::Even).unwrap();
        let odd = CoherentMix::cat(alpha, Parity::Odd).unwrap();
        assert_abs_diff_eq!(even.fidelity_with_cat(alpha, Parity::Even), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(odd.fidelity_with_cat(alpha, Parity::Even), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn to_fock_basics() {
        let vac = CoherentMix::vacuum().to_fock(10).unwrap();
        assert!(vac.max_abs_diff(&FockVector::vacuum(10).projector()) < 1e-15);
        let cat = CoherentMix::cat(1.0, Parity::Even).unwrap().to_fock(40).unwrap();
        assert!(cat.max_abs_diff(&cat_fock(1.0, Parity::Even, 40).unwrap().projector()) < 1e-10);
    }

    #[test]
    fn gram_is_psd() {
        let m = CoherentMix::cat(0.2, Parity::Even).unwrap().displace(c(0.0, 0.1));
        assert!(m.gram_min_eigenvalue() > -1e-12);
    }
}
