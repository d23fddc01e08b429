//! Sensitivity to a small displacement `D(i eps) = exp(i sqrt(2) eps x)`
//! read out by homodyne detection of `y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockMatrix, FockVector};
use crate::phasespace::HomodyneProfile;
use crate::quad::integrate;
use crate::state::State;

/// Classical Fisher information `F = 2 int p'(y)^2 / p(y) dy`.
pub fn homodyne_fisher(profile: &HomodyneProfile) -> Result<f64> {
    let l = profile.extent();
    let norm = integrate(|y| profile.pdf(y), -l, l, 64, 1e-12, 1e-14).value;
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(norm));
    }
    let integrand = |y: f64| {
        let s = profile.sample(y);
        if s.p < 1e-300 {
            return 0.0;
        }
        // Cauchy-Schwarz caps the ratio where p underflows relative to p'
        let ratio = (s.dp * s.dp / s.p).min(profile.score_bound(y));
        2.0 * ratio
    };
    Ok(integrate(integrand, -l, l, 128, 1e-10, 1e-13).value)
}

/// `x` quadrature in the number basis: `<n|x|m> = (sqrt(m) d_{n,m-1} + sqrt(n) d_{m,n-1})/sqrt 2`.
fn x_times(v: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
    let d = v.len();
    (0..d)
        .map(|n| {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            if n + 1 < d {
                acc += v[n + 1] * ((n + 1) as f64).sqrt();
            }
            if n > 0 {
                acc += v[n - 1] * (n as f64).sqrt();
            }
            acc / 2f64.sqrt()
        })
        .collect()
}

/// Quantum Fisher information `4 sum_{nm} (r_n - r_m)^2/(r_n + r_m) |<n|x|m>|^2`.
///
/// The matrix is padded by two levels so that `x` applied to the support stays
/// inside the space. Pairs with `r_n + r_m <= 1e-12` are dropped.
pub fn qfi_displacement(rho: &FockMatrix) -> Result<f64> {
    let padded = rho.resized(rho.dim() + 2);
    let (values, vectors) = padded.eigen();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-8 {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
    }
    let values: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
    let xv: Vec<Vec<_>> = vectors.iter().map(|v| x_times(v.amps())).collect();
    let mut h = 0.0;
    for (n, vn) in vectors.iter().enumerate() {
        for (m, xm) in xv.iter().enumerate() {
            let (rn, rm) = (values[n], values[m]);
            if rn + rm <= 1e-12 || rn == rm {
                continue;
            }
            let elem: num_complex::Complex64 = vn.amps().iter().zip(xm).map(|(a, b)| a.conj() * b).sum();
            h += (rn - rm).powi(2) / (rn + rm) * elem.norm_sqr();
        }
    }
    Ok(4.0 * h)
}

/// `8 Var(x)` for a pure state.
pub fn qfi_pure(psi: &FockVector) -> f64 {
    let mut padded = psi.amps().to_vec();
    padded.extend([num_complex::Complex64::new(0.0, 0.0); 2]);
    let xv = x_times(&padded);
    let mean: f64 = padded.iter().zip(&xv).map(|(a, b)| (a.conj() * b).re).sum();
    let second: f64 = xv.iter().map(|b| b.norm_sqr()).sum();
    8.0 * (second - mean * mean)
}

/// `1/sqrt(F)`.
pub fn min_resolvable(information: f64) -> Result<f64> {
    if !(information > 0.0) {
        return Err(Error::OutOfRange(format!("information must be positive, got {information}")));
    }
    Ok(1.0 / information.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    pub fisher: f64,
    pub qfi: f64,
    pub eps_min: f64,
    pub eps_tilde_min: f64,
}

impl FisherReport {
    pub fn for_state(state: &State) -> Result<Self> {
        let fisher = homodyne_fisher(&state.homodyne())?;
        let qfi = match state {
            State::Pure(v) => qfi_pure(v),
            _ => qfi_displacement(&state.to_fock_matrix()?)?,
        };
        Ok(Self { fisher, qfi, eps_min: min_resolvable(fisher)?, eps_tilde_min: min_resolvable(qfi)? })
    }
}
