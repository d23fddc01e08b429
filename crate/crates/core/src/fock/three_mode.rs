//! Brute-force simulation of the three-mode heralding circuit.
//!
//! Every unitary is applied as the exponential of its explicitly constructed
//! generator (scaled Taylor series), so this path shares nothing with the
//! closed-form Kraus-operator pipeline in `gp` and serves as its oracle.

use num_complex::Complex64 as C64;

use super::{squeezed_vacuum_fock, FockVector};
use crate::error::{Error, Result};
use crate::gp::GpParams;

/// Tail mass tolerated in any single-mode marginal of the oracle state.
const ORACLE_TAIL_LIMIT: f64 = 1e-6;
/// Smallest per-mode truncation accepted by the oracle.
pub const ORACLE_MIN_DIM: usize = 18;

/// Dense amplitude tensor over modes (a, b, c), row-major with c fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeModeState {
    dims: [usize; 3],
    amps: Vec<C64>,
}

impl ThreeModeState {
    pub fn product(a: &FockVector, b: &FockVector, c: &FockVector) -> Self {
        let dims = [a.dim(), b.dim(), c.dim()];
        let mut amps = Vec::with_capacity(dims.iter().product());
        for x in a.amps() {
            for y in b.amps() {
                for z in c.amps() {
                    amps.push(x * y * z);
                }
            }
        }
        Self { dims, amps }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn strides(&self) -> [usize; 3] {
        [self.dims[1] * self.dims[2], self.dims[2], 1]
    }

    fn index_of(&self, flat: usize) -> [usize; 3] {
        let s = self.strides();
        [flat / s[0], (flat / s[1]) % self.dims[1], flat % self.dims[2]]
    }

    /// `exp[angle (m1^dag m2 - m1 m2^dag)]`.
    pub fn apply_beam_splitter(&mut self, m1: usize, m2: usize, angle: f64) {
        assert!(m1 < 3 && m2 < 3 && m1 != m2);
        let dims = self.dims;
        let strides = self.strides();
        let bound = angle.abs() * dims[m1].max(dims[m2]) as f64;
        let generator = |src: &[C64], dst: &mut [C64]| {
            for (flat, out) in dst.iter_mut().enumerate() {
                let idx = self_index(flat, &strides, &dims);
                let (i1, i2) = (idx[m1], idx[m2]);
                let mut acc = C64::new(0.0, 0.0);
                // m1^dag m2: takes |i1 - 1, i2 + 1>
                if i1 > 0 && i2 + 1 < dims[m2] {
                    let from = flat - strides[m1] + strides[m2];
                    acc += src[from] * ((i1 as f64) * ((i2 + 1) as f64)).sqrt();
                }
                // m1 m2^dag: takes |i1 + 1, i2 - 1>
                if i2 > 0 && i1 + 1 < dims[m1] {
                    let from = flat + strides[m1] - strides[m2];
                    acc -= src[from] * (((i1 + 1) as f64) * (i2 as f64)).sqrt();
                }
                *out = acc * angle;
            }
        };
        self.apply_exp(generator, bound);
    }

    /// `D_m(beta) = exp[beta m^dag - conj(beta) m]`.
    pub fn apply_displacement(&mut self, mode: usize, beta: C64) {
        assert!(mode < 3);
        let dims = self.dims;
        let strides = self.strides();
        let bound = beta.norm() * 2.0 * (dims[mode] as f64).sqrt();
        let generator = |src: &[C64], dst: &mut [C64]| {
            for (flat, out) in dst.iter_mut().enumerate() {
                let i = self_index(flat, &strides, &dims)[mode];
                let mut acc = C64::new(0.0, 0.0);
                if i > 0 {
                    acc += beta * src[flat - strides[mode]] * (i as f64).sqrt();
                }
                if i + 1 < dims[mode] {
                    acc -= beta.conj() * src[flat + strides[mode]] * ((i + 1) as f64).sqrt();
                }
                *out = acc;
            }
        };
        self.apply_exp(generator, bound);
    }

    /// `exp(G)` by scaling and a Taylor series per step, stopping once the
    /// relative size of a term drops below 1e-14.
    fn apply_exp<G: Fn(&[C64], &mut [C64])>(&mut self, generator: G, norm_bound: f64) {
        let steps = norm_bound.ceil().max(1.0) as usize;
        let scale = 1.0 / steps as f64;
        let len = self.amps.len();
        let mut term = vec![C64::new(0.0, 0.0); len];
        let mut next = vec![C64::new(0.0, 0.0); len];
        for _ in 0..steps {
            let mut acc = self.amps.clone();
            term.copy_from_slice(&self.amps);
            let base = norm(&acc);
            for k in 1..200 {
                generator(&term, &mut next);
                let s = scale / k as f64;
                next.iter_mut().for_each(|x| *x *= s);
                std::mem::swap(&mut term, &mut next);
                acc.iter_mut().zip(term.iter()).for_each(|(a, t)| *a += t);
                if norm(&term) < 1e-14 * base {
                    break;
                }
            }
            self.amps = acc;
        }
    }

    /// Mass in the top tenth of the levels of one mode's marginal.
    pub fn marginal_tail_mass(&self, mode: usize) -> f64 {
        let n_max = (self.dims[mode] - 1) as f64;
        let total = self.norm_sqr();
        self.amps
            .iter()
            .enumerate()
            .filter(|(flat, _)| self.index_of(*flat)[mode] as f64 > 0.9 * n_max)
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            / total
    }

    /// Unnormalized state of mode a after projecting b and c onto `|nb>|nc>`.
    pub fn project_bc(&self, nb: usize, nc: usize) -> FockVector {
        let s = self.strides();
        let amps = (0..self.dims[0]).map(|i| self.amps[i * s[0] + nb * s[1] + nc]).collect();
        FockVector::new(amps)
    }
}

fn self_index(flat: usize, strides: &[usize; 3], dims: &[usize; 3]) -> [usize; 3] {
    [flat / strides[0], (flat / strides[1]) % dims[1], flat % dims[2]]
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Unnormalized heralded signal and the herald probability.
#[derive(Debug, Clone)]
pub struct ThreeModeHerald {
    pub residual: FockVector,
    pub probability: f64,
}

impl ThreeModeHerald {
    pub fn state(&self) -> Result<FockVector> {
        self.residual.clone().normalized()
    }
}

/// Simulates the full circuit in a `dim^3` tensor and heralds `|n>_b |n>_c`.
pub fn brute_force_three_mode(params: &GpParams, dim: usize) -> Result<ThreeModeHerald> {
    let n = params.n;
    if !(1..=3).contains(&n) {
        return Err(Error::UnsupportedOrder(n));
    }
    if dim < ORACLE_MIN_DIM {
        return Err(Error::OutOfRange(format!("oracle needs at least {ORACLE_MIN_DIM} levels per mode, got {dim}")));
    }
    if !(params.t > 0.0 && params.t <= 1.0) {
        return Err(Error::OutOfRange(format!("transmissivity {} outside (0, 1]", params.t)));
    }
    let a = squeezed_vacuum_fock(params.r1, dim)?;
    let b = squeezed_vacuum_fock(params.r2, dim)?;
    let c = squeezed_vacuum_fock(params.r3, dim)?;
    let mut state = ThreeModeState::product(&a, &b, &c);

    state.apply_beam_splitter(0, 1, params.t.sqrt().acos());
    state.apply_beam_splitter(2, 1, std::f64::consts::FRAC_PI_4);
    state.apply_displacement(1, C64::new(0.0, -params.beta));
    state.apply_displacement(2, C64::new(0.0, params.beta));

    for mode in 0..3 {
        let tail_mass = state.marginal_tail_mass(mode);
        if tail_mass > ORACLE_TAIL_LIMIT {
            return Err(Error::TruncationTooSmall { dim, tail_mass, limit: ORACLE_TAIL_LIMIT });
        }
    }
    let residual = state.project_bc(n, n);
    let probability = residual.norm_sqr() / state.norm_sqr();
    Ok(ThreeModeHerald { residual, probability })
}
