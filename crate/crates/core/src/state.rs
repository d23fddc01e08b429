//! A single handle over the three state representations.

use crate::coherent::CoherentMix;
use crate::error::Result;
use crate::fock::{truncation_for, FockMatrix, FockVector, Parity};

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(FockVector),
    Mixed(FockMatrix),
    Coherent(CoherentMix),
}

impl From<FockVector> for State {
    fn from(v: FockVector) -> Self {
        State::Pure(v)
    }
}

impl From<FockMatrix> for State {
    fn from(m: FockMatrix) -> Self {
        State::Mixed(m)
    }
}

impl From<CoherentMix> for State {
    fn from(m: CoherentMix) -> Self {
        State::Coherent(m)
    }
}

impl State {
    /// Number-basis density matrix; coherent mixtures use the standard truncation rule.
    pub fn to_fock_matrix(&self) -> Result<FockMatrix> {
        match self {
            State::Pure(v) => Ok(v.projector()),
            State::Mixed(m) => Ok(m.clone()),
            State::Coherent(m) => m.to_fock(truncation_for(m.max_amplitude())),
        }
    }

    /// `<cat|rho|cat>`.
    pub fn fidelity_with_cat(&self, alpha: f64, parity: Parity) -> Result<f64> {
        match self {
            State::Coherent(m) => Ok(m.fidelity_with_cat(alpha, parity)),
            State::Pure(v) => {
                let cat = crate::fock::cat_fock(alpha, parity, v.dim().max(truncation_for(alpha)))?;
                Ok(cat.fidelity(v))
            }
            State::Mixed(m) => {
                let cat = crate::fock::cat_fock(alpha, parity, m.dim().max(truncation_for(alpha)))?;
                Ok(m.expectation(&cat))
            }
        }
    }

    pub fn wigner(&self, x: f64, y: f64) -> f64 {
        match self {
            State::Pure(v) => crate::phasespace::wigner_pure(v, x, y),
            State::Mixed(m) => crate::phasespace::wigner_fock(m, x, y),
            State::Coherent(m) => crate::phasespace::wigner_mix(m, x, y),
        }
    }

    pub fn homodyne(&self) -> crate::phasespace::HomodyneProfile {
        crate::phasespace::HomodyneProfile::new(self)
    }
}
