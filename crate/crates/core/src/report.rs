//! Summary figures of merit for one prepared state.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::Parity;
use crate::metrology::FisherReport;
use crate::phasespace::{distillable_variance, find_wigner_min, DistillableReport, WignerMinimum};
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub alpha: f64,
    pub fidelity: f64,
    pub probability: f64,
    pub wigner_min: WignerMinimum,
    pub distillable: DistillableReport,
    pub fisher: FisherReport,
}

impl ProtocolReport {
    /// Evaluates every figure of merit against the even cat of amplitude `alpha`.
    pub fn evaluate(state: &State, alpha: f64, probability: f64) -> Result<Self> {
        Ok(Self {
            alpha,
            fidelity: state.fidelity_with_cat(alpha, Parity::Even)?,
            probability,
            wigner_min: find_wigner_min(state, alpha)?,
            distillable: distillable_variance(&state.homodyne())?,
            fisher: FisherReport::for_state(state)?,
        })
    }
}
