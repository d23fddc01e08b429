//! Numerics for optical cat-state generation: heralded Gaussian breeding and
//! feedforward dispersive preparation, with loss and noise models,
//! phase-space diagnostics and homodyne metrology.

pub mod coherent;
pub mod dispersive;
pub mod error;
pub mod fock;
pub mod gp;
pub mod metrology;
pub mod optimizer;
pub mod phasespace;
pub mod quad;
pub mod report;
pub mod state;

pub use coherent::CoherentMix;
pub use error::{Error, Result};
pub use fock::{FockMatrix, FockVector, Parity};
pub use gp::{GpFamily, GpParams};
pub use report::ProtocolReport;
pub use state::State;
