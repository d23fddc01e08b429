use std::fmt;
use std::str::FromStr;

use catforge_core::dispersive::{
    ideal_mixture, imperfect_protocol, optimize_gamma, qubit_damped_protocol, ImperfectCoupling, QubitChannel,
};
use catforge_core::fock::loss_fock;
use catforge_core::gp::{gp_optimize, gp_state, GpFamily, GpOptimizeConfig};
use catforge_core::{CoherentMix, Error, Parity, State};
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DispersiveVariant {
    Ideal,
    Imp,
    Pd,
    Ad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum StateSpec {
    TargetCat,
    Gp,
    Dispersive(DispersiveVariant),
}

impl FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "target-cat" => StateSpec::TargetCat,
            "gp" => StateSpec::Gp,
            "dispersive" | "dispersive:ideal" => StateSpec::Dispersive(DispersiveVariant::Ideal),
            "dispersive:imp" => StateSpec::Dispersive(DispersiveVariant::Imp),
            "dispersive:pd" => StateSpec::Dispersive(DispersiveVariant::Pd),
            "dispersive:ad" => StateSpec::Dispersive(DispersiveVariant::Ad),
            _ => return Err(format!("unknown state '{s}' (target-cat | gp | dispersive[:ideal|imp|pd|ad])")),
        })
    }
}

impl From<StateSpec> for String {
    fn from(s: StateSpec) -> Self {
        s.to_string()
    }
}

impl TryFrom<String> for StateSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StateSpec::TargetCat => "target-cat",
            StateSpec::Gp => "gp",
            StateSpec::Dispersive(DispersiveVariant::Ideal) => "dispersive:ideal",
            StateSpec::Dispersive(DispersiveVariant::Imp) => "dispersive:imp",
            StateSpec::Dispersive(DispersiveVariant::Pd) => "dispersive:pd",
            StateSpec::Dispersive(DispersiveVariant::Ad) => "dispersive:ad",
        };
        f.write_str(s)
    }
}

/// Noise and representation settings shared by the state-based subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize, Args)]
pub struct StateOptions {
    /// Output transmissivity of a pure-loss channel
    #[arg(long)]
    pub tau: Option<f64>,
    /// Qubit-cavity cooperativity (dispersive:imp)
    #[arg(long)]
    pub coop: Option<f64>,
    /// Escape efficiency (dispersive:imp)
    #[arg(long)]
    pub eta: Option<f64>,
    /// Qubit phase-damping strength (dispersive:pd)
    #[arg(long)]
    pub pd: Option<f64>,
    /// Qubit amplitude-damping strength (dispersive:ad)
    #[arg(long)]
    pub ad: Option<f64>,
    /// Number-basis truncation override
    #[arg(long)]
    pub fock_dim: Option<usize>,
    /// Herald order of the gp state (2n photons)
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Optimizer seed
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

impl StateOptions {
    /// Rejects flags that do not apply to `spec`.
    pub fn check(&self, spec: StateSpec) -> Result<(), CliError> {
        let usage = |m: &str| Err(CliError::Usage(m.to_string()));
        let is = |v| spec == StateSpec::Dispersive(v);
        if (self.coop.is_some() || self.eta.is_some()) && !is(DispersiveVariant::Imp) {
            return usage("--coop/--eta apply only to dispersive:imp");
        }
        if is(DispersiveVariant::Imp) && (self.coop.is_none() || self.eta.is_none()) {
            return usage("dispersive:imp needs --coop and --eta");
        }
        if self.pd.is_some() != is(DispersiveVariant::Pd) {
            return usage("--pd is required by, and only valid for, dispersive:pd");
        }
        if self.ad.is_some() != is(DispersiveVariant::Ad) {
            return usage("--ad is required by, and only valid for, dispersive:ad");
        }
        if let Some(tau) = self.tau {
            if !(0.0..=1.0).contains(&tau) {
                return usage("--tau must lie in [0, 1]");
            }
        }
        if self.fock_dim.is_some_and(|d| d < 2) {
            return usage("--fock-dim must be at least 2");
        }
        if !(1..=3).contains(&self.n) {
            return usage("--n must be 1, 2 or 3");
        }
        Ok(())
    }

    pub fn gp_config(&self) -> GpOptimizeConfig {
        GpOptimizeConfig { seed: self.seed, ..GpOptimizeConfig::default() }
    }

    pub fn prepare(&self, spec: StateSpec, alpha: f64) -> Result<State, CliError> {
        let state = match spec {
            StateSpec::TargetCat => State::Coherent(CoherentMix::cat(alpha, Parity::Even)?),
            StateSpec::Gp => {
                let opt = gp_optimize(alpha, self.n, GpFamily::General, &self.gp_config(), None)?;
                State::Pure(gp_state(&opt.params, alpha)?.0)
            }
            StateSpec::Dispersive(v) => {
                let mix = match v {
                    DispersiveVariant::Ideal => ideal_mixture(alpha, optimize_gamma(alpha)?.gamma)?,
                    DispersiveVariant::Imp => {
                        let c = ImperfectCoupling::new(self.coop.unwrap_or_default(), self.eta.unwrap_or_default())?;
                        imperfect_protocol(alpha, &c)?.state
                    }
                    DispersiveVariant::Pd => {
                        let ch = QubitChannel::PhaseDamping { lambda: self.pd.unwrap_or_default() };
                        qubit_damped_protocol(alpha, &ch)?.state
                    }
                    DispersiveVariant::Ad => {
                        let ch = QubitChannel::AmplitudeDamping { kappa: self.ad.unwrap_or_default() };
                        qubit_damped_protocol(alpha, &ch)?.state
                    }
                };
                State::Coherent(mix)
            }
        };
        let state = match (state, self.tau) {
            (s, None) => s,
            (State::Coherent(m), Some(tau)) => State::Coherent(m.loss(tau)?),
            (State::Pure(psi), Some(tau)) => State::Mixed(loss_fock(&psi, tau)?),
            (State::Mixed(rho), Some(tau)) => State::Mixed(rho.loss(tau)?),
        };
        let state = match (state, self.fock_dim) {
            (s, None) => s,
            (State::Coherent(m), Some(d)) => State::Mixed(m.to_fock(d)?),
            (State::Pure(psi), Some(d)) => {
                let cut = psi.resized(d);
                kept(d, cut.norm_sqr())?;
                State::Pure(cut.normalized()?)
            }
            (State::Mixed(rho), Some(d)) => {
                let mut cut = rho.resized(d);
                kept(d, cut.trace().re)?;
                cut.renormalize()?;
                State::Mixed(cut)
            }
        };
        Ok(state)
    }
}

fn kept(dim: usize, mass: f64) -> Result<(), Error> {
    const LIMIT: f64 = 1e-8;
    if (1.0 - mass).abs() > LIMIT {
        return Err(Error::TruncationTooSmall { dim, tail_mass: (1.0 - mass).abs(), limit: LIMIT });
    }
    Ok(())
}
