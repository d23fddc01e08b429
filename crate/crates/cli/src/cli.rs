use std::path::PathBuf;

use catforge_core::GpFamily;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::grid::Grid;
use crate::state_spec::{StateOptions, StateSpec};

/// Cat-state preparation sweeps: fidelities, phase-space cuts, homodyne statistics and sensitivity.
#[derive(Debug, Parser)]
#[command(name = "catforge", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit a JSON report instead of CSV
    #[arg(long, global = true)]
    pub json: bool,
    /// Write to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Optimized fidelity and success rate along an amplitude grid
    FidelityCurve(FidelityCurveArgs),
    /// Optimized Gaussian-breeding circuit parameters at one amplitude
    GpOptimize(GpOptimizeArgs),
    /// Wigner function along the y axis
    WignerCut(WignerCutArgs),
    /// Homodyne density of the y quadrature
    Homodyne(HomodyneArgs),
    /// Distillable-squeezing variance along an amplitude grid
    Distill(SweepArgs),
    /// Minimum resolvable displacement along an amplitude grid
    Fisher(FisherArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    Gp,
    Ps,
    Pa,
    Dispersive,
    DispersiveProb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    General,
    Subtraction,
    Addition,
}

impl From<Family> for GpFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::General => GpFamily::General,
            Family::Subtraction => GpFamily::Subtraction,
            Family::Addition => GpFamily::Addition,
        }
    }
}

fn order(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n @ 1..=3) => Ok(n),
        _ => Err(format!("'{s}' is not one of 1, 2, 3")),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct FidelityCurveArgs {
    #[arg(long, value_enum)]
    pub protocol: Protocol,
    /// Herald order (2n photons)
    #[arg(long, default_value_t = 1, value_parser = order)]
    pub n: usize,
    /// Target amplitudes as lo:hi:count
    #[arg(long, value_name = "LO:HI:COUNT")]
    pub alpha_grid: Grid,
    /// Output transmissivity of a pure-loss channel
    #[arg(long)]
    pub tau: Option<f64>,
    /// Fidelity floor for dispersive-prob (default: the optimized gp fidelity at the same order)
    #[arg(long)]
    pub target_fidelity: Option<f64>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct GpOptimizeArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1, value_parser = order)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Family::General)]
    pub family: Family,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct WignerCutArgs {
    #[arg(long, value_name = "SPEC")]
    pub state: StateSpec,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, value_name = "LO:HI:COUNT", allow_hyphen_values = true)]
    pub ygrid: Grid,
    /// Fixed x coordinate of the cut
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub opts: StateOptions,
}

#[derive(Debug, Args, Serialize)]
pub struct HomodyneArgs {
    #[arg(long, value_name = "SPEC")]
    pub state: StateSpec,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, value_name = "LO:HI:COUNT", allow_hyphen_values = true)]
    pub ygrid: Grid,
    #[command(flatten)]
    #[serde(flatten)]
    pub opts: StateOptions,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_name = "SPEC")]
    pub state: StateSpec,
    #[arg(long, value_name = "LO:HI:COUNT")]
    pub alpha_grid: Grid,
    #[command(flatten)]
    #[serde(flatten)]
    pub opts: StateOptions,
}

#[derive(Debug, Args, Serialize)]
pub struct FisherArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sweep: SweepArgs,
    /// Also report the quantum bound
    #[arg(long)]
    pub qfi: bool,
}
