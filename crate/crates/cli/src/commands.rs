use catforge_core::dispersive::{ideal_mixture, optimize_gamma, probabilistic_protocol};
use catforge_core::fock::loss_fock;
use catforge_core::gp::{gp_optimize, gp_optimize_curve, gp_state, GpFamily, GpOptimizeConfig, GpOptimum};
use catforge_core::metrology::{homodyne_fisher, min_resolvable, FisherReport};
use catforge_core::phasespace::{distillable_variance, Axis, PhaseGrid};
use catforge_core::{Parity, State};
use rayon::prelude::*;

use crate::cli::{
    Command, FidelityCurveArgs, FisherArgs, GpOptimizeArgs, HomodyneArgs, Protocol, SweepArgs, WignerCutArgs,
};
use crate::error::CliError;
use crate::grid::Grid;
use crate::report::{Column, Table};
use crate::state_spec::{StateOptions, StateSpec};

const AMPLITUDE: &str = "canonical amplitude";
const UNITLESS: &str = "dimensionless";
const PROBABILITY: &str = "probability";

pub fn run(command: &Command) -> Result<Table, CliError> {
    match command {
        Command::FidelityCurve(a) => fidelity_curve(a),
        Command::GpOptimize(a) => gp_single(a),
        Command::WignerCut(a) => wigner_cut(a),
        Command::Homodyne(a) => homodyne(a),
        Command::Distill(a) => distill(a),
        Command::Fisher(a) => fisher(a),
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn amplitudes(grid: &Grid) -> Result<Vec<f64>, CliError> {
    if grid.lo <= 0.0 {
        return usage("amplitudes must be positive");
    }
    Ok(grid.points())
}

/// Evaluates `f` at every point in parallel, keeping grid order.
fn per_point<F>(points: &[f64], f: F) -> Result<Vec<Vec<f64>>, CliError>
where
    F: Fn(f64) -> Result<Vec<f64>, CliError> + Sync,
{
    points.par_iter().map(|&p| f(p)).collect()
}

fn gp_family(p: Protocol) -> Option<GpFamily> {
    match p {
        Protocol::Gp => Some(GpFamily::General),
        Protocol::Ps => Some(GpFamily::Subtraction),
        Protocol::Pa => Some(GpFamily::Addition),
        Protocol::Dispersive | Protocol::DispersiveProb => None,
    }
}

fn gp_lossy_fidelity(opt: &GpOptimum, tau: Option<f64>) -> Result<f64, CliError> {
    let Some(tau) = tau else { return Ok(opt.fidelity) };
    let (psi, _) = gp_state(&opt.params, opt.alpha)?;
    Ok(State::Mixed(loss_fock(&psi, tau)?).fidelity_with_cat(opt.alpha, Parity::Even)?)
}

fn fidelity_curve(a: &FidelityCurveArgs) -> Result<Table, CliError> {
    let alphas = amplitudes(&a.alpha_grid)?;
    if a.tau.is_some_and(|t| !(0.0..=1.0).contains(&t)) {
        return usage("--tau must lie in [0, 1]");
    }
    if a.target_fidelity.is_some() && a.protocol != Protocol::DispersiveProb {
        return usage("--target-fidelity applies only to dispersive-prob");
    }
    if a.tau.is_some() && a.protocol == Protocol::DispersiveProb {
        return usage("--tau is not available for dispersive-prob");
    }
    let config = GpOptimizeConfig { seed: a.seed, ..GpOptimizeConfig::default() };
    let rows = match (a.protocol, gp_family(a.protocol)) {
        (_, Some(family)) => gp_optimize_curve(&alphas, a.n, family, &config)?
            .iter()
            .map(|opt| Ok(vec![opt.alpha, gp_lossy_fidelity(opt, a.tau)?, opt.probability]))
            .collect::<Result<_, CliError>>()?,
        (Protocol::Dispersive, None) => per_point(&alphas, |alpha| {
            let g = optimize_gamma(alpha)?;
            let f = match a.tau {
                None => g.fidelity,
                Some(tau) => ideal_mixture(alpha, g.gamma)?.loss(tau)?.fidelity_with_cat(alpha, Parity::Even),
            };
            Ok(vec![alpha, f, 1.0])
        })?,
        _ => {
            let targets = match a.target_fidelity {
                Some(t) => vec![t; alphas.len()],
                None => {
                    gp_optimize_curve(&alphas, a.n, GpFamily::General, &config)?.iter().map(|o| o.fidelity).collect()
                }
            };
            let pairs: Vec<(f64, f64)> = alphas.iter().copied().zip(targets).collect();
            pairs
                .par_iter()
                .map(|&(alpha, target)| {
                    let out = probabilistic_protocol(alpha, target)?;
                    Ok(vec![alpha, out.fidelity, out.probability])
                })
                .collect::<Result<_, CliError>>()?
        }
    };
    Table::new(vec![Column::new("alpha", AMPLITUDE), Column::new("F", UNITLESS), Column::new("P", PROBABILITY)], rows)
}

fn gp_single(a: &GpOptimizeArgs) -> Result<Table, CliError> {
    if !(a.alpha > 0.0) {
        return usage("--alpha must be positive");
    }
    let config = GpOptimizeConfig { seed: a.seed, ..GpOptimizeConfig::default() };
    let opt = gp_optimize(a.alpha, a.n, a.family.into(), &config, None)?;
    let p = opt.params;
    let columns = vec![
        Column::new("alpha", AMPLITUDE),
        Column::new("r1", UNITLESS),
        Column::new("r2", UNITLESS),
        Column::new("r3", UNITLESS),
        Column::new("T", UNITLESS),
        Column::new("beta", AMPLITUDE),
        Column::new("F", UNITLESS),
        Column::new("P", PROBABILITY),
    ];
    Table::new(columns, vec![vec![a.alpha, p.r1, p.r2, p.r3, p.t, p.beta, opt.fidelity, opt.probability]])
}

fn prepared(spec: StateSpec, opts: &StateOptions, alpha: f64) -> Result<State, CliError> {
    if !(alpha > 0.0) {
        return usage("--alpha must be positive");
    }
    opts.check(spec)?;
    opts.prepare(spec, alpha)
}

fn wigner_cut(a: &WignerCutArgs) -> Result<Table, CliError> {
    let state = prepared(a.state, &a.opts, a.alpha)?;
    let cut = PhaseGrid::wigner_cut(&state, Axis::Y, &a.ygrid.points(), a.x);
    let rows = cut.points.iter().zip(&cut.values).map(|(&y, &w)| vec![y, w]).collect();
    Table::new(vec![Column::new("y", "canonical"), Column::new("W", "1/canonical^2")], rows)
}

fn homodyne(a: &HomodyneArgs) -> Result<Table, CliError> {
    let state = prepared(a.state, &a.opts, a.alpha)?;
    let profile = state.homodyne();
    let rows = a.ygrid.points().par_iter().map(|&y| vec![y, profile.pdf(y)]).collect();
    Table::new(vec![Column::new("y", "canonical"), Column::new("p", "1/canonical")], rows)
}

fn distill(a: &SweepArgs) -> Result<Table, CliError> {
    a.opts.check(a.state)?;
    let rows = per_point(&amplitudes(&a.alpha_grid)?, |alpha| {
        let state = a.opts.prepare(a.state, alpha)?;
        Ok(vec![alpha, distillable_variance(&state.homodyne())?.variance])
    })?;
    Table::new(vec![Column::new("alpha", AMPLITUDE), Column::new("V", "canonical^2")], rows)
}

fn fisher(a: &FisherArgs) -> Result<Table, CliError> {
    let s = &a.sweep;
    s.opts.check(s.state)?;
    let rows = per_point(&amplitudes(&s.alpha_grid)?, |alpha| {
        let state = s.opts.prepare(s.state, alpha)?;
        if a.qfi {
            let r = FisherReport::for_state(&state)?;
            Ok(vec![alpha, r.eps_min, r.eps_tilde_min])
        } else {
            Ok(vec![alpha, min_resolvable(homodyne_fisher(&state.homodyne())?)?])
        }
    })?;
    let mut columns = vec![Column::new("alpha", AMPLITUDE), Column::new("eps_min", "canonical")];
    if a.qfi {
        columns.push(Column::new("eps_tilde_min", "canonical"));
    }
    Table::new(columns, rows)
}
