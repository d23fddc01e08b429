//! Feedforward dispersive cat preparation.
//!
//! A coherent state interacts dispersively with a qubit, the qubit is measured,
//! and on the odd outcome the field is displaced by `+-i gamma` with equal
//! probability. Every output is an exact [`CoherentMix`]; noise models only
//! change the conditional states and outcome probabilities.

mod asymptotic;

pub use asymptotic::{asymptotic_reference, AsymptoticKind};

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::coherent::CoherentMix;
use crate::error::{Error, Result};
use crate::fock::Parity;
use crate::optimizer::{golden_section_max, maximize_constrained, scan_then_refine, OptimizeSpec};

/// Even and odd outcome probabilities `(1 +- e^{-2 alpha^2})/2`.
pub fn outcome_probabilities(alpha: f64) -> (f64, f64) {
    let e = (-2.0 * alpha * alpha).exp();
    (0.5 * (1.0 + e), -0.5 * (-2.0 * alpha * alpha).exp_m1())
}

/// Protocol settings: target amplitude, feedforward displacement, keep probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersiveConfig {
    pub alpha: f64,
    pub gamma: f64,
    /// Probability of keeping (and correcting) the odd outcome; 1 is deterministic.
    pub q: f64,
}

impl DispersiveConfig {
    pub fn new(alpha: f64, gamma: f64, q: f64) -> Result<Self> {
        if !(alpha >= 0.0 && gamma >= 0.0 && (0.0..=1.0).contains(&q)) {
            return Err(Error::OutOfRange(format!("invalid protocol settings alpha={alpha} gamma={gamma} q={q}")));
        }
        Ok(Self { alpha, gamma, q })
    }

    /// `p_+ + q p_-`.
    pub fn success_probability(&self) -> f64 {
        let (pp, pm) = outcome_probabilities(self.alpha);
        pp + self.q * pm
    }

    /// Fidelity of the kept output, `[p_+ + q p_- G(gamma)] / (p_+ + q p_-)`.
    pub fn fidelity(&self) -> f64 {
        let (pp, pm) = outcome_probabilities(self.alpha);
        (pp + self.q * pm * odd_branch_overlap(self.alpha, self.gamma)) / (pp + self.q * pm)
    }
}

/// `<cat_+| rho_odd(gamma) |cat_+>` for the symmetrized displaced odd cat.
fn odd_branch_overlap(alpha: f64, gamma: f64) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    // [1 + coth(2 alpha^2)] p_- / p_- folded into 2/(1 - e^{-4 alpha^2})
    let e4 = (-4.0 * alpha * alpha).exp_m1();
    (-gamma * gamma).exp() * (2.0 * alpha * gamma).sin().powi(2) / (-e4)
}

/// Closed form `F_D(gamma) = p_+ + p_- [1 + coth 2a^2] e^{-gamma^2} sin^2(2 a gamma) / 2`.
pub fn ideal_fidelity(alpha: f64, gamma: f64) -> f64 {
    let (pp, pm) = outcome_probabilities(alpha);
    pp + pm * odd_branch_overlap(alpha, gamma)
}

/// `rho_D(gamma) = p_+ |cat_+><cat_+| + (p_-/2) sum_+- D(+-i gamma)|cat_-><cat_-|D^dag`.
pub fn ideal_mixture(alpha: f64, gamma: f64) -> Result<CoherentMix> {
    if !(alpha >= 0.0 && gamma >= 0.0) {
        return Err(Error::OutOfRange(format!("alpha={alpha}, gamma={gamma} must be >= 0")));
    }
    let (pp, pm) = outcome_probabilities(alpha);
    let even = CoherentMix::cat(alpha, Parity::Even)?;
    if pm == 0.0 {
        return Ok(even);
    }
    let odd = CoherentMix::cat(alpha, Parity::Odd)?;
    feedforward(pp, &even, pm, &odd, gamma)
}

/// `p_+ s_+ + (p_-/2) sum_+- D(+-i gamma) s_- D^dag`.
fn feedforward(pp: f64, even: &CoherentMix, pm: f64, odd: &CoherentMix, gamma: f64) -> Result<CoherentMix> {
    let up = odd.displace(C64::new(0.0, gamma));
    let down = odd.displace(C64::new(0.0, -gamma));
    CoherentMix::mixture(&[(pp, even), (0.5 * pm, &up), (0.5 * pm, &down)])
}

/// Optimal displacement and the resulting fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaOptimum {
    pub gamma: f64,
    pub fidelity: f64,
}

/// Maximizes the closed-form fidelity over `gamma in (0, pi/(2 alpha)]`.
pub fn optimize_gamma(alpha: f64) -> Result<GammaOptimum> {
    if !(alpha > 0.0) {
        return Err(Error::OutOfRange(format!("amplitude must be positive, got {alpha}")));
    }
    let (gamma, fidelity) = golden_section_max(|g| ideal_fidelity(alpha, g), 0.0, PI / (2.0 * alpha), 1e-10);
    Ok(GammaOptimum { gamma, fidelity })
}

/// Outcome of the probabilistic variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilisticOutcome {
    pub q: f64,
    pub gamma: f64,
    pub fidelity: f64,
    pub probability: f64,
}

/// Largest success rate `p_+ + q p_-` whose fidelity still reaches `f_target`.
///
/// Solved numerically as a constrained maximization over `(q, gamma)`; the
/// objective carries a small fidelity term so that `gamma` is pinned when the
/// constraint is slack at `q = 1`.
pub fn probabilistic_protocol(alpha: f64, f_target: f64) -> Result<ProbabilisticOutcome> {
    if !(alpha > 0.0) {
        return Err(Error::OutOfRange(format!("amplitude must be positive, got {alpha}")));
    }
    if !(f_target <= 1.0) {
        return Err(Error::OutOfRange(format!("target fidelity {f_target} above 1")));
    }
    let fid = |x: &[f64]| DispersiveConfig { alpha, gamma: x[1], q: x[0] }.fidelity();
    let objective = |x: &[f64]| x[0] + 1e-3 * fid(x);
    let constraint = |x: &[f64]| fid(x) - f_target;
    // q = 0 keeps only the even outcome, which is the exact target
    debug_assert!(constraint(&[0.0, 0.0]) >= -1e-12);
    let warm = optimize_gamma(alpha)?.gamma;
    let spec = OptimizeSpec::new(&objective, vec![(0.0, 1.0), (0.0, PI / (2.0 * alpha))])
        .restarts(4)
        .seed(11)
        .warm_start(Some(vec![0.5, warm]));
    let best = maximize_constrained(&spec, &constraint)?;
    let cfg = DispersiveConfig::new(alpha, best.argmax[1], best.argmax[0])?;
    Ok(ProbabilisticOutcome {
        q: cfg.q,
        gamma: cfg.gamma,
        fidelity: cfg.fidelity(),
        probability: cfg.success_probability(),
    })
}

/// Imperfect qubit-cavity coupling: cooperativity `C` and escape efficiency `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImperfectCoupling {
    pub cooperativity: f64,
    pub eta: f64,
}

impl ImperfectCoupling {
    /// Requires `C > 0` and `eta in (1/2, 1]`.
    pub fn new(cooperativity: f64, eta: f64) -> Result<Self> {
        if !(cooperativity > 0.0) {
            return Err(Error::OutOfRange(format!("cooperativity must be positive, got {cooperativity}")));
        }
        if !(eta > 0.5 && eta <= 1.0) {
            return Err(Error::OutOfRange(format!("escape efficiency {eta} outside (1/2, 1]")));
        }
        Ok(Self { cooperativity, eta })
    }

    /// `(1 - 2 eta/(1 + 4C))^2`
    pub fn eta_g(&self) -> f64 {
        (1.0 - 2.0 * self.eta / (1.0 + 4.0 * self.cooperativity)).powi(2)
    }

    /// `(1 - 2 eta)^2`
    pub fn eta_e(&self) -> f64 {
        (1.0 - 2.0 * self.eta).powi(2)
    }

    /// `1 - 16 eta C/(1 + 4C)^2`
    pub fn eta_prime(&self) -> f64 {
        1.0 - 16.0 * self.eta * self.cooperativity / (1.0 + 4.0 * self.cooperativity).powi(2)
    }

    /// `2 - eta_g - eta_e + 2 sqrt((1 - eta_e)(eta' - eta_g))`
    pub fn gamma_cap(&self) -> f64 {
        let (g, e) = (self.eta_g(), self.eta_e());
        let inner = ((1.0 - e) * (self.eta_prime() - g)).max(0.0);
        2.0 - g - e + 2.0 * inner.sqrt()
    }
}

/// Conditional output for outcome `parity` and its probability.
pub fn imperfect_conditional(alpha: f64, c: &ImperfectCoupling, parity: Parity) -> Result<(CoherentMix, f64)> {
    let (sg, se) = (c.eta_g().sqrt(), c.eta_e().sqrt());
    let a2 = alpha * alpha;
    let s = parity.sign();
    let cross = (-c.gamma_cap() * a2 / 2.0).exp();
    let p = 0.5 * (1.0 + s * (-(c.gamma_cap() + (sg + se).powi(2)) * a2 / 2.0).exp());
    conditional_pair(C64::new(sg * alpha, 0.0), C64::new(-se * alpha, 0.0), s * cross, p)
}

/// Kets `{b1, b2}` with coefficients `[[1, x], [x, 1]]/(4p)`.
fn conditional_pair(b1: C64, b2: C64, cross: f64, p: f64) -> Result<(CoherentMix, f64)> {
    if !(p > 0.0) {
        return Err(Error::DegenerateInput("conditional outcome has zero probability"));
    }
    let d = C64::new(1.0 / (4.0 * p), 0.0);
    let x = C64::new(cross / (4.0 * p), 0.0);
    Ok((CoherentMix::new(vec![b1, b2], vec![d, x, x, d])?, p))
}

/// Optimized feedforward output for a noise model.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersiveOutcome {
    pub gamma: f64,
    pub fidelity: f64,
    pub state: CoherentMix,
}

fn optimize_feedforward(alpha: f64, build: impl Fn(f64) -> Result<CoherentMix>) -> Result<DispersiveOutcome> {
    if !(alpha > 0.0) {
        return Err(Error::OutOfRange(format!("amplitude must be positive, got {alpha}")));
    }
    let f = |g: f64| build(g).map_or(f64::NEG_INFINITY, |m| m.fidelity_with_cat(alpha, Parity::Even));
    let (gamma, fidelity) = scan_then_refine(f, 0.0, PI / (2.0 * alpha), 64, 1e-10);
    Ok(DispersiveOutcome { gamma, fidelity, state: build(gamma)? })
}

/// Feedforward mixture under imperfect coupling at a fixed displacement.
pub fn imperfect_mixture(alpha: f64, c: &ImperfectCoupling, gamma: f64) -> Result<CoherentMix> {
    let (even, pp) = imperfect_conditional(alpha, c, Parity::Even)?;
    let (odd, pm) = imperfect_conditional(alpha, c, Parity::Odd)?;
    feedforward(pp, &even, pm, &odd, gamma)
}

/// Best feedforward displacement under imperfect coupling.
pub fn imperfect_protocol(alpha: f64, c: &ImperfectCoupling) -> Result<DispersiveOutcome> {
    optimize_feedforward(alpha, |g| imperfect_mixture(alpha, c, g))
}

/// Qubit decoherence between interaction and measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QubitChannel {
    PhaseDamping { lambda: f64 },
    AmplitudeDamping { kappa: f64 },
}

impl QubitChannel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            QubitChannel::PhaseDamping { lambda } if lambda >= 0.0 => Ok(()),
            QubitChannel::AmplitudeDamping { kappa } if (0.0..=1.0).contains(&kappa) => Ok(()),
            other => Err(Error::OutOfRange(format!("invalid qubit channel {other:?}"))),
        }
    }

    /// Coherence suppression `e^{-lambda}` or `sqrt(1 - kappa)`.
    pub fn suppression(&self) -> f64 {
        match *self {
            QubitChannel::PhaseDamping { lambda } => (-lambda).exp(),
            QubitChannel::AmplitudeDamping { kappa } => (1.0 - kappa).sqrt(),
        }
    }
}

/// Feedforward mixture after qubit decoherence at a fixed displacement.
pub fn damped_mixture(alpha: f64, ch: &QubitChannel, gamma: f64) -> Result<CoherentMix> {
    ch.validate()?;
    let s = ch.suppression();
    let a = C64::new(alpha, 0.0);
    let e = (-2.0 * alpha * alpha).exp();
    let (even, pp) = conditional_pair(a, -a, s, 0.5 * (1.0 + s * e))?;
    let pm = 0.5 * (1.0 - s * e);
    if pm <= 0.0 {
        return Ok(even);
    }
    let (odd, _) = conditional_pair(a, -a, -s, pm)?;
    feedforward(pp, &even, pm, &odd, gamma)
}

/// Best feedforward displacement under qubit decoherence.
pub fn qubit_damped_protocol(alpha: f64, ch: &QubitChannel) -> Result<DispersiveOutcome> {
    optimize_feedforward(alpha, |g| damped_mixture(alpha, ch, g))
}

/// Ideal protocol at its optimal displacement followed by pure loss `tau`.
pub fn lossy_output(alpha: f64, tau: f64) -> Result<CoherentMix> {
    let opt = optimize_gamma(alpha)?;
    ideal_mixture(alpha, opt.gamma)?.loss(tau)
}
