//! Large-amplitude closed forms for the dispersive protocol.
//!
//! These are reference values for tests and reports; protocol outputs are
//! always computed exactly. Wigner-minimum kinds take the evaluation point
//! `y_bar` as their last argument and include the cat term `W_cat(0, y_bar)`.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phasespace::wigner_even_cat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AsymptoticKind {
    /// `(alpha)`
    FDIdeal,
    /// `(alpha, tau)`
    FDLoss,
    /// `(alpha, tau)`
    FPlusLoss,
    /// `(alpha, lambda)`
    FPd,
    /// `(alpha, kappa)`
    FAd,
    /// `(alpha, C, eta)`
    FDImp,
    /// `(alpha, y_bar)`
    WDMin,
    /// `(alpha, tau, y_bar)`, valid for `1 - tau << 1`
    WDMinLoss,
    /// `(alpha, tau, y_bar)`, full expression before the small-loss simplification
    WDMinLossFull,
    /// `(alpha, tau, y_bar)`
    WPlusLoss,
    /// `(alpha, C, eta, y_bar)`
    WImpMin,
    /// `(alpha, lambda, y_bar)`
    WPdMin,
    /// `(alpha, kappa, y_bar)`
    WAdMin,
    /// `(alpha)`
    VD,
    /// `(alpha, C, eta)`
    VImp,
    /// `(alpha, lambda)`
    VPd,
    /// `(alpha, kappa)`
    VAd,
}

const NAMES: [(&str, AsymptoticKind); 17] = [
    ("F_D_ideal", AsymptoticKind::FDIdeal),
    ("F_D_loss", AsymptoticKind::FDLoss),
    ("F_plus_loss", AsymptoticKind::FPlusLoss),
    ("F_pd", AsymptoticKind::FPd),
    ("F_ad", AsymptoticKind::FAd),
    ("F_D_imp", AsymptoticKind::FDImp),
    ("W_D_min", AsymptoticKind::WDMin),
    ("W_D_min_loss", AsymptoticKind::WDMinLoss),
    ("W_D_min_loss_full", AsymptoticKind::WDMinLossFull),
    ("W_plus_loss", AsymptoticKind::WPlusLoss),
    ("W_imp_min", AsymptoticKind::WImpMin),
    ("W_pd_min", AsymptoticKind::WPdMin),
    ("W_ad_min", AsymptoticKind::WAdMin),
    ("V_D", AsymptoticKind::VD),
    ("V_imp", AsymptoticKind::VImp),
    ("V_pd", AsymptoticKind::VPd),
    ("V_ad", AsymptoticKind::VAd),
];

impl FromStr for AsymptoticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NAMES.iter().find(|(name, _)| *name == s).map(|(_, k)| *k).ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

impl AsymptoticKind {
    pub fn name(self) -> &'static str {
        NAMES.iter().find(|(_, k)| *k == self).map(|(n, _)| *n).expect("every kind is named")
    }

    pub fn arity(self) -> usize {
        use AsymptoticKind::*;
        match self {
            FDIdeal | VD => 1,
            FDLoss | FPlusLoss | FPd | FAd | WDMin | VPd | VAd => 2,
            FDImp | WDMinLoss | WDMinLossFull | WPlusLoss | WPdMin | WAdMin | VImp => 3,
            WImpMin => 4,
        }
    }

    pub fn evaluate(self, args: &[f64]) -> Result<f64> {
        use AsymptoticKind::*;
        if args.len() != self.arity() {
            return Err(Error::Arity { kind: self.name().to_string(), expected: self.arity(), got: args.len() });
        }
        let a = args[0];
        let a2 = a * a;
        let ideal = 1.0 - PI * PI / (32.0 * a2);
        let wcat = |y: f64| wigner_even_cat(a, 0.0, y);
        let gap = PI / (8.0 * a2);
        let value = match self {
            FDIdeal => ideal,
            FDLoss => plus_loss(a, args[1]) * ideal,
            FPlusLoss => plus_loss(a, args[1]),
            FPd => 0.5 * (1.0 + (-args[1]).exp()) * ideal,
            FAd => 0.5 * (1.0 + (1.0 - args[1]).sqrt()) * ideal,
            FDImp => {
                let (c, eta) = (args[1], args[2]);
                let e = (-2.0 * a2 * ((2.0 - eta) / (4.0 * c) + 1.0 - eta)).exp();
                0.5 * (1.0 + e) * ideal - PI * PI * (1.0 - eta) / (64.0 * c) * e * (1.0 - PI * PI / (16.0 * a2))
            }
            WDMin => wcat(args[1]) + gap,
            WDMinLoss => {
                let tau = args[1];
                let e = (-2.0 * a2 * (1.0 - tau)).exp();
                wcat(args[2]) + (1.0 - e) / PI + gap * (-2.0 + (2.0 + tau) * e)
            }
            WDMinLossFull => {
                let tau = args[1];
                let st = tau.sqrt();
                let e = (-2.0 * a2 * (1.0 - tau)).exp();
                let (cm, cp, c0) = ((PI * (tau - st)).cos(), (PI * (tau + st)).cos(), (PI * st).cos());
                let first = 2.0 - e * ((cm + cp) / 2.0 - c0);
                let second = -2.0 + e * (((1.0 - st).powi(2) * cm + (1.0 + st).powi(2) * cp) / 2.0 - c0);
                wcat(args[2]) + first / PI + gap * second
            }
            WPlusLoss => wcat(args[2]) + (1.0 - (-2.0 * a2 * (1.0 - args[1])).exp()) / PI,
            WImpMin => {
                let (c, eta) = (args[1], args[2]);
                let s = (-a2 / (2.0 * c)).exp();
                let f1 = 4.0
                    - (-2.0 * a2 * (1.0 - eta + eta / (4.0 * c))).exp()
                    - 3.0 * s * (1.0 - PI * PI * (1.0 - eta) / (2.0 * c));
                let f2 = -2.0 + 3.0 * s * (1.0 - 3.0 * PI * PI * (1.0 - eta) / (4.0 * c));
                wcat(args[3]) + f1 / (2.0 * PI) + gap * f2
            }
            WPdMin => damped_wigner(wcat(args[2]), (-args[1]).exp(), gap),
            WAdMin => damped_wigner(wcat(args[2]), (1.0 - args[1]).sqrt(), gap),
            VD => 1.0 / (4.0 * a2) - 1.0 / (8.0 * a2 * a2),
            VImp => {
                let (c, eta) = (args[1], args[2]);
                let x = 2.0 * a2 * (1.0 - eta + (2.0 - eta) / (4.0 * c));
                if x >= 1.0 {
                    return Err(Error::OutsideValidity(format!("V_imp exponent argument {x:.3} >= 1")));
                }
                let h = 0.5 * (1.0 + x.exp());
                let k = PI * PI * (1.0 - eta);
                (h - k / (16.0 * c)) / (4.0 * a2)
                    - (h * h - (1.0 + PI * PI / 4.0 + x.exp()) * k / (32.0 * c)) / (8.0 * a2 * a2)
            }
            VPd => damped_variance(a2, 0.5 * (1.0 + args[1].exp())),
            VAd => {
                let s = (1.0 - args[1]).sqrt();
                damped_variance(a2, (1.0 + s) / (2.0 * s))
            }
        };
        Ok(value)
    }
}

fn plus_loss(a: f64, tau: f64) -> f64 {
    let a2 = a * a;
    (-a2 * (1.0 - tau.sqrt()).powi(2)).exp() * 0.5 * (1.0 + (-2.0 * a2 * (1.0 - tau)).exp())
}

fn damped_wigner(wcat: f64, s: f64, gap: f64) -> f64 {
    wcat + 2.0 / PI * (1.0 - s) + gap * (3.0 * s - 2.0)
}

fn damped_variance(a2: f64, h: f64) -> f64 {
    h / (4.0 * a2) - h * h / (8.0 * a2 * a2)
}

/// Evaluates the named closed form.
pub fn asymptotic_reference(kind: &str, args: &[f64]) -> Result<f64> {
    kind.parse::<AsymptoticKind>()?.evaluate(args)
}
