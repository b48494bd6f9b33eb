//! Normal modes of the coupled mechanical pair, as seen by the probe when the
//! auxiliary resonator is not driven.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::steady::SteadyState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `4J² > (γ_b/2 − γ_c/2)²`: the dressed modes split in frequency.
    Underdamped,
    Overdamped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedModes {
    pub lambda_plus: C64,
    pub lambda_minus: C64,
    pub a_plus: C64,
    pub a_minus: C64,
    pub regime: Regime,
}

/// Dressed-mode parameters `λ±` and partial-fraction weights `A±`.
///
/// At the exceptional point (`λ+ = λ-`) the weights diverge; with
/// `allow_degenerate` the finite sum-rule-consistent split `A± = |G|²/2` is
/// returned instead of [`Error::DegenerateModes`].
pub fn dressed_modes(sys: &SystemParams, ss: &SteadyState) -> Result<DressedModes> {
    dressed_modes_with(sys, ss, false)
}

pub fn dressed_modes_with(sys: &SystemParams, ss: &SteadyState, allow_degenerate: bool) -> Result<DressedModes> {
    if !(sys.j >= 0.0) {
        return Err(Error::invalid("j", "must be >= 0"));
    }
    let hb = sys.gamma_b / 2.0;
    let hc = sys.gamma_c / 2.0;
    let radicand = 4.0 * sys.j * sys.j - (hb - hc) * (hb - hc);
    let root = C64::new(radicand, 0.0).sqrt();
    let i_root = C64::new(0.0, 1.0) * root;
    let lambda_plus = (C64::new(hb + hc, 0.0) + i_root) / 2.0;
    let lambda_minus = (C64::new(hb + hc, 0.0) - i_root) / 2.0;
    let regime = if radicand > 0.0 {
        Regime::Underdamped
    } else {
        Regime::Overdamped
    };
    let g2 = ss.g_eff.norm_sqr();
    let split = lambda_plus - lambda_minus;
    let (a_plus, a_minus) = if split == C64::new(0.0, 0.0) {
        if !allow_degenerate {
            return Err(Error::DegenerateModes);
        }
        (C64::new(g2 / 2.0, 0.0), C64::new(g2 / 2.0, 0.0))
    } else {
        ((lambda_plus - hc) / split * g2, -(lambda_minus - hc) / split * g2)
    };
    Ok(DressedModes {
        lambda_plus,
        lambda_minus,
        a_plus,
        a_minus,
        regime,
    })
}
