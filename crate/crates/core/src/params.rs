//! Device constants and drive configuration.
//!
//! Every rate and frequency is an angular quantity in rad/s. Use
//! [`hz`] to convert a value quoted as `f/2π` in Hz.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant (CODATA 2018), J·s.
pub const HBAR: f64 = 1.054571817e-34;

/// Converts a frequency quoted as `value/2π` in Hz into rad/s.
pub fn hz(value_over_2pi: f64) -> f64 {
    TAU * value_over_2pi
}

/// Fixed physical constants of the hybrid device.
///
/// Mode `a` is the optical cavity, `b` the mechanical resonator coupled to it
/// by radiation pressure, `c` the auxiliary mechanical resonator coupled to `b`
/// with strength `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub omega_c: f64,
    pub kappa_a: f64,
    pub gamma_b: f64,
    pub gamma_c: f64,
    pub g_om: f64,
    pub j: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let strictly_positive = [
            ("omega_a", self.omega_a),
            ("omega_b", self.omega_b),
            ("omega_c", self.omega_c),
            ("kappa_a", self.kappa_a),
            ("gamma_b", self.gamma_b),
            ("gamma_c", self.gamma_c),
            ("g_om", self.g_om),
        ];
        for (name, v) in strictly_positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.j.is_finite() && self.j >= 0.0) {
            return Err(Error::invalid("j", format!("must be finite and >= 0, got {}", self.j)));
        }
        for (name, v) in [("mass", self.mass), ("length", self.length)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::invalid(name, format!("must be > 0, got {v}")));
                }
            }
        }
        Ok(())
    }

    /// Both mechanical frequencies exceed ten cavity linewidths.
    pub fn resolved_sideband(&self) -> bool {
        self.omega_b > 10.0 * self.kappa_a && self.omega_c > 10.0 * self.kappa_a
    }

    /// Both mechanical quality factors exceed 10³.
    pub fn high_q(&self) -> bool {
        self.omega_b > 1e3 * self.gamma_b && self.omega_c > 1e3 * self.gamma_c
    }
}

/// How the strong pump is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pump {
    /// Input power in W; converted with `ħω_pu`.
    Power { watts: f64 },
    /// Amplitude `ε_pu` in s^-1/2.
    Amplitude { epsilon: f64 },
}

/// Pump–cavity detuning.
///
/// `Bare` fixes `Δ_a = ω_a − ω_pu` and solves for the radiation-pressure
/// shifted detuning. `Effective` fixes `Δ'_a` (e.g. the red sideband
/// `Δ'_a = ω_b`) and back-computes the bare detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum PumpDetuning {
    Bare(f64),
    Effective(f64),
}

impl PumpDetuning {
    pub fn value(self) -> f64 {
        match self {
            PumpDetuning::Bare(v) | PumpDetuning::Effective(v) => v,
        }
    }
}

/// Pump, probe and mechanical drive settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub pump: Pump,
    pub pump_detuning: PumpDetuning,
    /// Probe amplitude `ε_pr`, s^-1/2.
    pub epsilon_pr: f64,
    /// Probe–pump detuning `δ = ω_pr − ω_pu`, rad/s.
    pub delta: f64,
    pub phi_p: f64,
    /// Mechanical drive amplitude on resonator `c`.
    pub epsilon_d: f64,
    /// Mechanical drive frequency. `None` locks it to the probe detuning `δ`,
    /// which is how the response spectra are swept.
    #[serde(default)]
    pub omega_d: Option<f64>,
    pub phi_d: f64,
}

impl DriveParams {
    /// Pump and probe only, all phases zero, drive locked to the probe.
    pub fn new(pump: Pump, pump_detuning: PumpDetuning, epsilon_pr: f64) -> Self {
        DriveParams {
            pump,
            pump_detuning,
            epsilon_pr,
            delta: 0.0,
            phi_p: 0.0,
            epsilon_d: 0.0,
            omega_d: None,
            phi_d: 0.0,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// Sets `ε_d = η·ε_pr` and `φ_d = φ_p + φ`.
    pub fn with_eta_phi(mut self, eta: f64, phi: f64) -> Self {
        self.epsilon_d = eta * self.epsilon_pr;
        self.phi_d = self.phi_p + phi;
        self
    }

    /// `φ = φ_d − φ_p` reduced to `[0, 2π)`.
    pub fn phi(&self) -> f64 {
        let r = (self.phi_d - self.phi_p).rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        if r >= TAU {
            0.0
        } else {
            r
        }
    }

    /// `η = ε_d / ε_pr`, defined only for a nonzero probe.
    pub fn eta(&self) -> Option<f64> {
        (self.epsilon_pr > 0.0).then(|| self.epsilon_d / self.epsilon_pr)
    }

    /// Whether the mechanical drive oscillates at the probe detuning and so
    /// feeds the `ω_pr` sideband.
    pub fn drive_at_probe(&self) -> bool {
        match self.omega_d {
            None => true,
            Some(w) => w == self.delta,
        }
    }

    pub fn weak_probe(&self, epsilon_pu: f64) -> bool {
        self.epsilon_pr < 0.1 * epsilon_pu
    }

    pub fn weak_mech_drive(&self, epsilon_pu: f64) -> bool {
        self.epsilon_d < 0.1 * epsilon_pu
    }

    pub fn validate(&self) -> Result<()> {
        match self.pump {
            Pump::Power { watts } if !(watts.is_finite() && watts >= 0.0) => {
                return Err(Error::invalid("pump_power", format!("must be >= 0, got {watts}")));
            }
            Pump::Amplitude { epsilon } if !(epsilon.is_finite() && epsilon >= 0.0) => {
                return Err(Error::invalid("epsilon_pu", format!("must be >= 0, got {epsilon}")));
            }
            _ => {}
        }
        let finite = [
            ("pump_detuning", self.pump_detuning.value()),
            ("delta", self.delta),
            ("phi_p", self.phi_p),
            ("phi_d", self.phi_d),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        for (name, v) in [("epsilon_pr", self.epsilon_pr), ("epsilon_d", self.epsilon_d)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        if let Some(w) = self.omega_d {
            if !w.is_finite() {
                return Err(Error::invalid("omega_d", format!("must be finite, got {w}")));
            }
        }
        Ok(())
    }
}

/// Pump amplitude `sqrt(P·κ/(ħω))` in s^-1/2 for input power `power` (W).
pub fn pump_amplitude(power: f64, omega: f64, kappa: f64) -> Result<f64> {
    if !(power.is_finite() && power >= 0.0) {
        return Err(Error::invalid("power", format!("must be >= 0, got {power}")));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid("omega", format!("must be > 0, got {omega}")));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::invalid("kappa", format!("must be > 0, got {kappa}")));
    }
    Ok((power * kappa / (HBAR * omega)).sqrt())
}

/// Single-photon optomechanical coupling `(ω_a/L)·sqrt(ħ/(m·ω_b))`.
pub fn derive_g_om(omega_a: f64, length: f64, mass: f64, omega_b: f64) -> Result<f64> {
    for (name, v) in [
        ("omega_a", omega_a),
        ("length", length),
        ("mass", mass),
        ("omega_b", omega_b),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(name, format!("must be > 0, got {v}")));
        }
    }
    Ok((omega_a / length) * (HBAR / (mass * omega_b)).sqrt())
}

/// Phases are configured in units of π.
pub fn phase_from_units_of_pi(x: f64) -> f64 {
    x * PI
}
