use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AxisSpec, SecondAxis};
use crate::error::Error;
use crate::params::{hz, DriveParams, Pump, PumpDetuning, SystemParams};
use crate::steady::Gauge;

/// Probe amplitude used by the presets, s^-1/2. Roughly 1e-3 of the pump
/// amplitude at 1 mW; the response is normalized by it, so only the weak-probe
/// condition matters.
pub const REFERENCE_PROBE_AMPLITUDE: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
    Fig5,
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig3c,
        FigureId::Fig3d,
        FigureId::Fig5,
        FigureId::Fig6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig3c => "fig3c",
            FigureId::Fig3d => "fig3d",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// A complete run description for one figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub id: FigureId,
    pub system: SystemParams,
    pub drive: DriveParams,
    pub axis: AxisSpec,
    pub second_axis: Option<SecondAxis>,
    pub gauge: Gauge,
}

/// Reference device: ω_a/2π = 194 THz, ω_b/2π = ω_c/2π = 947 kHz,
/// κ_a/2π = 215 kHz, γ/2π = 140 Hz, g_om/2π = 2.7 Hz, J/2π = 320 kHz.
pub fn reference_system() -> SystemParams {
    SystemParams {
        omega_a: hz(194e12),
        omega_b: hz(947e3),
        omega_c: hz(947e3),
        kappa_a: hz(215e3),
        gamma_b: hz(140.0),
        gamma_c: hz(140.0),
        g_om: hz(2.7),
        j: hz(320e3),
        mass: None,
        length: None,
    }
}

/// 1 mW pump on the red sideband (`Δ'_a = ω_b`), no mechanical drive.
pub fn reference_drive(sys: &SystemParams) -> DriveParams {
    DriveParams::new(
        Pump::Power { watts: 1e-3 },
        PumpDetuning::Effective(sys.omega_b),
        REFERENCE_PROBE_AMPLITUDE,
    )
    .with_delta(sys.omega_b)
}

pub fn figure_preset(id: FigureId) -> Preset {
    let mut system = reference_system();
    if id == FigureId::Fig2b {
        system.j = 0.0;
    }
    let base = reference_drive(&system);
    let (drive, second_axis) = match id {
        FigureId::Fig2a | FigureId::Fig2b => (base, None),
        FigureId::Fig3a => (base.with_eta_phi(1.0, 0.0), None),
        FigureId::Fig3b => (base.with_eta_phi(1.0, PI / 2.0), None),
        FigureId::Fig3c => (base.with_eta_phi(1.0, PI), None),
        FigureId::Fig3d => (base.with_eta_phi(1.0, 1.5 * PI), None),
        FigureId::Fig5 => (base.with_eta_phi(0.0, 0.0), Some(default_eta_axis())),
        FigureId::Fig6 => (base.with_eta_phi(0.0, PI), Some(default_eta_axis())),
    };
    Preset {
        id,
        system,
        drive,
        axis: AxisSpec::new(-0.7, 0.7, 2001),
        second_axis,
        gauge: Gauge::RealG,
    }
}

fn default_eta_axis() -> SecondAxis {
    SecondAxis::eta((0..=8).map(|k| 0.25 * k as f64).collect())
}
