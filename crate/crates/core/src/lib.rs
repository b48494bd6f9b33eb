pub mod cli;
pub mod dressed;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod params;
pub mod response;
pub mod steady;
pub mod sweep;
pub mod verify;

pub use dressed::{dressed_modes, dressed_modes_with, DressedModes, Regime};
pub use error::{Category, ConfigError, Error, Result};
pub use params::{derive_g_om, hz, pump_amplitude, DriveParams, Pump, PumpDetuning, SystemParams, HBAR};
pub use response::{
    critical_eta, response, response_no_drive, response_single_omit, sideband_closed_form, sideband_linear_solve,
    CriticalEta, Detunings, Response, SidebandAmplitudes,
};
pub use steady::{solve_steady_state, solve_steady_state_with, Gauge, SolverControls, SteadyState};
pub use sweep::{
    figure_preset, find_features, sweep_2d, sweep_detuning, AxisSpec, FeatureReport, FigureId, Preset, SecondAxis,
    SecondAxisKind, SpectrumTable, SweepGrid,
};
