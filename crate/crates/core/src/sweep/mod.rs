//! Detuning spectra and two-dimensional parameter grids.
//!
//! Grid points are independent, so they are evaluated in parallel with rayon.
//! Results are always collected in index order, which makes every table
//! bit-identical regardless of the thread count. Set `OMIT_LAB_THREADS` to cap
//! the number of worker threads.

mod features;
mod presets;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{DriveParams, SystemParams};
use crate::response::{response, Response};
use crate::steady::{solve_steady_state_with, Gauge, SolverControls, SteadyState};

pub use features::{find_features, FeatureReport, Minimum};
pub use presets::{figure_preset, reference_drive, reference_system, FigureId, Preset, REFERENCE_PROBE_AMPLITUDE};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "OMIT_LAB_THREADS";

/// Evenly spaced normalized detunings `(δ − ω_b)/ω_b` from `start` to `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        AxisSpec { start, stop, count }
    }

    /// Grid values. The interpolation is written so that a range symmetric
    /// about zero gives exactly mirrored points.
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count < 2 {
            return Err(Error::invalid(
                "count",
                format!("need at least 2 points, got {}", self.count),
            ));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.stop > self.start) {
            return Err(Error::invalid(
                "axis",
                format!("need finite start < stop, got [{}, {}]", self.start, self.stop),
            ));
        }
        let last = (self.count - 1) as f64;
        let values: Vec<f64> = (0..self.count)
            .map(|i| {
                let i = i as f64;
                (self.start * (last - i) + self.stop * i) / last
            })
            .collect();
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(
                "count",
                "too many points for the span; axis not strictly increasing",
            ));
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondAxisKind {
    /// Drive ratio `η = ε_d/ε_pr`, dimensionless.
    Eta,
    /// Phase difference `φ = φ_d − φ_p`, radians.
    Phi,
}

impl SecondAxisKind {
    pub fn unit(self) -> &'static str {
        match self {
            SecondAxisKind::Eta => "dimensionless",
            SecondAxisKind::Phi => "rad",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondAxis {
    pub kind: SecondAxisKind,
    pub values: Vec<f64>,
}

impl SecondAxis {
    pub fn eta(values: Vec<f64>) -> Self {
        SecondAxis {
            kind: SecondAxisKind::Eta,
            values,
        }
    }

    pub fn phi(values: Vec<f64>) -> Self {
        SecondAxis {
            kind: SecondAxisKind::Phi,
            values,
        }
    }

    pub fn unit(&self) -> &'static str {
        self.kind.unit()
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::invalid("second_axis", "needs at least one value"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("second_axis", "values must be finite"));
        }
        if self.values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("second_axis", "values must be strictly increasing"));
        }
        if self.kind == SecondAxisKind::Eta && self.values[0] < 0.0 {
            return Err(Error::invalid("second_axis", "eta must be >= 0"));
        }
        Ok(())
    }

    /// Applies one second-axis value to a drive template.
    pub fn apply(&self, drive: &DriveParams, value: f64) -> DriveParams {
        let mut d = *drive;
        match self.kind {
            SecondAxisKind::Eta => d.epsilon_d = value * d.epsilon_pr,
            SecondAxisKind::Phi => d.phi_d = d.phi_p + value,
        }
        d
    }
}

/// Everything needed to regenerate a table, plus solver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub artifact_version: String,
    pub system: SystemParams,
    pub drive: DriveParams,
    pub gauge: Gauge,
    pub solver: SolverControls,
    pub axis: AxisSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_axis: Option<SecondAxis>,
    pub steady_state: SteadyState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    /// Normalized detuning `(δ − ω_b)/ω_b`.
    pub axis: Vec<f64>,
    pub rows: Vec<Response>,
    pub provenance: Provenance,
}

impl SpectrumTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn absorption(&self) -> Vec<f64> {
        self.rows.iter().map(Response::absorption).collect()
    }

    pub fn dispersion(&self) -> Vec<f64> {
        self.rows.iter().map(Response::dispersion).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub axis: Vec<f64>,
    pub second_axis: SecondAxis,
    /// One row per second-axis value, each spanning the detuning axis.
    pub matrix: Vec<Vec<Response>>,
    pub provenance: Provenance,
}

impl SweepGrid {
    pub fn row(&self, k: usize) -> &[Response] {
        &self.matrix[k]
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty() || self.axis.is_empty()
    }
}

/// Runs `f` on a rayon pool capped by `OMIT_LAB_THREADS` when it is set.
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(f());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::invalid("OMIT_LAB_THREADS", format!("expected a positive integer, got `{raw}`")))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Probe detuning `δ` at normalized axis value `x`.
pub fn delta_at(sys: &SystemParams, x: f64) -> f64 {
    sys.omega_b + x * sys.omega_b
}

fn evaluate(sys: &SystemParams, ss: &SteadyState, drives: &[DriveParams], axis: &[f64]) -> Result<Vec<Response>> {
    let n = axis.len();
    let results: Vec<Result<Response>> = with_thread_cap(|| {
        (0..drives.len() * n)
            .into_par_iter()
            .map(|k| response(sys, ss, &drives[k / n].with_delta(delta_at(sys, axis[k % n]))))
            .collect()
    })?;
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::AtGridIndex {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

fn prepare(sys: &SystemParams, drive: &DriveParams, gauge: Gauge, controls: &SolverControls) -> Result<SteadyState> {
    sys.validate()?;
    drive.validate()?;
    solve_steady_state_with(sys, drive, gauge, controls)
}

/// Spectrum over the detuning axis with the default real-G gauge.
pub fn sweep_detuning(sys: &SystemParams, drive: &DriveParams, axis: AxisSpec) -> Result<SpectrumTable> {
    sweep_detuning_with(sys, drive, axis, Gauge::RealG, &SolverControls::default())
}

/// Spectrum over the detuning axis. The pump steady state does not depend on
/// the probe detuning and is solved once.
pub fn sweep_detuning_with(
    sys: &SystemParams,
    drive: &DriveParams,
    axis: AxisSpec,
    gauge: Gauge,
    controls: &SolverControls,
) -> Result<SpectrumTable> {
    let values = axis.values()?;
    let ss = prepare(sys, drive, gauge, controls)?;
    let rows = evaluate(sys, &ss, std::slice::from_ref(drive), &values)?;
    Ok(SpectrumTable {
        axis: values,
        rows,
        provenance: Provenance {
            artifact_version: ARTIFACT_VERSION.to_string(),
            system: *sys,
            drive: *drive,
            gauge,
            solver: *controls,
            axis,
            second_axis: None,
            steady_state: ss,
        },
    })
}

pub fn sweep_2d(sys: &SystemParams, drive: &DriveParams, axis: AxisSpec, second: SecondAxis) -> Result<SweepGrid> {
    sweep_2d_with(sys, drive, axis, second, Gauge::RealG, &SolverControls::default())
}

/// Rectangular grid over detuning and `η` or `φ`. Grid indices in errors
/// count row-major, second axis outermost.
pub fn sweep_2d_with(
    sys: &SystemParams,
    drive: &DriveParams,
    axis: AxisSpec,
    second: SecondAxis,
    gauge: Gauge,
    controls: &SolverControls,
) -> Result<SweepGrid> {
    second.validate()?;
    let values = axis.values()?;
    let ss = prepare(sys, drive, gauge, controls)?;
    let drives: Vec<DriveParams> = second.values.iter().map(|&v| second.apply(drive, v)).collect();
    let flat = evaluate(sys, &ss, &drives, &values)?;
    let matrix = flat.chunks(values.len()).map(<[Response]>::to_vec).collect();
    Ok(SweepGrid {
        axis: values,
        matrix,
        provenance: Provenance {
            artifact_version: ARTIFACT_VERSION.to_string(),
            system: *sys,
            drive: *drive,
            gauge,
            solver: *controls,
            axis,
            second_axis: Some(second.clone()),
            steady_state: ss,
        },
        second_axis: second,
    })
}
