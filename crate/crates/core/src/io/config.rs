//! Run configuration files.
//!
//! A configuration is a TOML document with the sections `[system]`, `[drive]`,
//! `[sweep]`, `[output]` and `[solver]`. Every dimensional key carries its unit
//! in the name:
//!
//! | suffix             | meaning                              |
//! |--------------------|--------------------------------------|
//! | `_over_2pi_hz`     | rate given as value/2π in Hz         |
//! | `_rad_per_s`       | angular rate in rad/s                |
//! | `_over_omega_m`    | frequency in units of `ω_m = ω_b`    |
//! | `_over_pi`         | phase in units of π                  |
//! | `_mw`, `_w`        | power                                |
//! | `_per_sqrt_s`      | field amplitude in s^-1/2            |
//! | `_kg`, `_m`        | mass, length                         |
//!
//! Writing a bare name such as `kappa_a = 1.3e6` is an error that lists the
//! accepted spellings. Unknown keys and sections are rejected.
//!
//! ```toml
//! [system]
//! omega_a_over_2pi_hz = 194e12
//! omega_b_over_2pi_hz = 947e3
//! omega_c_over_2pi_hz = 947e3
//! kappa_a_over_2pi_hz = 215e3
//! gamma_b_over_2pi_hz = 140.0
//! gamma_c_over_2pi_hz = 140.0
//! g_om_over_2pi_hz = 2.7          # or give mass_kg and length_m
//! j_over_2pi_hz = 320e3
//!
//! [drive]
//! pump_power_mw = 1.0             # or pump_power_w, epsilon_pu_per_sqrt_s
//! pump_detuning_over_omega_m = 1.0
//! pump_detuning_kind = "effective" # "effective" (default) or "bare"
//! epsilon_pr_per_sqrt_s = 1e8
//! eta = 1.0                       # or epsilon_d_per_sqrt_s; default 0
//! phi_over_pi = 0.5               # phase difference, default 0
//! phi_p_over_pi = 0.0             # probe phase, default 0
//! delta_over_omega_m = 1.0        # single-point probe detuning, default 1
//! omega_d_over_omega_m = 1.0      # omit to lock the drive to the probe
//!
//! [sweep]
//! delta_norm_start = -0.7         # (δ − ω_m)/ω_m
//! delta_norm_stop = 0.7
//! points = 2001
//! second_axis = "eta"             # or "phi"
//! eta_values = [0.0, 0.25, 0.5]   # or phi_values_over_pi
//!
//! [output]
//! directory = "out"
//! stem = "fig2a"
//! formats = ["csv", "json", "svg"]
//! overwrite = false
//!
//! [solver]
//! damping = 0.5
//! tolerance = 1e-14
//! max_iterations = 500
//! gauge = "real-g"                # or "raw"
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{ConfigError, Error, Result};
use crate::params::{
    derive_g_om, hz, phase_from_units_of_pi, pump_amplitude, DriveParams, Pump, PumpDetuning, SystemParams,
};
use crate::steady::{Gauge, SolverControls};
use crate::sweep::{AxisSpec, Preset, SecondAxis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub directory: Option<PathBuf>,
    pub stem: Option<String>,
    pub formats: Vec<OutputFormat>,
    pub overwrite: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            directory: None,
            stem: None,
            formats: vec![OutputFormat::Csv, OutputFormat::Svg],
            overwrite: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub system: SystemParams,
    pub drive: DriveParams,
    pub axis: AxisSpec,
    pub second_axis: Option<SecondAxis>,
    pub output: OutputSpec,
    pub solver: SolverControls,
    pub gauge: Gauge,
    /// Physical-regime warnings raised while loading.
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl RunConfig {
    pub fn from_preset(p: &Preset) -> Self {
        let mut cfg = RunConfig {
            system: p.system,
            drive: p.drive,
            axis: p.axis,
            second_axis: p.second_axis.clone(),
            output: OutputSpec {
                stem: Some(p.id.to_string()),
                ..OutputSpec::default()
            },
            solver: SolverControls::default(),
            gauge: p.gauge,
            warnings: Vec::new(),
        };
        cfg.warnings = regime_warnings(&cfg.system, &cfg.drive);
        cfg
    }
}

#[derive(Clone, Copy)]
enum Unit {
    Hz2Pi,
    RadPerS,
    OverOmegaM,
    OverPi,
    Milliwatt,
    Watt,
    PerSqrtS,
}

impl Unit {
    fn suffix(self) -> &'static str {
        match self {
            Unit::Hz2Pi => "_over_2pi_hz",
            Unit::RadPerS => "_rad_per_s",
            Unit::OverOmegaM => "_over_omega_m",
            Unit::OverPi => "_over_pi",
            Unit::Milliwatt => "_mw",
            Unit::Watt => "_w",
            Unit::PerSqrtS => "_per_sqrt_s",
        }
    }
}

/// A quantity that may be spelled with one of several unit tags.
struct Quantity {
    base: &'static str,
    units: &'static [Unit],
}

const RATE: &[Unit] = &[Unit::Hz2Pi, Unit::RadPerS];
const DETUNING: &[Unit] = &[Unit::OverOmegaM, Unit::RadPerS];

const SYSTEM_RATES: [Quantity; 8] = [
    Quantity {
        base: "omega_a",
        units: RATE,
    },
    Quantity {
        base: "omega_b",
        units: RATE,
    },
    Quantity {
        base: "omega_c",
        units: RATE,
    },
    Quantity {
        base: "kappa_a",
        units: RATE,
    },
    Quantity {
        base: "gamma_b",
        units: RATE,
    },
    Quantity {
        base: "gamma_c",
        units: RATE,
    },
    Quantity {
        base: "g_om",
        units: RATE,
    },
    Quantity { base: "j", units: RATE },
];

/// Reads one section, tracking which keys were consumed.
struct Section<'a, 'm> {
    name: &'static str,
    table: Option<&'a Table>,
    used: BTreeSet<String>,
    missing: &'m mut Vec<String>,
}

impl<'a> Section<'a, '_> {
    fn key(&self, k: &str) -> String {
        format!("{}.{}", self.name, k)
    }

    fn raw(&mut self, k: &str) -> Option<&'a Value> {
        let v = self.table?.get(k)?;
        self.used.insert(k.to_string());
        Some(v)
    }

    fn number(&mut self, k: &str) -> Result<Option<f64>, ConfigError> {
        let key = self.key(k);
        match self.raw(k) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(other) => Err(ConfigError::Validation {
                key,
                reason: format!("expected a number, got {}", other.type_str()),
            }),
        }
    }

    fn string(&mut self, k: &str) -> Result<Option<&'a str>, ConfigError> {
        let key = self.key(k);
        match self.raw(k) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(other) => Err(ConfigError::Validation {
                key,
                reason: format!("expected a string, got {}", other.type_str()),
            }),
        }
    }

    fn boolean(&mut self, k: &str) -> Result<Option<bool>, ConfigError> {
        let key = self.key(k);
        match self.raw(k) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(other) => Err(ConfigError::Validation {
                key,
                reason: format!("expected true or false, got {}", other.type_str()),
            }),
        }
    }

    fn numbers(&mut self, k: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let key = self.key(k);
        let Some(v) = self.raw(k) else { return Ok(None) };
        let bad = |what: &str| ConfigError::Validation {
            key: key.clone(),
            reason: format!("expected an array of numbers, got {what}"),
        };
        let Value::Array(items) = v else {
            return Err(bad(v.type_str()));
        };
        items
            .iter()
            .map(|x| match x {
                Value::Float(f) => Ok(*f),
                Value::Integer(i) => Ok(*i as f64),
                other => Err(bad(other.type_str())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    /// Value of a unit-tagged quantity and the unit it was written in.
    fn tagged(&mut self, q: &Quantity) -> Result<Option<(f64, Unit)>, ConfigError> {
        if self.table.is_some_and(|t| t.contains_key(q.base)) {
            return Err(ConfigError::UnitTagMissing {
                key: self.key(q.base),
                accepted: q.units.iter().map(|u| format!("{}{}", q.base, u.suffix())).collect(),
            });
        }
        let mut found = None;
        for &u in q.units {
            let k = format!("{}{}", q.base, u.suffix());
            if let Some(x) = self.number(&k)? {
                if found.is_some() {
                    return Err(ConfigError::Validation {
                        key: self.key(q.base),
                        reason: "given in more than one unit".into(),
                    });
                }
                found = Some((x, u));
            }
        }
        Ok(found)
    }

    fn require(&mut self, q: &Quantity) -> Result<Option<(f64, Unit)>, ConfigError> {
        let v = self.tagged(q)?;
        if v.is_none() {
            self.missing
                .push(self.key(&format!("{}{}", q.base, q.units[0].suffix())));
        }
        Ok(v)
    }

    fn finish(self) -> Result<(), ConfigError> {
        if let Some(t) = self.table {
            if let Some(k) = t.keys().find(|k| !self.used.contains(*k)) {
                return Err(ConfigError::UnknownKey(self.key(k)));
            }
        }
        Ok(())
    }
}

fn to_rate(v: (f64, Unit), omega_m: f64) -> f64 {
    match v.1 {
        Unit::Hz2Pi => hz(v.0),
        Unit::OverOmegaM => v.0 * omega_m,
        _ => v.0,
    }
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        key: key.to_string(),
        reason: reason.into(),
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let doc: Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e
            .span()
            .map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        ConfigError::Parse {
            line,
            message: e.message().to_string(),
        }
    })?;
    Ok(build(&doc)?)
}

fn section<'a>(doc: &'a Table, name: &'static str) -> Result<Option<&'a Table>, ConfigError> {
    match doc.get(name) {
        None => Ok(None),
        Some(Value::Table(t)) => Ok(Some(t)),
        Some(_) => Err(invalid(name, "must be a [section]")),
    }
}

fn build(doc: &Table) -> Result<RunConfig, ConfigError> {
    const SECTIONS: [&str; 5] = ["system", "drive", "sweep", "output", "solver"];
    if let Some(k) = doc.keys().find(|k| !SECTIONS.contains(&k.as_str())) {
        return Err(ConfigError::UnknownKey(k.clone()));
    }
    let mut missing = Vec::new();

    // [system]
    let mut s = Section {
        name: "system",
        table: section(doc, "system")?,
        used: BTreeSet::new(),
        missing: &mut missing,
    };
    let mut rates = [None; 8];
    for (slot, q) in rates.iter_mut().zip(&SYSTEM_RATES) {
        *slot = if q.base == "g_om" { s.tagged(q)? } else { s.require(q)? };
    }
    let mass = s.number("mass_kg")?;
    let length = s.number("length_m")?;
    if s.table
        .is_some_and(|t| t.contains_key("mass") || t.contains_key("length"))
    {
        let base = if s.table.is_some_and(|t| t.contains_key("mass")) {
            "mass"
        } else {
            "length"
        };
        return Err(ConfigError::UnitTagMissing {
            key: s.key(base),
            accepted: vec![format!("{base}{}", if base == "mass" { "_kg" } else { "_m" })],
        });
    }
    if rates[6].is_none() && (mass.is_none() || length.is_none()) {
        s.missing
            .push("system.g_om_over_2pi_hz (or system.mass_kg and system.length_m)".into());
    }
    s.finish()?;

    // [drive]
    let mut d = Section {
        name: "drive",
        table: section(doc, "drive")?,
        used: BTreeSet::new(),
        missing: &mut missing,
    };
    let power = d.tagged(&Quantity {
        base: "pump_power",
        units: &[Unit::Milliwatt, Unit::Watt],
    })?;
    let eps_pu = d.tagged(&Quantity {
        base: "epsilon_pu",
        units: &[Unit::PerSqrtS],
    })?;
    if power.is_none() && eps_pu.is_none() {
        d.missing
            .push("drive.pump_power_mw (or drive.epsilon_pu_per_sqrt_s)".into());
    }
    if power.is_some() && eps_pu.is_some() {
        return Err(invalid(
            "drive.pump_power",
            "give either the pump power or epsilon_pu, not both",
        ));
    }
    let pump_det = d.require(&Quantity {
        base: "pump_detuning",
        units: DETUNING,
    })?;
    let det_kind = d.string("pump_detuning_kind")?.unwrap_or("effective");
    let eps_pr = d.require(&Quantity {
        base: "epsilon_pr",
        units: &[Unit::PerSqrtS],
    })?;
    let eta = d.number("eta")?;
    let eps_d = d.tagged(&Quantity {
        base: "epsilon_d",
        units: &[Unit::PerSqrtS],
    })?;
    if eta.is_some() && eps_d.is_some() {
        return Err(invalid("drive.eta", "give either eta or epsilon_d, not both"));
    }
    let phi = d.tagged(&Quantity {
        base: "phi",
        units: &[Unit::OverPi],
    })?;
    let phi_p = d.tagged(&Quantity {
        base: "phi_p",
        units: &[Unit::OverPi],
    })?;
    if d.table.is_some_and(|t| t.contains_key("phi_d")) {
        return Err(invalid(
            "drive.phi_d",
            "set the phase difference with phi_over_pi and the probe phase with phi_p_over_pi",
        ));
    }
    let delta = d.tagged(&Quantity {
        base: "delta",
        units: DETUNING,
    })?;
    let omega_d = d.tagged(&Quantity {
        base: "omega_d",
        units: DETUNING,
    })?;
    d.finish()?;

    // [sweep]
    let mut w = Section {
        name: "sweep",
        table: section(doc, "sweep")?,
        used: BTreeSet::new(),
        missing: &mut missing,
    };
    let start = w.number("delta_norm_start")?.unwrap_or(-0.7);
    let stop = w.number("delta_norm_stop")?.unwrap_or(0.7);
    let points = w.number("points")?;
    let second_kind = w.string("second_axis")?;
    let eta_values = w.numbers("eta_values")?;
    let phi_values = w.numbers("phi_values_over_pi")?;
    if w.table.is_some_and(|t| t.contains_key("phi_values")) {
        return Err(ConfigError::UnitTagMissing {
            key: "sweep.phi_values".into(),
            accepted: vec!["phi_values_over_pi".into()],
        });
    }
    w.finish()?;

    // [output]
    let mut o = Section {
        name: "output",
        table: section(doc, "output")?,
        used: BTreeSet::new(),
        missing: &mut missing,
    };
    let mut output = OutputSpec {
        directory: o.string("directory")?.map(PathBuf::from),
        stem: o.string("stem")?.map(str::to_string),
        ..OutputSpec::default()
    };
    if let Some(v) = o.raw("formats") {
        let Value::Array(items) = v else {
            return Err(invalid("output.formats", "expected an array of strings"));
        };
        output.formats = items
            .iter()
            .map(|x| match x.as_str() {
                Some("csv") => Ok(OutputFormat::Csv),
                Some("json") => Ok(OutputFormat::Json),
                Some("svg") => Ok(OutputFormat::Svg),
                _ => Err(invalid(
                    "output.formats",
                    format!("unsupported format {x}; use csv, json or svg"),
                )),
            })
            .collect::<Result<_, _>>()?;
    }
    output.overwrite = o.boolean("overwrite")?.unwrap_or(false);
    o.finish()?;

    // [solver]
    let mut v = Section {
        name: "solver",
        table: section(doc, "solver")?,
        used: BTreeSet::new(),
        missing: &mut missing,
    };
    let mut solver = SolverControls::default();
    if let Some(x) = v.number("damping")? {
        solver.damping = x;
    }
    if let Some(x) = v.number("tolerance")? {
        solver.tolerance = x;
    }
    if let Some(x) = v.number("max_iterations")? {
        solver.max_iterations = count_value("solver.max_iterations", x)?;
    }
    let gauge = match v.string("gauge")? {
        None | Some("real-g") => Gauge::RealG,
        Some("raw") => Gauge::Raw,
        Some(other) => {
            return Err(invalid(
                "solver.gauge",
                format!("unknown gauge `{other}`; use raw or real-g"),
            ))
        }
    };
    v.finish()?;

    if !missing.is_empty() {
        return Err(ConfigError::MissingKeys(missing));
    }

    // all required values are present past this point
    let omega_b = to_rate(rates[1].unwrap(), 0.0);
    let r = |k: usize| to_rate(rates[k].unwrap(), omega_b);
    let g_om = match rates[6] {
        Some(g) => to_rate(g, omega_b),
        None => derive_g_om(r(0), length.unwrap(), mass.unwrap(), omega_b)
            .map_err(|e| invalid("system.mass_kg", e.to_string()))?,
    };
    let system = SystemParams {
        omega_a: r(0),
        omega_b,
        omega_c: r(2),
        kappa_a: r(3),
        gamma_b: r(4),
        gamma_c: r(5),
        g_om,
        j: r(7),
        mass,
        length,
    };
    system.validate().map_err(|e| param_error("system", e))?;

    let pump = match (power, eps_pu) {
        (Some((p, Unit::Milliwatt)), _) => Pump::Power { watts: p * 1e-3 },
        (Some((p, _)), _) => Pump::Power { watts: p },
        (None, Some((e, _))) => Pump::Amplitude { epsilon: e },
        (None, None) => unreachable!("reported as missing"),
    };
    let det_value = to_rate(pump_det.unwrap(), omega_b);
    let pump_detuning = match det_kind {
        "effective" => PumpDetuning::Effective(det_value),
        "bare" => PumpDetuning::Bare(det_value),
        other => {
            return Err(invalid(
                "drive.pump_detuning_kind",
                format!("unknown kind `{other}`; use effective or bare"),
            ))
        }
    };
    let epsilon_pr = eps_pr.unwrap().0;
    let mut drive =
        DriveParams::new(pump, pump_detuning, epsilon_pr).with_delta(delta.map_or(omega_b, |x| to_rate(x, omega_b)));
    drive.phi_p = phase_from_units_of_pi(phi_p.map_or(0.0, |x| x.0));
    drive = drive.with_eta_phi(eta.unwrap_or(0.0), phase_from_units_of_pi(phi.map_or(0.0, |x| x.0)));
    if let Some((e, _)) = eps_d {
        drive.epsilon_d = e;
    }
    drive.omega_d = omega_d.map(|x| to_rate(x, omega_b));
    drive.validate().map_err(|e| param_error("drive", e))?;

    let count = match points {
        Some(p) => count_value("sweep.points", p)?,
        None => 2001,
    };
    let axis = AxisSpec::new(start, stop, count);
    axis.values().map_err(|e| invalid("sweep", e.to_string()))?;
    let second_axis = match (second_kind, eta_values, phi_values) {
        (None, None, None) => None,
        (Some("eta") | None, Some(values), None) => Some(SecondAxis::eta(values)),
        (Some("phi") | None, None, Some(values)) => Some(SecondAxis::phi(
            values.into_iter().map(phase_from_units_of_pi).collect(),
        )),
        (Some(k), None, None) => {
            return Err(invalid(
                "sweep.second_axis",
                format!("`{k}` needs eta_values or phi_values_over_pi"),
            ));
        }
        _ => {
            return Err(invalid(
                "sweep.second_axis",
                "give exactly one of eta_values or phi_values_over_pi, matching second_axis",
            ));
        }
    };

    Ok(RunConfig {
        warnings: regime_warnings(&system, &drive),
        system,
        drive,
        axis,
        second_axis,
        output,
        solver,
        gauge,
    })
}

fn count_value(key: &str, x: f64) -> Result<usize, ConfigError> {
    if x.fract() != 0.0 || !(x >= 1.0) || x > 1e9 {
        return Err(invalid(key, format!("expected a positive integer, got {x}")));
    }
    Ok(x as usize)
}

fn param_error(section: &str, e: Error) -> ConfigError {
    match e {
        Error::InvalidParameter { name, reason } => invalid(&format!("{section}.{name}"), reason),
        other => invalid(section, other.to_string()),
    }
}

/// Warnings for parameters outside the regime the model assumes.
pub fn regime_warnings(sys: &SystemParams, drive: &DriveParams) -> Vec<String> {
    let mut out = Vec::new();
    if !sys.resolved_sideband() {
        out.push(format!(
            "not in the resolved-sideband regime: omega_b/kappa_a = {:.2} (want > 10)",
            sys.omega_b / sys.kappa_a
        ));
    }
    if !sys.high_q() {
        out.push("mechanical quality factors below 1e3".to_string());
    }
    // the radiation-pressure shift of the pump frequency is irrelevant here
    let eps_pu = match drive.pump {
        Pump::Amplitude { epsilon } => Some(epsilon),
        Pump::Power { watts } => pump_amplitude(watts, sys.omega_a - drive.pump_detuning.value(), sys.kappa_a).ok(),
    };
    if let Some(eps_pu) = eps_pu {
        if !drive.weak_probe(eps_pu) {
            out.push(format!(
                "probe is not weak: epsilon_pr/epsilon_pu = {:.3}",
                drive.epsilon_pr / eps_pu
            ));
        }
        if !drive.weak_mech_drive(eps_pu) {
            out.push(format!(
                "mechanical drive is not weak: epsilon_d/epsilon_pu = {:.3}",
                drive.epsilon_d / eps_pu
            ));
        }
    }
    out
}
