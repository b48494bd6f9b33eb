//! Command-line front end. The `omit-lab` binary is a thin wrapper around
//! [`run`].

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::dressed::dressed_modes;
use crate::error::{Error, Result};
use crate::io::{
    emit_plot, emit_table, load_config, table_csv, table_json, Artifact, OutputFormat, RunConfig, TableFormat,
};
use crate::params::phase_from_units_of_pi;
use crate::steady::{solve_steady_state_with, Gauge};
use crate::sweep::{figure_preset, find_features, sweep_2d_with, sweep_detuning_with, FigureId, SecondAxis};
use crate::verify;

/// Exit status when a verification check misses its tolerance.
pub const EXIT_VERIFY_FAILED: i32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "omit-lab",
    version,
    about = "Probe response of a hybrid optomechanical cavity with a driven auxiliary resonator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Absorption and dispersion over the probe detuning.
    Spectrum(RunArgs),
    /// Spectra over a second axis (eta or phi).
    Sweep2d(RunArgs),
    /// Print the pump steady state.
    Steady(RunArgs),
    /// Print the dressed mechanical modes.
    Dressed(RunArgs),
    /// Run one of the figure presets and write table and plot.
    Figure {
        /// fig2a, fig2b, fig3a, fig3b, fig3c, fig3d, fig5 or fig6
        id: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare frequency-domain results against the time-domain integrators.
    Verify {
        /// Only the slow-envelope oracle at five detunings.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML run configuration; defaults to the fig2a parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory. Without it tables go to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Number of detuning points.
    #[arg(long)]
    points: Option<usize>,
    /// Drive ratio eta = eps_d/eps_pr.
    #[arg(long)]
    eta: Option<f64>,
    /// Phase difference phi in units of pi.
    #[arg(long, allow_negative_numbers = true)]
    phi_over_pi: Option<f64>,
    #[arg(long, value_enum)]
    gauge: Option<GaugeArg>,
    #[arg(long)]
    overwrite: bool,
    /// Seed for the randomized checks in `verify`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GaugeArg {
    Raw,
    RealG,
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// status. Errors go to stderr as `error[<category>]: <message>`.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category().as_str());
            e.category().exit_code()
        }
    }
}

fn configure(args: &RunArgs, default: FigureId) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => RunConfig::from_preset(&figure_preset(default)),
    };
    if let Some(n) = args.points {
        cfg.axis.count = n;
    }
    if args.eta.is_some() || args.phi_over_pi.is_some() {
        let eta = args.eta.unwrap_or(cfg.drive.eta().unwrap_or(0.0));
        let phi = args.phi_over_pi.map_or(cfg.drive.phi(), phase_from_units_of_pi);
        cfg.drive = cfg.drive.with_eta_phi(eta, phi);
    }
    if let Some(g) = args.gauge {
        cfg.gauge = match g {
            GaugeArg::Raw => Gauge::Raw,
            GaugeArg::RealG => Gauge::RealG,
        };
    }
    if let Some(dir) = &args.out {
        cfg.output.directory = Some(dir.clone());
    }
    if let Some(f) = args.format {
        let table = match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
        let mut formats = vec![table];
        if cfg.output.formats.contains(&OutputFormat::Svg) {
            formats.push(OutputFormat::Svg);
        }
        cfg.output.formats = formats;
    }
    cfg.output.overwrite |= args.overwrite;
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Provenance(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e))
}

/// Writes the artifact in every configured format, or prints the table when
/// no output directory is set.
fn deliver(a: &Artifact, cfg: &RunConfig, stem: &str) -> Result<Vec<PathBuf>> {
    let Some(dir) = &cfg.output.directory else {
        let text =
            if cfg.output.formats.contains(&OutputFormat::Json) && !cfg.output.formats.contains(&OutputFormat::Csv) {
                table_json(a)?
            } else {
                table_csv(a)
            };
        std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e))?;
        return Ok(Vec::new());
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = cfg.output.stem.as_deref().unwrap_or(stem);
    let target = |ext: &str| -> PathBuf { dir.join(format!("{stem}.{ext}")) };
    let overwrite = cfg.output.overwrite;
    // check every target first so a collision leaves nothing half-written
    if !overwrite {
        for f in &cfg.output.formats {
            let ext = extension(*f);
            let mut paths = vec![target(ext)];
            if *f == OutputFormat::Svg && matches!(a, Artifact::Grid(_)) {
                paths.push(target("bmp"));
            }
            if let Some(p) = paths.into_iter().find(|p| p.exists()) {
                return Err(Error::PathCollision(p));
            }
        }
    }
    let mut written = Vec::new();
    for f in &cfg.output.formats {
        let path = target(extension(*f));
        match f {
            OutputFormat::Csv => emit_table(a, TableFormat::Csv, &path, overwrite)?,
            OutputFormat::Json => emit_table(a, TableFormat::Json, &path, overwrite)?,
            OutputFormat::Svg => {
                written.extend(emit_plot(a, &path, overwrite)?);
                continue;
            }
        }
        written.push(path);
    }
    Ok(written)
}

fn extension(f: OutputFormat) -> &'static str {
    match f {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
        OutputFormat::Svg => "svg",
    }
}

fn report_written(paths: &[PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

fn spectrum(cfg: &RunConfig, stem: &str) -> Result<()> {
    let table = sweep_detuning_with(&cfg.system, &cfg.drive, cfg.axis, cfg.gauge, &cfg.solver)?;
    let features = find_features(&table)?;
    let a = Artifact::Spectrum(table);
    let written = deliver(&a, cfg, stem)?;
    report_written(&written);
    if !written.is_empty() {
        print_json(&json!({ "features": features, "files": written }))?;
    }
    Ok(())
}

fn grid(cfg: &RunConfig, stem: &str) -> Result<()> {
    let second = cfg
        .second_axis
        .clone()
        .unwrap_or_else(|| SecondAxis::eta((0..=8).map(|k| 0.25 * k as f64).collect()));
    let g = sweep_2d_with(&cfg.system, &cfg.drive, cfg.axis, second, cfg.gauge, &cfg.solver)?;
    let written = deliver(&Artifact::Grid(g), cfg, stem)?;
    report_written(&written);
    if !written.is_empty() {
        print_json(&json!({ "files": written }))?;
    }
    Ok(())
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Spectrum(args) => {
            spectrum(&configure(&args, FigureId::Fig2a)?, "spectrum")?;
        }
        Command::Sweep2d(args) => {
            grid(&configure(&args, FigureId::Fig5)?, "sweep2d")?;
        }
        Command::Steady(args) => {
            let cfg = configure(&args, FigureId::Fig2a)?;
            let ss = solve_steady_state_with(&cfg.system, &cfg.drive, cfg.gauge, &cfg.solver)?;
            print_json(&json!({
                "steady_state": ss,
                "photon_number": ss.photon_number(),
                "g_eff_over_2pi_hz": ss.g_eff.norm() / std::f64::consts::TAU,
                "frequency_shift_over_omega_b": ss.frequency_shift() / cfg.system.omega_b,
                "resolved_sideband": cfg.system.resolved_sideband(),
                "high_q": cfg.system.high_q(),
                "weak_probe": cfg.drive.weak_probe(ss.epsilon_pu),
                "weak_mech_drive": cfg.drive.weak_mech_drive(ss.epsilon_pu),
            }))?;
        }
        Command::Dressed(args) => {
            let cfg = configure(&args, FigureId::Fig2a)?;
            let ss = solve_steady_state_with(&cfg.system, &cfg.drive, cfg.gauge, &cfg.solver)?;
            let m = dressed_modes(&cfg.system, &ss)?;
            let tau = std::f64::consts::TAU;
            print_json(&json!({
                "dressed_modes": m,
                "lambda_plus_over_2pi_hz": [m.lambda_plus.re / tau, m.lambda_plus.im / tau],
                "lambda_minus_over_2pi_hz": [m.lambda_minus.re / tau, m.lambda_minus.im / tau],
            }))?;
        }
        Command::Figure { id, run } => {
            let id: FigureId = id.parse()?;
            let mut cfg = configure(&run, id)?;
            cfg.output.directory.get_or_insert_with(|| PathBuf::from("."));
            if run.format.is_none() {
                cfg.output.formats = vec![OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg];
            }
            let stem = id.as_str();
            if cfg.second_axis.is_some() {
                grid(&cfg, stem)?;
            } else {
                spectrum(&cfg, stem)?;
            }
        }
        Command::Verify { quick, run } => {
            let cfg = configure(&run, FigureId::Fig3a)?;
            let checks = if quick {
                verify::quick_suite(&cfg.system, &cfg.drive)?
            } else {
                verify::full_suite(&cfg.system, &cfg.drive, run.seed)?
            };
            let mut out = std::io::stdout().lock();
            for c in &checks {
                let status = if c.passed { "ok  " } else { "FAIL" };
                let _ = writeln!(
                    out,
                    "{status} {:<58} max rel err {:.3e} (tol {:.0e})",
                    c.name, c.max_rel_error, c.tolerance
                );
            }
            if !checks.iter().all(|c| c.passed) {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
    }
    Ok(0)
}
