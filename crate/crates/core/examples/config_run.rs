//! Loads a TOML run file, sweeps it and writes CSV, JSON and SVG into a
//! scratch directory.
//!
//! cargo run --example config_run -- configs/fig3b.toml /tmp/out

use std::path::PathBuf;

use omit_lab::io::{emit_plot, emit_table, load_config, Artifact, TableFormat};
use omit_lab::sweep::sweep_detuning_with;

fn main() -> omit_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/fig3b.toml"));
    let out = args.next().map(PathBuf::from).unwrap_or_else(std::env::temp_dir);

    let cfg = load_config(&config)?;
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    let table = sweep_detuning_with(&cfg.system, &cfg.drive, cfg.axis, cfg.gauge, &cfg.solver)?;
    let artifact = Artifact::Spectrum(table);
    let stem = cfg.output.stem.as_deref().unwrap_or("spectrum");
    emit_table(&artifact, TableFormat::Csv, out.join(format!("{stem}.csv")), true)?;
    emit_table(&artifact, TableFormat::Json, out.join(format!("{stem}.json")), true)?;
    let written = emit_plot(&artifact, out.join(format!("{stem}.svg")), true)?;
    println!(
        "wrote {stem}.csv, {stem}.json and {} plot file(s) to {}",
        written.len(),
        out.display()
    );
    Ok(())
}
