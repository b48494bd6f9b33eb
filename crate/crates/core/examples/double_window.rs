//! Two transparency windows opened by the mechanical coupling J, preset fig2a.

use omit_lab::{figure_preset, find_features, sweep_detuning, FigureId};

fn main() -> omit_lab::Result<()> {
    let p = figure_preset(FigureId::Fig2a);
    let table = sweep_detuning(&p.system, &p.drive, p.axis)?;
    let f = find_features(&table)?;

    for m in &f.minima {
        println!("minimum at {:+.5} omega_m, Re eps_T = {:.4e}", m.location, m.depth);
    }
    if let Some(s) = f.splitting {
        println!(
            "splitting {s:.5} (2J/omega_m = {:.5})",
            2.0 * p.system.j / p.system.omega_b
        );
    }
    Ok(())
}
