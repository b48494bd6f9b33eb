//! How the phase of the mechanical drive reshapes the spectrum, presets fig3a to fig3d.

use omit_lab::{figure_preset, find_features, sweep_detuning, FigureId};

fn main() -> omit_lab::Result<()> {
    for id in [FigureId::Fig3a, FigureId::Fig3b, FigureId::Fig3c, FigureId::Fig3d] {
        let p = figure_preset(id);
        let table = sweep_detuning(&p.system, &p.drive, p.axis)?;
        let f = find_features(&table)?;
        let mid = table.len() / 2;
        println!(
            "{id}: phi = {:.2} pi, Re eps_T(0) = {:.4}, Im eps_T(0) = {:+.4}, {} minima",
            p.drive.phi() / std::f64::consts::PI,
            table.rows[mid].eps_t.re,
            table.rows[mid].eps_t.im,
            f.minima.len(),
        );
    }
    Ok(())
}
