//! Absorption at the mechanical resonance as the drive ratio eta grows, and
//! the critical ratio where it crosses zero.

use omit_lab::{critical_eta, figure_preset, solve_steady_state, sweep_2d, AxisSpec, FigureId, SecondAxis};

fn main() -> omit_lab::Result<()> {
    let p = figure_preset(FigureId::Fig5);
    let ss = solve_steady_state(&p.system, &p.drive, p.gauge)?;
    let crit = critical_eta(&p.system, &ss)?;
    println!("eta* = {:.4} (bisection {:.4})", crit.eta, crit.bisection);

    let etas: Vec<f64> = (0..=8).map(|k| 0.25 * k as f64 * crit.eta).collect();
    let grid = sweep_2d(
        &p.system,
        &p.drive,
        AxisSpec::new(-0.1, 0.1, 201),
        SecondAxis::eta(etas.clone()),
    )?;
    for (k, eta) in etas.iter().enumerate() {
        let row = grid.row(k);
        println!(
            "eta = {eta:7.3}  Re eps_T(omega_m) = {:+.5}",
            row[row.len() / 2].eps_t.re
        );
    }
    Ok(())
}
