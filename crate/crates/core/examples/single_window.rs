//! With J = 0 the auxiliary resonator decouples and ordinary OMIT remains: a
//! single dip at the mechanical resonance, identical to the two-mode formula.

use omit_lab::{figure_preset, find_features, response_single_omit, sweep_detuning, FigureId};

fn main() -> omit_lab::Result<()> {
    let p = figure_preset(FigureId::Fig2b);
    let table = sweep_detuning(&p.system, &p.drive, p.axis)?;
    let f = find_features(&table)?;
    println!(
        "{} minimum/minima, at {:?}",
        f.minima.len(),
        f.minima.iter().map(|m| m.location).collect::<Vec<_>>()
    );

    let ss = &table.provenance.steady_state;
    let worst = table
        .rows
        .iter()
        .map(|r| {
            let single = response_single_omit(&p.system, ss, r.lambda).unwrap();
            (r.eps_t - single).norm() / single.norm()
        })
        .fold(0.0, f64::max);
    println!("max deviation from the two-mode OMIT formula: {worst:.2e}");
    Ok(())
}
