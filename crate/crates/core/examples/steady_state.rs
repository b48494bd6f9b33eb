//! Pump steady state of the reference device and the regime flags that decide
//! whether the linearized response can be trusted.

use omit_lab::sweep::{reference_drive, reference_system};
use omit_lab::{solve_steady_state, Gauge};

fn main() -> omit_lab::Result<()> {
    let sys = reference_system();
    let drive = reference_drive(&sys);
    let ss = solve_steady_state(&sys, &drive, Gauge::RealG)?;

    println!("pump amplitude eps_pu   = {:.4e} s^-1/2", ss.epsilon_pu);
    println!("intracavity photons     = {:.4e}", ss.photon_number());
    println!(
        "|G_om| / 2pi            = {:.2} kHz",
        ss.g_eff.norm() / std::f64::consts::TAU / 1e3
    );
    println!("bare detuning / omega_b = {:.6}", ss.delta_a / sys.omega_b);
    println!("shift (D - D') / omega_b = {:.3e}", ss.frequency_shift() / sys.omega_b);
    println!(
        "resolved sideband: {}, high Q: {}",
        sys.resolved_sideband(),
        sys.high_q()
    );
    Ok(())
}
