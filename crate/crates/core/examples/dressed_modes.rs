//! Dressed mechanical modes and the partial-fraction form of the spectrum.

use std::f64::consts::TAU;

use omit_lab::sweep::{reference_drive, reference_system};
use omit_lab::{dressed_modes, response, response_no_drive, solve_steady_state, Gauge};

fn main() -> omit_lab::Result<()> {
    let sys = reference_system();
    let drive = reference_drive(&sys);
    let ss = solve_steady_state(&sys, &drive, Gauge::RealG)?;
    let m = dressed_modes(&sys, &ss)?;
    println!(
        "lambda+ / 2pi = {:.1} {:+.1}i Hz",
        m.lambda_plus.re / TAU,
        m.lambda_plus.im / TAU
    );
    println!(
        "lambda- / 2pi = {:.1} {:+.1}i Hz",
        m.lambda_minus.re / TAU,
        m.lambda_minus.im / TAU
    );
    println!(
        "A+ = {:.4e}, A- = {:.4e}, |G|^2 = {:.4e}",
        m.a_plus,
        m.a_minus,
        ss.g_eff.norm_sqr()
    );
    println!("regime: {:?}", m.regime);

    for x in [-0.3, 0.0, 0.3] {
        let d = drive.with_delta(sys.omega_b * (1.0 + x));
        let direct = response(&sys, &ss, &d)?;
        let dressed = response_no_drive(&sys, &ss, direct.lambda)?;
        println!("x = {x:+.1}: direct {:.6}, dressed {:.6}", direct.eps_t, dressed);
    }
    Ok(())
}
