//! Integrates the equations of motion and compares against the
//! frequency-domain answer. The full-frame run keeps the counter-rotating
//! coupling, so it agrees with the exact periodic solution but not with the
//! rotating-wave closed form.

use omit_lab::dynamics::linearized_periodic_response;
use omit_lab::verify::{envelope_error, full_frame_sideband, nonlinear_steady_error};
use omit_lab::{figure_preset, sideband_closed_form, solve_steady_state, FigureId, Gauge};

fn main() -> omit_lab::Result<()> {
    let p = figure_preset(FigureId::Fig3a);
    let (sys, drive) = (p.system, p.drive);

    for k in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let d = drive.with_delta(sys.omega_b + k * sys.j);
        println!(
            "envelope, lambda = {k:+.1} J: rel err {:.2e}",
            envelope_error(&sys, &d)?
        );
    }

    let at_m = drive.with_delta(sys.omega_b);
    let ss = solve_steady_state(&sys, &at_m, Gauge::RealG)?;
    let full = full_frame_sideband(&sys, &at_m)?;
    let closed = sideband_closed_form(&sys, &ss, &at_m)?;
    let exact = linearized_periodic_response(&sys, &ss, &at_m)?.plus[0];
    println!(
        "full frame vs closed form:   {:.2e}",
        (full - closed).norm() / closed.norm()
    );
    println!(
        "full frame vs periodic solve: {:.2e}",
        (full - exact).norm() / exact.norm()
    );

    let steady = nonlinear_steady_error(&sys, &drive)?;
    println!(
        "nonlinear, probe off, vs steady state: a {:.2e}, b {:.2e}, c {:.2e}",
        steady[0], steady[1], steady[2]
    );
    Ok(())
}
