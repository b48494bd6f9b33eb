//! Cross-checks of the frequency-domain results against the time-domain
//! integrators, as run by `omit-lab verify`.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{
    demodulate_mode, integrate_linearized, integrate_nonlinear, integrate_slow_envelope, linearized_periodic_response,
    Controls, Mode,
};
use crate::error::Result;
use crate::params::{hz, DriveParams, Pump, PumpDetuning, SystemParams};
use crate::response::{sideband_closed_form, sideband_linear_solve};
use crate::steady::{solve_steady_state, Gauge};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, err: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            max_rel_error: err,
            tolerance,
            passed: err <= tolerance,
        }
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Norm-wise relative error `‖got − want‖ / ‖want‖` over the three modes.
pub fn vector_rel(want: [C64; 3], got: [C64; 3]) -> f64 {
    let diff: f64 = want.iter().zip(&got).map(|(w, g)| (g - w).norm_sqr()).sum();
    let norm: f64 = want.iter().map(|w| w.norm_sqr()).sum();
    (diff / norm).sqrt()
}

/// Settling time used by the oracles: twenty slowest mechanical lifetimes.
pub fn settle_time(sys: &SystemParams) -> f64 {
    20.0 / sys.gamma_b.min(sys.gamma_c)
}

/// Probe detunings `δ = ω_b + λ` with `λ ∈ {−J, −J/2, 0, J/2, J}`.
pub fn oracle_detunings(sys: &SystemParams) -> [f64; 5] {
    [-1.0, -0.5, 0.0, 0.5, 1.0].map(|k| sys.omega_b + k * sys.j)
}

/// Relative deviation of the settled envelope from the linear solve.
pub fn envelope_error(sys: &SystemParams, drive: &DriveParams) -> Result<f64> {
    let ss = solve_steady_state(sys, drive, Gauge::RealG)?;
    let controls = Controls {
        rtol: 1e-12,
        ..Controls::default()
    };
    let traj = integrate_slow_envelope(sys, &ss, drive, settle_time(sys), &controls)?;
    let (_, y) = traj.last().expect("trajectory has samples");
    let want = sideband_linear_solve(sys, &ss, drive)?;
    Ok(vector_rel([want.a, want.b, want.c], y))
}

/// Envelope oracle at the five standard detunings.
pub fn quick_suite(sys: &SystemParams, drive: &DriveParams) -> Result<Vec<Check>> {
    oracle_detunings(sys)
        .into_iter()
        .map(|delta| {
            let err = envelope_error(sys, &drive.with_delta(delta))?;
            let lambda = (delta - sys.omega_b) / sys.j;
            Ok(Check::new(
                format!("envelope vs linear solve, lambda = {lambda:+.1} J"),
                err,
                1e-8,
            ))
        })
        .collect()
}

/// Demodulated `δa₊` of the full linearized equations at `drive.delta`.
pub fn full_frame_sideband(sys: &SystemParams, drive: &DriveParams) -> Result<C64> {
    let ss = solve_steady_state(sys, drive, Gauge::RealG)?;
    let t_end = settle_time(sys);
    let window = (0.9 * t_end, t_end);
    let controls = Controls {
        record_from: 0.85 * t_end,
        ..Controls::default()
    };
    let traj = integrate_linearized(sys, &ss, drive, t_end, &controls)?;
    Ok(demodulate_mode(&traj, Mode::A, drive.delta, window, 1e-6)?.amplitude_plus)
}

/// Demodulated `δa₊` of the nonlinear equations, measured around the pump
/// steady state in the raw gauge.
pub fn nonlinear_sideband(sys: &SystemParams, drive: &DriveParams) -> Result<C64> {
    let t_end = settle_time(sys);
    let window = (0.9 * t_end, t_end);
    let controls = Controls {
        record_from: 0.85 * t_end,
        ..Controls::default()
    };
    let traj = integrate_nonlinear(sys, drive, t_end, &controls)?;
    Ok(demodulate_mode(&traj, Mode::A, drive.delta, window, 1e-6)?.amplitude_plus)
}

/// Relative deviation of the settled nonlinear trajectory (probe and drive
/// off) from the steady state, per mode.
pub fn nonlinear_steady_error(sys: &SystemParams, drive: &DriveParams) -> Result<[f64; 3]> {
    let quiet = DriveParams {
        epsilon_pr: 0.0,
        epsilon_d: 0.0,
        ..*drive
    };
    let ss = solve_steady_state(sys, &quiet, Gauge::Raw)?;
    let want = [ss.a_s, ss.b_s, ss.c_s];
    // tolerance per mode, so the small mechanical amplitudes are resolved too
    let smallest = want
        .iter()
        .map(|z| z.norm())
        .filter(|&n| n > 0.0)
        .fold(f64::INFINITY, f64::min);
    let t_end = settle_time(sys);
    let controls = Controls {
        rtol: 1e-12,
        atol: smallest.is_finite().then_some(1e-13 * smallest),
        record_from: t_end,
        ..Controls::default()
    };
    let traj = integrate_nonlinear(sys, &quiet, t_end, &controls)?;
    let (_, y) = traj.last().expect("final state is always recorded");
    Ok([0, 1, 2].map(|k| {
        if want[k] == C64::new(0.0, 0.0) {
            y[k].norm()
        } else {
            rel(y[k], want[k])
        }
    }))
}

/// A random parameter set within the model's domain of validity.
pub fn sample_case(rng: &mut impl Rng) -> (SystemParams, DriveParams, Gauge) {
    let omega_b = hz(rng.random_range(0.5e6..2e6));
    let sys = SystemParams {
        omega_a: hz(rng.random_range(1e14..4e14)),
        omega_b,
        omega_c: omega_b * rng.random_range(0.9..1.1),
        kappa_a: hz(rng.random_range(5e4..5e5)),
        gamma_b: hz(rng.random_range(10.0..1e3)),
        gamma_c: hz(rng.random_range(10.0..1e3)),
        g_om: hz(rng.random_range(0.5..10.0)),
        j: hz(rng.random_range(0.0..5e5)),
        mass: None,
        length: None,
    };
    let drive = DriveParams::new(
        Pump::Power {
            watts: rng.random_range(1e-4..5e-3),
        },
        PumpDetuning::Effective(omega_b * rng.random_range(0.8..1.2)),
        1e8,
    )
    .with_delta(omega_b * (1.0 + rng.random_range(-0.7..0.7)));
    let drive = DriveParams {
        phi_p: rng.random_range(0.0..TAU),
        ..drive
    }
    .with_eta_phi(rng.random_range(0.0..3.0), rng.random_range(0.0..TAU));
    let gauge = if rng.random_bool(0.5) { Gauge::RealG } else { Gauge::Raw };
    (sys, drive, gauge)
}

/// Largest closed-form vs linear-solve deviation over `draws` random cases.
pub fn cross_path_error(seed: u64, draws: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let (sys, drive, gauge) = sample_case(&mut rng);
        let ss = solve_steady_state(&sys, &drive, gauge)?;
        let closed = sideband_closed_form(&sys, &ss, &drive)?;
        let linear = sideband_linear_solve(&sys, &ss, &drive)?;
        worst = worst.max(rel(closed, linear.a));
    }
    Ok(worst)
}

/// Every cross-check, including the full-frame and nonlinear integrations.
///
/// The full-frame comparison is made twice: against the closed form, which
/// drops the counter-rotating coupling, and against the exact periodic
/// solution of the same equations. The nonlinear sideband is compared half a
/// coupling away from resonance, where that coupling matters least.
pub fn full_suite(sys: &SystemParams, drive: &DriveParams, seed: u64) -> Result<Vec<Check>> {
    let mut checks = quick_suite(sys, drive)?;

    let at_m = drive.with_delta(sys.omega_b);
    let ss = solve_steady_state(sys, &at_m, Gauge::RealG)?;
    let full = full_frame_sideband(sys, &at_m)?;
    checks.push(Check::new(
        "full-frame linearized vs closed form at delta = omega_m",
        rel(full, sideband_closed_form(sys, &ss, &at_m)?),
        1e-3,
    ));
    checks.push(Check::new(
        "full-frame linearized vs exact periodic solution",
        rel(full, linearized_periodic_response(sys, &ss, &at_m)?.plus[0]),
        1e-6,
    ));

    let steady = nonlinear_steady_error(sys, drive)?;
    checks.push(Check::new(
        "nonlinear (probe off) vs steady state",
        steady.into_iter().fold(0.0, f64::max),
        1e-9,
    ));

    let off = drive.with_delta(sys.omega_b + 0.5 * sys.j);
    let ss_raw = solve_steady_state(sys, &off, Gauge::Raw)?;
    let weak = DriveParams {
        epsilon_pr: 1e-3 * ss_raw.epsilon_pu,
        ..off
    }
    .with_eta_phi(off.eta().unwrap_or(0.0), off.phi());
    checks.push(Check::new(
        "nonlinear vs linear solve at lambda = J/2",
        rel(
            nonlinear_sideband(sys, &weak)?,
            sideband_linear_solve(sys, &ss_raw, &weak)?.a,
        ),
        1e-2,
    ));

    checks.push(Check::new(
        format!("closed form vs linear solve, 1000 draws (seed {seed})"),
        cross_path_error(seed, 1000)?,
        1e-10,
    ));
    Ok(checks)
}
