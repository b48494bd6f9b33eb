//! Time-domain verification of the frequency-domain response.
//!
//! Three mean-field models are integrated with noise at its zero mean:
//!
//! - the full nonlinear equations of motion in the pump frame,
//! - their linearization about the steady state (fast `e^{−iδt}` oscillation
//!   kept, counter-rotating couplings included),
//! - the slowly varying probe-sideband envelopes, whose fixed point is the
//!   linear solve in [`crate::response`].
//!
//! [`demodulate`] extracts the `e^{−iδt}` component of a trajectory by least
//! squares.

mod demod;
pub mod ode;

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::params::{DriveParams, SystemParams};
use crate::response::Detunings;
use crate::steady::{solve_steady_state, Gauge, SteadyState};

pub use demod::{demodulate, demodulate_mode, DemodResult, Mode, DEFAULT_SETTLE_THRESHOLD};

use ode::{integrate, State, StepControls};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Controls {
    pub rtol: f64,
    /// Absolute tolerance; `None` scales `rtol` by the natural amplitude of the
    /// driven problem.
    pub atol: Option<f64>,
    pub max_steps: usize,
    /// Samples before this instant are not stored.
    pub record_from: f64,
    /// Initial amplitudes; zero (cold start) when `None`.
    pub initial: Option<[C64; 3]>,
}

impl Default for Controls {
    fn default() -> Self {
        Controls {
            rtol: 1e-10,
            atol: None,
            max_steps: 50_000_000,
            record_from: 0.0,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub integrator: String,
    pub model: String,
    pub rtol: f64,
    pub atol: f64,
    pub start: [C64; 3],
    pub t_end: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    pub c: Vec<C64>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    fn new(meta: TrajectoryMeta) -> Self {
        Trajectory {
            times: Vec::new(),
            a: Vec::new(),
            b: Vec::new(),
            c: Vec::new(),
            meta,
        }
    }

    fn push(&mut self, t: f64, y: &State<3>) {
        self.times.push(t);
        self.a.push(y[0]);
        self.b.push(y[1]);
        self.c.push(y[2]);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, [C64; 3])> {
        let k = self.times.len().checked_sub(1)?;
        Some((self.times[k], [self.a[k], self.b[k], self.c[k]]))
    }

    pub fn mode(&self, mode: Mode) -> &[C64] {
        match mode {
            Mode::A => &self.a,
            Mode::B => &self.b,
            Mode::C => &self.c,
        }
    }

    /// Writes `t, re_a, im_a, re_b, im_b, re_c, im_c`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(w, "t,re_a,im_a,re_b,im_b,re_c,im_c").map_err(io)?;
        for k in 0..self.len() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.times[k], self.a[k].re, self.a[k].im, self.b[k].re, self.b[k].im, self.c[k].re, self.c[k].im
            )
            .map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

fn drive_scale(sys: &SystemParams, drive: &DriveParams) -> f64 {
    2.0 * drive.epsilon_pr.max(drive.epsilon_d) / sys.kappa_a
}

fn step_controls(controls: &Controls, natural_scale: f64) -> StepControls {
    let atol = controls
        .atol
        .unwrap_or_else(|| controls.rtol * natural_scale.max(f64::MIN_POSITIVE));
    StepControls {
        rtol: controls.rtol,
        atol,
        initial_step: None,
        min_step_fraction: 1e-15,
        max_steps: controls.max_steps,
    }
}

/// Real 6×6 matrix of an R-linear map on three complex amplitudes, built by
/// probing it with the real and imaginary unit vectors.
fn realify(map: impl Fn(&State<3>) -> State<3>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(6, 6);
    for col in 0..6 {
        let mut e = [C64::new(0.0, 0.0); 3];
        e[col / 2] = if col % 2 == 0 { C64::new(1.0, 0.0) } else { I };
        let out = map(&e);
        for (k, z) in out.iter().enumerate() {
            m[(2 * k, col)] = z.re;
            m[(2 * k + 1, col)] = z.im;
        }
    }
    m
}

fn max_real_eigenvalue(m: DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Homogeneous part of the linearized fluctuation equations.
fn linearized_rhs(sys: &SystemParams, ss: &SteadyState, y: &State<3>) -> State<3> {
    let g = ss.g_eff;
    let [a, b, c] = *y;
    [
        -C64::new(sys.kappa_a / 2.0, ss.delta_a_eff) * a + I * g * (b.conj() + b),
        -C64::new(sys.gamma_b / 2.0, sys.omega_b) * b + I * (g.conj() * a + g * a.conj()) + I * sys.j * c,
        -C64::new(sys.gamma_c / 2.0, sys.omega_c) * c + I * sys.j * b,
    ]
}

/// Homogeneous part of the sideband envelope equations.
fn envelope_rhs(sys: &SystemParams, ss: &SteadyState, l: &Detunings, y: &State<3>) -> State<3> {
    let g = ss.g_eff;
    let [a, b, c] = *y;
    [
        C64::new(-sys.kappa_a / 2.0, l.a) * a + I * g * b,
        C64::new(-sys.gamma_b / 2.0, l.b) * b + I * g.conj() * a + I * sys.j * c,
        C64::new(-sys.gamma_c / 2.0, l.c) * c + I * sys.j * b,
    ]
}

/// Largest eigenvalue real part of the sideband envelope equations at `delta`.
/// Negative means every transient decays.
pub fn envelope_stability_margin(sys: &SystemParams, ss: &SteadyState, delta: f64) -> f64 {
    let l = Detunings::new(sys, ss, delta);
    max_real_eigenvalue(realify(|y| envelope_rhs(sys, ss, &l, y)))
}

/// Largest eigenvalue real part of the full linearized fluctuation equations,
/// counter-rotating couplings included.
pub fn linearized_stability_margin(sys: &SystemParams, ss: &SteadyState) -> f64 {
    max_real_eigenvalue(realify(|y| linearized_rhs(sys, ss, y)))
}

fn require_stable(margin: f64, what: &str) -> Result<()> {
    if margin < 0.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{what} are not stable (largest eigenvalue real part {margin:e} s^-1); settling is not guaranteed"
        )))
    }
}

fn run<F>(
    rhs: F,
    t_end: f64,
    controls: &Controls,
    scale: f64,
    divergence_limit: f64,
    meta: TrajectoryMeta,
) -> Result<Trajectory>
where
    F: FnMut(f64, &State<3>) -> State<3>,
{
    let sc = step_controls(controls, scale);
    let mut traj = Trajectory::new(TrajectoryMeta { atol: sc.atol, ..meta });
    let start = traj.meta.start;
    let record_from = controls.record_from;
    let (_, stats) = integrate(rhs, 0.0, t_end, start, &sc, |t, y| {
        if y.iter().any(|z| !(z.norm() <= divergence_limit)) {
            return Err(Error::Instability { t });
        }
        if t >= record_from {
            traj.push(t, y);
        }
        Ok(())
    })?;
    traj.meta.accepted_steps = stats.accepted;
    traj.meta.rejected_steps = stats.rejected;
    Ok(traj)
}

fn meta(model: &str, controls: &Controls, t_end: f64) -> TrajectoryMeta {
    TrajectoryMeta {
        integrator: "dormand-prince-5(4)".into(),
        model: model.into(),
        rtol: controls.rtol,
        atol: 0.0,
        start: controls.initial.unwrap_or([C64::new(0.0, 0.0); 3]),
        t_end,
        accepted_steps: 0,
        rejected_steps: 0,
    }
}

/// Integrates the linearized fluctuations `(δa, δb, δc)` driven by the probe
/// `ε_pr e^{−iδt−iφ_p}` and the mechanical drive `ε_d e^{−iω_d t−iφ_d}`.
pub fn integrate_linearized(
    sys: &SystemParams,
    ss: &SteadyState,
    drive: &DriveParams,
    t_end: f64,
    controls: &Controls,
) -> Result<Trajectory> {
    require_stable(linearized_stability_margin(sys, ss), "linearized dynamics")?;
    let probe = drive.epsilon_pr * C64::from_polar(1.0, -drive.phi_p);
    let mech = drive.epsilon_d * C64::from_polar(1.0, -drive.phi_d);
    let omega_d = drive.omega_d.unwrap_or(drive.delta);
    let delta = drive.delta;
    let scale = drive_scale(sys, drive);
    run(
        |t, y| {
            let mut dy = linearized_rhs(sys, ss, y);
            dy[0] += probe * C64::from_polar(1.0, -delta * t);
            dy[2] += mech * C64::from_polar(1.0, -omega_d * t);
            dy
        },
        t_end,
        controls,
        scale,
        1e6 * scale.max(1.0),
        meta("linearized", controls, t_end),
    )
}

/// Integrates the probe-sideband envelopes `(δa₊, δb₊, δc₊)` under constant
/// drives; their long-time limit is the linear-solve fixed point.
pub fn integrate_slow_envelope(
    sys: &SystemParams,
    ss: &SteadyState,
    drive: &DriveParams,
    t_end: f64,
    controls: &Controls,
) -> Result<Trajectory> {
    require_stable(
        envelope_stability_margin(sys, ss, drive.delta),
        "sideband envelope equations",
    )?;
    let l = Detunings::new(sys, ss, drive.delta);
    let probe = drive.epsilon_pr * C64::from_polar(1.0, -drive.phi_p);
    let mech = if drive.drive_at_probe() {
        drive.epsilon_d * C64::from_polar(1.0, -drive.phi_d)
    } else {
        C64::new(0.0, 0.0)
    };
    let scale = drive_scale(sys, drive);
    run(
        |_, y| {
            let mut dy = envelope_rhs(sys, ss, &l, y);
            dy[0] += probe;
            dy[2] += mech;
            dy
        },
        t_end,
        controls,
        scale,
        1e6 * scale.max(1.0),
        meta("slow-envelope", controls, t_end),
    )
}

/// Amplitudes of the periodic steady state of the full linearized equations.
///
/// The counter-rotating couplings `G(δb + δb*)` mix the `e^{−iδt}` and
/// `e^{+iδt}` components, so both are solved together as one 6×6 system.
/// This is the exact limit of [`integrate_linearized`]; the envelope equations
/// and the closed form keep only the `plus` part of the coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicResponse {
    /// Coefficients of `e^{−iδt}` for `(δa, δb, δc)`.
    pub plus: [C64; 3],
    /// Coefficients of `e^{+iδt}`.
    pub minus: [C64; 3],
}

pub fn linearized_periodic_response(
    sys: &SystemParams,
    ss: &SteadyState,
    drive: &DriveParams,
) -> Result<PeriodicResponse> {
    let delta = drive.delta;
    if delta == 0.0 {
        return Err(Error::Precondition("the two sidebands coincide at delta = 0".into()));
    }
    let g = ss.g_eff;
    let gc = g.conj();
    let z = C64::new(0.0, 0.0);
    let j = C64::new(0.0, sys.j);
    // unknowns: a₊, b₊, c₊, conj(a₋), conj(b₋), conj(c₋)
    let da = C64::new(sys.kappa_a / 2.0, ss.delta_a_eff - delta);
    let db = C64::new(sys.gamma_b / 2.0, sys.omega_b - delta);
    let dc = C64::new(sys.gamma_c / 2.0, sys.omega_c - delta);
    let ea = C64::new(sys.kappa_a / 2.0, -ss.delta_a_eff - delta);
    let eb = C64::new(sys.gamma_b / 2.0, -sys.omega_b - delta);
    let ec = C64::new(sys.gamma_c / 2.0, -sys.omega_c - delta);
    let m = [
        [da, -I * g, z, z, -I * g, z],
        [-I * gc, db, -j, -I * g, z, z],
        [z, -j, dc, z, z, z],
        [z, I * gc, z, ea, I * gc, z],
        [I * gc, z, z, I * g, eb, j],
        [z, z, z, z, j, ec],
    ];
    let mech = if drive.drive_at_probe() {
        drive.epsilon_d * C64::from_polar(1.0, -drive.phi_d)
    } else {
        z
    };
    let rhs = [drive.epsilon_pr * C64::from_polar(1.0, -drive.phi_p), z, mech, z, z, z];
    let x = solve_dense(m, rhs)?;
    Ok(PeriodicResponse {
        plus: [x[0], x[1], x[2]],
        minus: [x[3].conj(), x[4].conj(), x[5].conj()],
    })
}

/// Time derivative of the envelope equations at a given state.
pub fn envelope_derivative(sys: &SystemParams, ss: &SteadyState, drive: &DriveParams, y: &[C64; 3]) -> [C64; 3] {
    let l = Detunings::new(sys, ss, drive.delta);
    let mut dy = envelope_rhs(sys, ss, &l, y);
    dy[0] += drive.epsilon_pr * C64::from_polar(1.0, -drive.phi_p);
    if drive.drive_at_probe() {
        dy[2] += drive.epsilon_d * C64::from_polar(1.0, -drive.phi_d);
    }
    dy
}

/// Integrates the full nonlinear mean-field equations in the pump frame.
///
/// The bare detuning and pump amplitude are resolved through the steady-state
/// solver (raw gauge), which is also used to bound the amplitude for
/// divergence detection.
pub fn integrate_nonlinear(
    sys: &SystemParams,
    drive: &DriveParams,
    t_end: f64,
    controls: &Controls,
) -> Result<Trajectory> {
    let ss = solve_steady_state(sys, drive, Gauge::Raw)?;
    let eps_pu = ss.epsilon_pu;
    let delta_a = ss.delta_a;
    let probe = drive.epsilon_pr * C64::from_polar(1.0, -drive.phi_p);
    let mech = drive.epsilon_d * C64::from_polar(1.0, -drive.phi_d);
    let omega_d = drive.omega_d.unwrap_or(drive.delta);
    let delta = drive.delta;
    let g = sys.g_om;
    let steady_scale = ss
        .a_s
        .norm()
        .max(ss.b_s.norm())
        .max(ss.c_s.norm())
        .max(drive_scale(sys, drive));
    let limit = 1e6 * steady_scale.max(1.0);
    run(
        |t, y| {
            let [a, b, c] = *y;
            [
                -C64::new(sys.kappa_a / 2.0, delta_a) * a
                    + I * g * a * (b.conj() + b)
                    + eps_pu
                    + probe * C64::from_polar(1.0, -delta * t),
                -C64::new(sys.gamma_b / 2.0, sys.omega_b) * b + I * g * a.norm_sqr() + I * sys.j * c,
                -C64::new(sys.gamma_c / 2.0, sys.omega_c) * c
                    + I * sys.j * b
                    + mech * C64::from_polar(1.0, -omega_d * t),
            ]
        },
        t_end,
        controls,
        steady_scale,
        limit,
        meta("nonlinear", controls, t_end),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Pump, PumpDetuning};
    use crate::response::sideband_linear_solve;

    fn small_system(g_om: f64, j: f64) -> SystemParams {
        // scaled-down device so the fast-frame tests stay cheap
        SystemParams {
            omega_a: 1e15,
            omega_b: 200.0,
            omega_c: 200.0,
            kappa_a: 20.0,
            gamma_b: 2.0,
            gamma_c: 3.0,
            g_om,
            j,
            mass: None,
            length: None,
        }
    }

    fn steady(sys: &SystemParams, eps_pu: f64) -> (DriveParams, SteadyState) {
        let drive = DriveParams::new(
            Pump::Amplitude { epsilon: eps_pu },
            PumpDetuning::Effective(sys.omega_b),
            1.0,
        );
        let ss = solve_steady_state(sys, &drive, Gauge::RealG).unwrap();
        (drive, ss)
    }

    #[test]
    fn zero_drives_give_zero_trajectory() {
        let sys = small_system(1e-3, 5.0);
        let (drive, ss) = steady(&sys, 1e4);
        let d = DriveParams {
            epsilon_pr: 0.0,
            ..drive
        };
        let t = integrate_linearized(
            &sys,
            &ss,
            &d,
            1.0,
            &Controls {
                atol: Some(1e-12),
                ..Controls::default()
            },
        )
        .unwrap();
        assert!(t.a.iter().chain(&t.b).chain(&t.c).all(|z| *z == C64::new(0.0, 0.0)));
        let e = integrate_slow_envelope(
            &sys,
            &ss,
            &d,
            1.0,
            &Controls {
                atol: Some(1e-12),
                ..Controls::default()
            },
        )
        .unwrap();
        assert_eq!(e.last().unwrap().1, [C64::new(0.0, 0.0); 3]);
    }

    #[test]
    fn uncoupled_cavity_settles_onto_driven_solution() {
        let sys = small_system(1e-300, 0.0);
        let (drive, ss) = steady(&sys, 1.0);
        let drive = DriveParams {
            phi_p: 0.4,
            ..drive.with_delta(215.0)
        };
        let traj = integrate_linearized(&sys, &ss, &drive, 3.0, &Controls::default()).unwrap();
        let (t, y) = traj.last().unwrap();
        let la = drive.delta - ss.delta_a_eff;
        let expected = C64::from_polar(1.0, -0.4) * drive.epsilon_pr * C64::from_polar(1.0, -drive.delta * t)
            / C64::new(sys.kappa_a / 2.0, -la);
        assert!((y[0] - expected).norm() < 1e-8 * expected.norm());
    }

    #[test]
    fn envelope_scalar_fixed_point() {
        let sys = small_system(1e-300, 0.0);
        let (drive, ss) = steady(&sys, 1.0);
        let drive = DriveParams {
            phi_p: 1.0,
            ..drive.with_delta(ss.delta_a_eff)
        };
        let traj = integrate_slow_envelope(&sys, &ss, &drive, 5.0, &Controls::default()).unwrap();
        let expected = 2.0 * drive.epsilon_pr * C64::from_polar(1.0, -1.0) / sys.kappa_a;
        assert!((traj.last().unwrap().1[0] - expected).norm() < 1e-9 * expected.norm());
    }

    #[test]
    fn envelope_settles_to_linear_solve() {
        let sys = small_system(0.05, 8.0);
        let (drive, ss) = steady(&sys, 2e3);
        let drive = drive.with_eta_phi(0.7, 1.2).with_delta(sys.omega_b + 4.0);
        assert!(envelope_stability_margin(&sys, &ss, drive.delta) < 0.0);
        let traj = integrate_slow_envelope(
            &sys,
            &ss,
            &drive,
            40.0,
            &Controls {
                rtol: 1e-12,
                ..Controls::default()
            },
        )
        .unwrap();
        let want = sideband_linear_solve(&sys, &ss, &drive).unwrap();
        let got = traj.last().unwrap().1;
        for (g, w) in got.iter().zip([want.a, want.b, want.c]) {
            assert!((g - w).norm() < 1e-8 * w.norm(), "{g} vs {w}");
        }
    }

    #[test]
    fn linearity_under_joint_scaling() {
        let sys = small_system(0.05, 8.0);
        let (drive, ss) = steady(&sys, 2e3);
        let d1 = drive.with_eta_phi(0.5, 0.3).with_delta(sys.omega_b);
        let d2 = DriveParams {
            epsilon_pr: 2.0 * d1.epsilon_pr,
            epsilon_d: 2.0 * d1.epsilon_d,
            ..d1
        };
        let c = Controls {
            rtol: 1e-12,
            atol: Some(1e-15),
            record_from: 5.0,
            ..Controls::default()
        };
        let t1 = integrate_linearized(&sys, &ss, &d1, 8.0, &c).unwrap();
        let t2 = integrate_linearized(&sys, &ss, &d2, 8.0, &c).unwrap();
        let r1 = demodulate(&t1, d1.delta, (5.5, 8.0)).unwrap();
        let r2 = demodulate(&t2, d2.delta, (5.5, 8.0)).unwrap();
        assert!((r2.amplitude_plus - 2.0 * r1.amplitude_plus).norm() < 1e-9 * r2.amplitude_plus.norm());
    }

    #[test]
    fn full_frame_settles_to_periodic_solution() {
        let sys = small_system(0.05, 8.0);
        let (drive, ss) = steady(&sys, 2e3);
        let drive = drive.with_eta_phi(0.8, 0.6).with_delta(sys.omega_b + 5.0);
        let exact = linearized_periodic_response(&sys, &ss, &drive).unwrap();
        let c = Controls {
            rtol: 1e-12,
            record_from: 30.0,
            ..Controls::default()
        };
        let traj = integrate_linearized(&sys, &ss, &drive, 36.0, &c).unwrap();
        for (mode, k) in [(Mode::A, 0), (Mode::B, 1), (Mode::C, 2)] {
            let r = demodulate_mode(&traj, mode, drive.delta, (30.5, 36.0), 1e-6).unwrap();
            assert!(
                (r.amplitude_plus - exact.plus[k]).norm() < 1e-7 * exact.plus[k].norm(),
                "{mode:?}"
            );
            assert!(
                (r.amplitude_minus - exact.minus[k]).norm() < 1e-7 * exact.plus[0].norm(),
                "{mode:?}"
            );
        }
        // the counter-rotating part is what separates it from the envelope solution
        let rwa = sideband_linear_solve(&sys, &ss, &drive).unwrap();
        assert!((rwa.a - exact.plus[0]).norm() > 1e-6 * rwa.a.norm());
    }

    #[test]
    fn free_decay_norm_shrinks() {
        let sys = small_system(0.05, 8.0);
        let (drive, ss) = steady(&sys, 2e3);
        let d = DriveParams {
            epsilon_pr: 0.0,
            ..drive
        };
        let start = [C64::new(1.0, 0.5), C64::new(-0.3, 0.2), C64::new(0.0, 1.0)];
        let c = Controls {
            initial: Some(start),
            atol: Some(1e-14),
            ..Controls::default()
        };
        let traj = integrate_linearized(&sys, &ss, &d, 6.0, &c).unwrap();
        let norm_at = |t: f64| {
            let k = traj.times.partition_point(|&s| s < t);
            (traj.a[k].norm_sqr() + traj.b[k].norm_sqr() + traj.c[k].norm_sqr()).sqrt()
        };
        let t0 = 10.0 / sys.kappa_a;
        for k in 0..20 {
            let t = t0 + k as f64 * 0.25;
            assert!(norm_at(t) <= norm_at(t / 2.0), "t = {t}");
        }
    }

    #[test]
    fn nonlinear_relaxes_to_steady_state() {
        let sys = small_system(0.05, 8.0);
        let drive = DriveParams::new(Pump::Amplitude { epsilon: 2e3 }, PumpDetuning::Bare(sys.omega_b), 0.0);
        let ss = solve_steady_state(&sys, &drive, Gauge::Raw).unwrap();
        let traj = integrate_nonlinear(
            &sys,
            &drive,
            40.0,
            &Controls {
                rtol: 1e-12,
                ..Controls::default()
            },
        )
        .unwrap();
        let y = traj.last().unwrap().1;
        // tolerances are absolute at the scale of the largest amplitude
        let scale = ss.a_s.norm().max(ss.b_s.norm()).max(ss.c_s.norm());
        for (g, w) in y.iter().zip([ss.a_s, ss.b_s, ss.c_s]) {
            assert!((g - w).norm() < 1e-10 * scale, "{g} vs {w}");
        }
    }

    #[test]
    fn all_drives_off_decays_to_zero() {
        let sys = small_system(0.05, 8.0);
        let drive = DriveParams::new(Pump::Amplitude { epsilon: 0.0 }, PumpDetuning::Bare(sys.omega_b), 0.0);
        let c = Controls {
            initial: Some([C64::new(3.0, 0.0), C64::new(0.0, 2.0), C64::new(1.0, 1.0)]),
            atol: Some(1e-14),
            ..Controls::default()
        };
        let traj = integrate_nonlinear(&sys, &drive, 30.0, &c).unwrap();
        assert!(traj.last().unwrap().1.iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn unstable_parameters_are_refused() {
        // blue-detuned pump with strong coupling: parametric instability
        let sys = small_system(0.5, 0.0);
        let drive = DriveParams::new(
            Pump::Amplitude { epsilon: 2e3 },
            PumpDetuning::Effective(-sys.omega_b),
            1.0,
        );
        let ss = solve_steady_state(&sys, &drive, Gauge::RealG).unwrap();
        assert!(linearized_stability_margin(&sys, &ss) > 0.0);
        assert!(matches!(
            integrate_linearized(&sys, &ss, &drive, 1.0, &Controls::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn csv_dump() {
        let sys = small_system(1e-300, 0.0);
        let (drive, ss) = steady(&sys, 1.0);
        let traj = integrate_slow_envelope(&sys, &ss, &drive, 0.1, &Controls::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        traj.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,re_a,im_a,re_b,im_b,re_c,im_c");
        assert_eq!(text.lines().count(), traj.len() + 1);
    }
}
