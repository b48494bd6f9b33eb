//! Sideband response at the probe frequency.
//!
//! The probe sideband amplitudes `(δa₊, δb₊, δc₊)` solve
//!
//! ```text
//! 0 = (iλ_a − κ_a/2) δa₊ + i G δb₊ + ε_pr e^{−iφ_p}
//! 0 = (iλ_b − γ_b/2) δb₊ + i G* δa₊ + i J δc₊
//! 0 = (iλ_c − γ_c/2) δc₊ + i J δb₊ + ε_d e^{−iφ_d}
//! ```
//!
//! with `λ_a = δ − Δ'_a`, `λ_b = δ − ω_b`, `λ_c = δ − ω_c`. Three routes
//! evaluate it: the closed form for `δa₊`, a direct dense solve, and the
//! normalized quadrature `ε_T`, written out independently. The dressed-mode
//! and single-resonator forms are the `η = 0` and `J = 0` reductions.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dressed::dressed_modes;
use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::params::{DriveParams, SystemParams};
use crate::steady::{Gauge, SteadyState};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detunings {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Detunings {
    pub fn new(sys: &SystemParams, ss: &SteadyState, delta: f64) -> Self {
        Detunings {
            a: delta - ss.delta_a_eff,
            b: delta - sys.omega_b,
            c: delta - sys.omega_c,
        }
    }
}

/// Complex "half-width minus iλ" factors of the three modes.
#[derive(Debug, Clone, Copy)]
struct Factors {
    cav: C64,
    mb: C64,
    mc: C64,
}

impl Factors {
    fn new(sys: &SystemParams, l: &Detunings) -> Self {
        Factors {
            cav: C64::new(sys.kappa_a / 2.0, -l.a),
            mb: C64::new(sys.gamma_b / 2.0, -l.b),
            mc: C64::new(sys.gamma_c / 2.0, -l.c),
        }
    }
}

fn mech_drive(drive: &DriveParams) -> f64 {
    if drive.drive_at_probe() {
        drive.epsilon_d
    } else {
        0.0
    }
}

/// `⟨δa₊⟩` from the closed-form elimination.
pub fn sideband_closed_form(sys: &SystemParams, ss: &SteadyState, drive: &DriveParams) -> Result<C64> {
    let l = Detunings::new(sys, ss, drive.delta);
    let f = Factors::new(sys, &l);
    let g = ss.g_eff;
    let j2 = sys.j * sys.j;
    let mech = f.mb * f.mc + j2;
    let den = f.cav * mech + g.norm_sqr() * f.mc;
    let scale = f.cav.norm() * (f.mb.norm() * f.mc.norm() + j2) + g.norm_sqr() * f.mc.norm();
    if !(den.norm() > 1e-15 * scale) {
        return Err(Error::Singular(format!(
            "closed-form denominator vanishes at delta = {}",
            drive.delta
        )));
    }
    let phi = drive.phi_d - drive.phi_p;
    let drive_term = -g * sys.j * mech_drive(drive) * C64::from_polar(1.0, -phi);
    let probe_term = mech * drive.epsilon_pr;
    Ok(C64::from_polar(1.0, -drive.phi_p) * (drive_term + probe_term) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandAmplitudes {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

/// All three probe-sideband amplitudes by direct elimination of the 3×3
/// system.
pub fn sideband_linear_solve(sys: &SystemParams, ss: &SteadyState, drive: &DriveParams) -> Result<SidebandAmplitudes> {
    let l = Detunings::new(sys, ss, drive.delta);
    let zero = C64::new(0.0, 0.0);
    let g = ss.g_eff;
    let m = [
        [C64::new(-sys.kappa_a / 2.0, l.a), I * g, zero],
        [I * g.conj(), C64::new(-sys.gamma_b / 2.0, l.b), I * sys.j],
        [zero, I * sys.j, C64::new(-sys.gamma_c / 2.0, l.c)],
    ];
    let rhs = [
        -drive.epsilon_pr * C64::from_polar(1.0, -drive.phi_p),
        zero,
        -mech_drive(drive) * C64::from_polar(1.0, -drive.phi_d),
    ];
    if rhs.iter().all(|z| *z == zero) {
        return Ok(SidebandAmplitudes {
            a: zero,
            b: zero,
            c: zero,
        });
    }
    let [a, b, c] = solve_dense(m, rhs)?;
    Ok(SidebandAmplitudes { a, b, c })
}

/// Probe response at one detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Response {
    /// Probe–pump detuning `δ`.
    pub delta: f64,
    /// Common detuning `λ = δ − ω_b`.
    pub lambda: f64,
    pub detunings: Detunings,
    pub eps_t: C64,
    pub eps_out: C64,
    pub t_pr: C64,
}

impl Response {
    pub fn absorption(&self) -> f64 {
        self.eps_t.re
    }

    pub fn dispersion(&self) -> f64 {
        self.eps_t.im
    }

    /// `|T_pr|²`.
    pub fn transmission(&self) -> f64 {
        self.t_pr.norm_sqr()
    }
}

/// Normalized quadrature `ε_T` in terms of `η` and `φ` directly.
fn quadrature(sys: &SystemParams, ss: &SteadyState, l: &Detunings, eta: f64, phi: f64) -> Result<C64> {
    let kh = C64::new(sys.kappa_a / 2.0, -l.a);
    let bh = C64::new(sys.gamma_b / 2.0, -l.b);
    let ch = C64::new(sys.gamma_c / 2.0, -l.c);
    let g = ss.g_eff;
    let pair = bh * ch + sys.j * sys.j;
    let den = kh * pair + g.norm_sqr() * ch;
    if den.norm() == 0.0 || !den.norm().is_finite() {
        return Err(Error::Singular("quadrature denominator vanishes".into()));
    }
    let num = pair - g * sys.j * eta * C64::from_polar(1.0, -phi);
    Ok(sys.kappa_a * num / den)
}

/// `ε_T`, output field and transmission at `drive.delta`.
pub fn response(sys: &SystemParams, ss: &SteadyState, drive: &DriveParams) -> Result<Response> {
    if !(drive.epsilon_pr > 0.0) {
        return Err(Error::invalid(
            "epsilon_pr",
            "the quadrature eps_T is normalized by the probe amplitude, which must be > 0",
        ));
    }
    let l = Detunings::new(sys, ss, drive.delta);
    let eta = mech_drive(drive) / drive.epsilon_pr;
    let eps_t = quadrature(sys, ss, &l, eta, drive.phi())?;
    let probe = drive.epsilon_pr * C64::from_polar(1.0, -drive.phi_p);
    let a_plus = sideband_closed_form(sys, ss, drive)?;
    Ok(Response {
        delta: drive.delta,
        lambda: l.b,
        detunings: l,
        eps_t,
        eps_out: sys.kappa_a * a_plus - probe,
        t_pr: eps_t - 1.0,
    })
}

/// `ε_T` without mechanical drive, through the dressed modes:
/// `κ/(κ/2 − iλ + A₊/(λ₊ − iλ) + A₋/(λ₋ − iλ))`.
pub fn response_no_drive(sys: &SystemParams, ss: &SteadyState, lambda: f64) -> Result<C64> {
    let m = dressed_modes(sys, ss)?;
    let il = C64::new(0.0, lambda);
    let den =
        C64::new(sys.kappa_a / 2.0, -lambda) + m.a_plus / (m.lambda_plus - il) + m.a_minus / (m.lambda_minus - il);
    Ok(sys.kappa_a / den)
}

/// Single-resonator form `κ/(κ/2 − iλ + |G|²/(γ_b/2 − iλ))`.
pub fn response_single_omit(sys: &SystemParams, ss: &SteadyState, lambda: f64) -> Result<C64> {
    sys.validate()?;
    let den = C64::new(sys.kappa_a / 2.0, -lambda) + ss.g_eff.norm_sqr() / C64::new(sys.gamma_b / 2.0, -lambda);
    Ok(sys.kappa_a / den)
}

/// Drive ratio at which the on-resonance absorption vanishes for `φ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalEta {
    /// `(J² + γ_b γ_c/4) / (|G|·J)`.
    pub eta: f64,
    /// Root of `Re ε_T(η)` located by bisection.
    pub bisection: f64,
}

pub fn critical_eta(sys: &SystemParams, ss: &SteadyState) -> Result<CriticalEta> {
    if ss.gauge != Gauge::RealG {
        return Err(Error::Precondition("critical_eta requires the real-G gauge".into()));
    }
    let g = ss.g_eff.norm();
    if g == 0.0 {
        return Err(Error::UndefinedCriticalPoint("|G_om| = 0".into()));
    }
    if sys.j == 0.0 {
        return Err(Error::UndefinedCriticalPoint("J = 0".into()));
    }
    let tol = 1e-9 * sys.omega_b;
    if (ss.delta_a_eff - sys.omega_b).abs() > tol || (sys.omega_c - sys.omega_b).abs() > tol {
        return Err(Error::Precondition(
            "critical_eta needs Δ'_a = ω_b = ω_c so that all detunings vanish together".into(),
        ));
    }
    let eta = (sys.j * sys.j + sys.gamma_b * sys.gamma_c / 4.0) / (g * sys.j);

    let l = Detunings::new(sys, ss, sys.omega_b);
    let re = |eta: f64| quadrature(sys, ss, &l, eta, 0.0).map(|z| z.re);
    // Re ε_T is affine and decreasing in η; grow the bracket until it changes sign
    let (mut lo, mut hi) = (0.0, 1.0);
    while re(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::UndefinedCriticalPoint("no sign change in Re eps_T(eta)".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if re(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalEta {
        eta,
        bisection: 0.5 * (lo + hi),
    })
}
