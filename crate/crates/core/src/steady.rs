//! Classical steady state under the strong pump alone.
//!
//! Eliminating `c_s` gives `b_s = g·n·χ` with `n = |a_s|²` and
//! `χ = i / (iω_b + γ_b/2 + J²/(iω_c + γ_c/2))`. The shifted detuning is then
//! `Δ' = Δ − s·n` with `s = 2g²·Re χ`, and `n` solves the real cubic
//! `n·((Δ − s·n)² + κ²/4) = ε²`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{pump_amplitude, DriveParams, Pump, PumpDetuning, SystemParams};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Phase convention for the intracavity pump amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gauge {
    /// `a_s` exactly as it solves the steady-state equations.
    Raw,
    /// `a_s` rotated onto the positive real axis, so `G_om` is real.
    #[default]
    RealG,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverControls {
    pub damping: f64,
    /// Relative tolerance on `|a_s|²` between successive iterates.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverControls {
    fn default() -> Self {
        SolverControls {
            damping: 0.5,
            tolerance: 1e-14,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub a_s: C64,
    pub b_s: C64,
    pub c_s: C64,
    /// Bare detuning `Δ_a = ω_a − ω_pu`.
    pub delta_a: f64,
    /// Radiation-pressure shifted detuning `Δ'_a`.
    pub delta_a_eff: f64,
    /// Effective coupling `G_om = g_om·a_s` in the chosen gauge.
    pub g_eff: C64,
    pub gauge: Gauge,
    /// Angle removed from `a_s` by the gauge (zero for `Raw`).
    pub rotation: f64,
    /// Largest absolute residual of the three steady-state equations.
    pub residual: f64,
    /// More than one positive root exists at this bare detuning.
    pub multi_root: bool,
    /// Fixed-point iterations used; zero when the root came from bracketing
    /// or the detuning was locked.
    pub iterations: usize,
    pub epsilon_pu: f64,
    pub omega_pu: f64,
}

impl SteadyState {
    pub fn photon_number(&self) -> f64 {
        self.a_s.norm_sqr()
    }

    /// `a_s` before any gauge rotation.
    pub fn a_s_raw(&self) -> C64 {
        self.a_s * C64::from_polar(1.0, self.rotation)
    }

    /// Radiation-pressure frequency shift `Δ_a − Δ'_a`.
    pub fn frequency_shift(&self) -> f64 {
        self.delta_a - self.delta_a_eff
    }
}

/// Mechanical susceptibility with the auxiliary resonator eliminated.
pub(crate) fn mech_chi(sys: &SystemParams) -> C64 {
    let dc = C64::new(sys.gamma_c / 2.0, sys.omega_c);
    let db = C64::new(sys.gamma_b / 2.0, sys.omega_b) + sys.j * sys.j / dc;
    I / db
}

/// Real cubic `f(n) = n((Δ − s n)² + κ²/4) − ε²` whose roots are the
/// admissible intracavity photon numbers.
#[derive(Debug, Clone, Copy)]
struct PhotonCubic {
    delta: f64,
    shift: f64,
    half_kappa_sq: f64,
    eps_sq: f64,
}

impl PhotonCubic {
    fn eval(&self, n: f64) -> f64 {
        let d = self.delta - self.shift * n;
        n * (d * d + self.half_kappa_sq) - self.eps_sq
    }

    fn fixed_point_map(&self, n: f64) -> f64 {
        let d = self.delta - self.shift * n;
        self.eps_sq / (d * d + self.half_kappa_sq)
    }

    /// Turning points of `f` on the positive axis, if any.
    fn turning_points(&self) -> Option<(f64, f64)> {
        let s = self.shift;
        if s == 0.0 {
            return None;
        }
        let disc = 4.0 * s * s * (self.delta * self.delta - 3.0 * self.half_kappa_sq);
        if disc <= 0.0 {
            return None;
        }
        let root = disc.sqrt();
        let lo = (4.0 * s * self.delta - root) / (6.0 * s * s);
        let hi = (4.0 * s * self.delta + root) / (6.0 * s * s);
        (lo > 0.0).then_some((lo, hi))
    }

    fn multi_root(&self) -> bool {
        match self.turning_points() {
            Some((lo, hi)) => self.eval(lo) > 0.0 && self.eval(hi) < 0.0,
            None => false,
        }
    }

    /// Lowest positive root by bracketing and bisection.
    fn lowest_root(&self) -> Result<f64> {
        if self.eps_sq == 0.0 {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = match self.turning_points() {
            Some((t1, _)) if self.eval(t1) >= 0.0 => (0.0, t1),
            Some((_, t2)) => (t2, self.grow_bracket(t2)?),
            None => (0.0, self.grow_bracket(0.0)?),
        };
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let root = if self.eval(lo).abs() <= self.eval(hi).abs() {
            lo
        } else {
            hi
        };
        if !root.is_finite() {
            return Err(Error::SolverInternal("non-finite bracketed root".into()));
        }
        Ok(root)
    }

    fn grow_bracket(&self, from: f64) -> Result<f64> {
        let mut hi = from.max(self.eps_sq / (self.delta * self.delta + self.half_kappa_sq));
        if hi == 0.0 {
            hi = f64::MIN_POSITIVE;
        }
        for _ in 0..4096 {
            if self.eval(hi) > 0.0 {
                return Ok(hi);
            }
            hi *= 2.0;
            if !hi.is_finite() {
                break;
            }
        }
        Err(Error::SolverInternal("could not bracket photon-number root".into()))
    }
}

/// Solves the steady state with default solver controls.
pub fn solve_steady_state(sys: &SystemParams, drive: &DriveParams, gauge: Gauge) -> Result<SteadyState> {
    solve_steady_state_with(sys, drive, gauge, &SolverControls::default())
}

pub fn solve_steady_state_with(
    sys: &SystemParams,
    drive: &DriveParams,
    gauge: Gauge,
    controls: &SolverControls,
) -> Result<SteadyState> {
    sys.validate()?;
    drive.validate()?;
    if !(controls.damping > 0.0 && controls.damping <= 1.0) {
        return Err(Error::invalid("damping", "must lie in (0, 1]"));
    }
    let chi = mech_chi(sys);
    let shift = 2.0 * sys.g_om * sys.g_om * chi.re;
    let half_kappa_sq = 0.25 * sys.kappa_a * sys.kappa_a;

    let omega_pu_for = |delta_a: f64| -> Result<f64> {
        let w = sys.omega_a - delta_a;
        if w > 0.0 {
            Ok(w)
        } else {
            Err(Error::invalid("pump_detuning", "pump frequency ω_a − Δ_a must be > 0"))
        }
    };
    let epsilon_for = |delta_a: f64| -> Result<f64> {
        match drive.pump {
            Pump::Amplitude { epsilon } => Ok(epsilon),
            Pump::Power { watts } => pump_amplitude(watts, omega_pu_for(delta_a)?, sys.kappa_a),
        }
    };

    let (delta_a, delta_eff, epsilon_pu, iterations) = match drive.pump_detuning {
        PumpDetuning::Effective(delta_eff) => {
            // n follows directly from Δ'; only the power→amplitude conversion
            // depends (very weakly) on the bare detuning
            let mut delta_a = delta_eff;
            let mut eps = epsilon_for(delta_a)?;
            let mut n = eps * eps / (delta_eff * delta_eff + half_kappa_sq);
            for _ in 0..16 {
                let next = delta_eff + shift * n;
                let done = next == delta_a;
                delta_a = next;
                eps = epsilon_for(delta_a)?;
                n = eps * eps / (delta_eff * delta_eff + half_kappa_sq);
                if done {
                    break;
                }
            }
            (delta_a, delta_eff, eps, 0)
        }
        PumpDetuning::Bare(delta_a) => {
            let eps = epsilon_for(delta_a)?;
            let cubic = PhotonCubic {
                delta: delta_a,
                shift,
                half_kappa_sq,
                eps_sq: eps * eps,
            };
            let (n, iterations) = solve_photon_number(&cubic, controls)?;
            (delta_a, delta_a - shift * n, eps, iterations)
        }
    };

    let multi_root = PhotonCubic {
        delta: delta_a,
        shift,
        half_kappa_sq,
        eps_sq: epsilon_pu * epsilon_pu,
    }
    .multi_root();

    let a_raw = epsilon_pu / C64::new(sys.kappa_a / 2.0, delta_eff);
    let b_s = sys.g_om * a_raw.norm_sqr() * chi;
    let c_s = I * sys.j * b_s / C64::new(sys.gamma_c / 2.0, sys.omega_c);

    let (residual, scale) = residuals(sys, delta_a, epsilon_pu, a_raw, b_s, c_s);
    if !residual.is_finite() {
        return Err(Error::SolverInternal("non-finite steady-state residual".into()));
    }
    if residual > 1e-12 * scale {
        return Err(Error::Convergence { iterations, residual });
    }

    let rotation = match gauge {
        Gauge::Raw => 0.0,
        Gauge::RealG => {
            if a_raw == C64::new(0.0, 0.0) {
                0.0
            } else {
                a_raw.arg()
            }
        }
    };
    let a_s = match gauge {
        Gauge::Raw => a_raw,
        Gauge::RealG => C64::new(a_raw.norm(), 0.0),
    };

    Ok(SteadyState {
        a_s,
        b_s,
        c_s,
        delta_a,
        delta_a_eff: delta_eff,
        g_eff: sys.g_om * a_s,
        gauge,
        rotation,
        residual,
        multi_root,
        iterations,
        epsilon_pu,
        omega_pu: omega_pu_for(delta_a)?,
    })
}

fn solve_photon_number(cubic: &PhotonCubic, controls: &SolverControls) -> Result<(f64, usize)> {
    if cubic.eps_sq == 0.0 {
        return Ok((0.0, 0));
    }
    let seed = cubic.fixed_point_map(0.0);
    let mut n = seed;
    let mut converged = None;
    for k in 1..=controls.max_iterations {
        let next = (1.0 - controls.damping) * n + controls.damping * cubic.fixed_point_map(n);
        if !next.is_finite() {
            break;
        }
        let step = (next - n).abs();
        n = next;
        if step <= controls.tolerance * n {
            converged = Some(k);
            break;
        }
    }
    let on_lowest_branch = |n: f64| match cubic.turning_points() {
        Some((t1, _)) if cubic.multi_root() => n <= t1,
        _ => true,
    };
    match converged {
        Some(k) if on_lowest_branch(n) => Ok((n, k)),
        _ => {
            let root = cubic.lowest_root()?;
            let residual = cubic.eval(root).abs();
            // bisection ends on a sign change; a large |f| means the bracket
            // collapsed on a pathology
            if residual > 1e-6 * cubic.eps_sq {
                return Err(Error::Convergence {
                    iterations: controls.max_iterations,
                    residual,
                });
            }
            Ok((root, 0))
        }
    }
}

/// Residuals of the three steady-state equations, evaluated in the raw gauge,
/// together with the dominant term scale they are judged against.
fn residuals(sys: &SystemParams, delta_a: f64, eps: f64, a: C64, b: C64, c: C64) -> (f64, f64) {
    let delta_eff = delta_a - sys.g_om * 2.0 * b.re;
    let n = a.norm_sqr();
    let db = C64::new(sys.gamma_b / 2.0, sys.omega_b);
    let dc = C64::new(sys.gamma_c / 2.0, sys.omega_c);
    let r1 = (a * C64::new(sys.kappa_a / 2.0, delta_eff) - eps).norm();
    let r2 = (b * db - I * sys.g_om * n - I * sys.j * c).norm();
    let r3 = (c * dc - I * sys.j * b).norm();
    let scale = (a.norm() * sys.kappa_a).max(eps).max(sys.g_om * n).max((b * db).norm());
    (r1.max(r2).max(r3), scale)
}

/// Residual of the three steady-state equations for an arbitrary candidate,
/// with `a_s` taken in the raw gauge.
pub fn steady_state_residual(sys: &SystemParams, ss: &SteadyState) -> f64 {
    residuals(sys, ss.delta_a, ss.epsilon_pu, ss.a_s_raw(), ss.b_s, ss.c_s).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::hz;

    fn reference_system(j: f64) -> SystemParams {
        SystemParams {
            omega_a: hz(194e12),
            omega_b: hz(947e3),
            omega_c: hz(947e3),
            kappa_a: hz(215e3),
            gamma_b: hz(140.0),
            gamma_c: hz(140.0),
            g_om: hz(2.7),
            j,
            mass: None,
            length: None,
        }
    }

    fn bare_drive(sys: &SystemParams) -> DriveParams {
        DriveParams::new(Pump::Power { watts: 1e-3 }, PumpDetuning::Bare(sys.omega_b), 1e8)
    }

    /// Scans `f(n)` on a fine logarithmic grid and bisects the first sign
    /// change. Shares nothing with the solver beyond the physics.
    fn grid_scan_root(sys: &SystemParams, delta: f64, eps: f64) -> f64 {
        let dc = C64::new(sys.gamma_c / 2.0, sys.omega_c);
        let f = |n: f64| {
            let b = C64::new(0.0, sys.g_om * n) / (C64::new(sys.gamma_b / 2.0, sys.omega_b) + sys.j * sys.j / dc);
            let d = delta - 2.0 * sys.g_om * b.re;
            n * (d * d + sys.kappa_a * sys.kappa_a / 4.0) - eps * eps
        };
        let grid: Vec<f64> = (0..=200_000)
            .map(|k| 10f64.powf(-2.0 + 14.0 * k as f64 / 200_000.0))
            .collect();
        let k = grid
            .windows(2)
            .position(|w| f(w[0]) <= 0.0 && f(w[1]) > 0.0)
            .expect("sign change");
        let (mut lo, mut hi) = (grid[k], grid[k + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid
            } else {
                lo = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn undriven_cavity_is_empty() {
        let sys = reference_system(hz(320e3));
        let drive = DriveParams::new(Pump::Amplitude { epsilon: 0.0 }, PumpDetuning::Bare(1.0e6), 0.0);
        let ss = solve_steady_state(&sys, &drive, Gauge::RealG).unwrap();
        assert_eq!(ss.a_s, C64::new(0.0, 0.0));
        assert_eq!(ss.b_s, C64::new(0.0, 0.0));
        assert_eq!(ss.c_s, C64::new(0.0, 0.0));
        assert_eq!(ss.delta_a_eff, 1.0e6);
    }

    #[test]
    fn reference_point_matches_grid_scan() {
        let sys = reference_system(hz(320e3));
        let ss = solve_steady_state(&sys, &bare_drive(&sys), Gauge::Raw).unwrap();
        let n_oracle = grid_scan_root(&sys, ss.delta_a, ss.epsilon_pu);
        let n = ss.photon_number();
        assert!(((n - n_oracle) / n_oracle).abs() < 1e-12, "{n} vs {n_oracle}");
        // the shift is about 5.1 kHz·2π, i.e. 5.4e-3 of ω_b
        let rel_shift = ss.frequency_shift() / sys.omega_b;
        assert!(rel_shift > 5.0e-3 && rel_shift < 5.8e-3, "{rel_shift}");
        assert!(!ss.multi_root);
        assert!(ss.iterations > 0);
    }

    #[test]
    fn decoupled_limit() {
        let sys = reference_system(0.0);
        let ss = solve_steady_state(&sys, &bare_drive(&sys), Gauge::Raw).unwrap();
        let expected = I * sys.g_om * ss.photon_number() / C64::new(sys.gamma_b / 2.0, sys.omega_b);
        assert!((ss.b_s - expected).norm() <= 1e-14 * expected.norm());
        assert_eq!(ss.c_s, C64::new(0.0, 0.0));
    }

    #[test]
    fn c_s_relation_is_exact() {
        let sys = reference_system(hz(320e3));
        let ss = solve_steady_state(&sys, &bare_drive(&sys), Gauge::RealG).unwrap();
        assert_eq!(ss.c_s, I * sys.j * ss.b_s / C64::new(sys.gamma_c / 2.0, sys.omega_c));
    }

    #[test]
    fn real_g_gauge() {
        let sys = reference_system(hz(320e3));
        let raw = solve_steady_state(&sys, &bare_drive(&sys), Gauge::Raw).unwrap();
        let real = solve_steady_state(&sys, &bare_drive(&sys), Gauge::RealG).unwrap();
        assert_eq!(real.g_eff.im, 0.0);
        assert!(real.g_eff.re >= 0.0);
        assert!((real.a_s_raw() - raw.a_s).norm() <= 1e-12 * raw.a_s.norm());
        assert_eq!(real.b_s, raw.b_s);
        assert!(raw.g_eff.im.abs() > 0.0);
    }

    #[test]
    fn effective_lock_hits_target() {
        let sys = reference_system(hz(320e3));
        let drive = DriveParams::new(Pump::Power { watts: 1e-3 }, PumpDetuning::Effective(sys.omega_b), 1e8);
        let ss = solve_steady_state(&sys, &drive, Gauge::RealG).unwrap();
        assert_eq!(ss.delta_a_eff, sys.omega_b);
        assert!(ss.residual <= 1e-12 * ss.epsilon_pu);
        // feeding the recovered bare detuning back must land on the same point
        let bare = DriveParams::new(Pump::Power { watts: 1e-3 }, PumpDetuning::Bare(ss.delta_a), 1e8);
        let back = solve_steady_state(&sys, &bare, Gauge::RealG).unwrap();
        assert!((back.delta_a_eff - sys.omega_b).abs() < 1e-9 * sys.omega_b);
    }

    #[test]
    fn residual_invariant() {
        let sys = reference_system(hz(320e3));
        for gauge in [Gauge::Raw, Gauge::RealG] {
            let ss = solve_steady_state(&sys, &bare_drive(&sys), gauge).unwrap();
            let scale = (ss.a_s.norm() * sys.kappa_a).max(ss.epsilon_pu);
            assert!(steady_state_residual(&sys, &ss) <= 1e-12 * scale);
        }
    }

    #[test]
    fn bistable_regime_takes_lowest_branch() {
        // strong coupling, blue of the cavity in the shifted sense: the cubic
        // has three positive roots
        let sys = SystemParams {
            g_om: hz(2.0e3),
            ..reference_system(0.0)
        };
        let delta = 3.0 * sys.kappa_a;
        let chi = mech_chi(&sys);
        let shift = 2.0 * sys.g_om * sys.g_om * chi.re;
        // choose ε so that f(n1) > 0 > f(n2) for the turning points n1 < n2
        let hk = sys.kappa_a * sys.kappa_a / 4.0;
        let c = PhotonCubic {
            delta,
            shift,
            half_kappa_sq: hk,
            eps_sq: 0.0,
        };
        let (t1, t2) = c.turning_points().unwrap();
        let g = |n: f64| n * ((delta - shift * n).powi(2) + hk);
        let eps = (0.5 * (g(t1) + g(t2))).sqrt();
        let drive = DriveParams::new(Pump::Amplitude { epsilon: eps }, PumpDetuning::Bare(delta), 0.0);
        let ss = solve_steady_state(&sys, &drive, Gauge::RealG).unwrap();
        assert!(ss.multi_root);
        assert!(ss.photon_number() <= t1 * (1.0 + 1e-12));
        let oracle = grid_scan_root(&sys, delta, eps);
        assert!(((ss.photon_number() - oracle) / oracle).abs() < 1e-10);
    }

    #[test]
    fn fixed_point_failure_falls_back_to_bracketing() {
        let sys = SystemParams {
            g_om: hz(2.0e3),
            ..reference_system(0.0)
        };
        let drive = DriveParams::new(Pump::Amplitude { epsilon: 3e10 }, PumpDetuning::Bare(sys.kappa_a), 0.0);
        let controls = SolverControls {
            max_iterations: 2,
            ..SolverControls::default()
        };
        let ss = solve_steady_state_with(&sys, &drive, Gauge::Raw, &controls).unwrap();
        assert_eq!(ss.iterations, 0);
        let oracle = grid_scan_root(&sys, sys.kappa_a, 3e10);
        assert!(((ss.photon_number() - oracle) / oracle).abs() < 1e-10);
    }
}
