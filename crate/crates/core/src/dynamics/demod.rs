use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};
use crate::linalg::solve_dense;

/// Relative misfit above which a demodulation is flagged unsettled.
pub const DEFAULT_SETTLE_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemodResult {
    /// Coefficient of `e^{−iδt}`.
    pub amplitude_plus: C64,
    /// Coefficient of `e^{+iδt}`.
    pub amplitude_minus: C64,
    pub offset: C64,
    /// Weighted relative RMS misfit of the three-tone model.
    pub fit_residual: f64,
    pub window: (f64, f64),
    pub settled: bool,
}

/// Fits mode `a` in `window` to `c₊e^{−iδt} + c₋e^{+iδt} + c₀`.
pub fn demodulate(traj: &Trajectory, delta: f64, window: (f64, f64)) -> Result<DemodResult> {
    demodulate_mode(traj, Mode::A, delta, window, DEFAULT_SETTLE_THRESHOLD)
}

/// Weighted least-squares demodulation of one mode.
///
/// Samples are weighted by their trapezoid share of the window, so the fit
/// approximates the continuous-time projection on non-uniform adaptive steps.
/// At `δ = 0` the three tones coincide and only the constant is fitted; it is
/// reported as `amplitude_plus`.
pub fn demodulate_mode(
    traj: &Trajectory,
    mode: Mode,
    delta: f64,
    window: (f64, f64),
    settle_threshold: f64,
) -> Result<DemodResult> {
    let (t0, t1) = window;
    if !(t1 > t0) {
        return Err(Error::Conditioning(format!("empty window [{t0}, {t1}]")));
    }
    let (Some(&first), Some(&last)) = (traj.times.first(), traj.times.last()) else {
        return Err(Error::Conditioning("empty trajectory".into()));
    };
    if t0 < first || t1 > last {
        return Err(Error::Conditioning(format!(
            "window [{t0:e}, {t1:e}] not inside trajectory span [{first:e}, {last:e}]"
        )));
    }
    if delta != 0.0 && delta.abs() * (t1 - t0) < TAU {
        return Err(Error::Conditioning(format!(
            "window spans {:.3} periods of delta; need at least one",
            delta.abs() * (t1 - t0) / TAU
        )));
    }
    let lo = traj.times.partition_point(|&t| t < t0);
    let hi = traj.times.partition_point(|&t| t <= t1);
    let times = &traj.times[lo..hi];
    let values = &traj.mode(mode)[lo..hi];
    if times.len() < 4 {
        return Err(Error::Conditioning(format!("only {} samples in window", times.len())));
    }

    let weights: Vec<f64> = (0..times.len())
        .map(|k| {
            let left = if k == 0 { times[0] } else { times[k - 1] };
            let right = if k + 1 == times.len() { times[k] } else { times[k + 1] };
            0.5 * (right - left)
        })
        .collect();

    let zero = C64::new(0.0, 0.0);
    let (plus, minus, offset) = if delta == 0.0 {
        let (mut num, mut den) = (zero, 0.0);
        for ((w, y), _) in weights.iter().zip(values).zip(times) {
            num += *w * y;
            den += w;
        }
        (num / den, zero, zero)
    } else {
        let mut normal = [[zero; 3]; 3];
        let mut rhs = [zero; 3];
        for ((&w, &y), &t) in weights.iter().zip(values).zip(times) {
            let basis = [
                C64::from_polar(1.0, -delta * t),
                C64::from_polar(1.0, delta * t),
                C64::new(1.0, 0.0),
            ];
            for i in 0..3 {
                for k in 0..3 {
                    normal[i][k] += w * basis[i].conj() * basis[k];
                }
                rhs[i] += w * basis[i].conj() * y;
            }
        }
        let [p, m, o] = solve_dense(normal, rhs).map_err(|e| Error::Conditioning(e.to_string()))?;
        (p, m, o)
    };

    let (mut misfit, mut power) = (0.0, 0.0);
    for ((&w, &y), &t) in weights.iter().zip(values).zip(times) {
        let model = plus * C64::from_polar(1.0, -delta * t) + minus * C64::from_polar(1.0, delta * t) + offset;
        misfit += w * (y - model).norm_sqr();
        power += w * y.norm_sqr();
    }
    let fit_residual = if power > 0.0 { (misfit / power).sqrt() } else { 0.0 };
    Ok(DemodResult {
        amplitude_plus: plus,
        amplitude_minus: minus,
        offset,
        fit_residual,
        window,
        settled: fit_residual <= settle_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::super::TrajectoryMeta;
    use super::*;

    fn synthetic(f: impl Fn(f64) -> C64, n: usize, t_end: f64) -> Trajectory {
        // deliberately non-uniform sampling
        let times: Vec<f64> = (0..n)
            .map(|k| {
                let u = k as f64 / (n - 1) as f64;
                t_end * (u + 0.02 * (7.0 * u).sin() * u * (1.0 - u))
            })
            .collect();
        let a: Vec<C64> = times.iter().map(|&t| f(t)).collect();
        Trajectory {
            b: vec![C64::new(0.0, 0.0); n],
            c: vec![C64::new(0.0, 0.0); n],
            a,
            times,
            meta: TrajectoryMeta {
                integrator: "synthetic".into(),
                model: "synthetic".into(),
                rtol: 0.0,
                atol: 0.0,
                start: [C64::new(0.0, 0.0); 3],
                t_end,
                accepted_steps: 0,
                rejected_steps: 0,
            },
        }
    }

    #[test]
    fn pure_tone() {
        let d = 3.0;
        let traj = synthetic(|t| 3.0 * C64::from_polar(1.0, -d * t), 4001, 20.0);
        let r = demodulate(&traj, d, (0.0, 20.0)).unwrap();
        assert!((r.amplitude_plus - 3.0).norm() < 1e-12);
        assert!(r.fit_residual < 1e-12);
        assert!(r.settled);
    }

    #[test]
    fn two_tones_separate() {
        let d = 2.0;
        let traj = synthetic(
            |t| 2.0 * C64::from_polar(1.0, -d * t) + 0.5 * C64::from_polar(1.0, d * t),
            6001,
            30.0,
        );
        let r = demodulate(&traj, d, (1.0, 29.0)).unwrap();
        assert!((r.amplitude_plus - 2.0).norm() < 1e-12);
        assert!((r.amplitude_minus - 0.5).norm() < 1e-12);
    }

    #[test]
    fn zero_delta_fits_constant() {
        let traj = synthetic(|_| C64::new(1.5, -0.5), 100, 1.0);
        let r = demodulate(&traj, 0.0, (0.0, 1.0)).unwrap();
        assert!((r.amplitude_plus - C64::new(1.5, -0.5)).norm() < 1e-14);
    }

    #[test]
    fn extra_tone_marks_unsettled() {
        let traj = synthetic(
            |t| C64::from_polar(1.0, -t) + 0.1 * C64::from_polar(1.0, -5.3 * t),
            6001,
            40.0,
        );
        let r = demodulate(&traj, 1.0, (0.0, 40.0)).unwrap();
        assert!(!r.settled);
        assert!(r.fit_residual > 1e-2);
    }

    #[test]
    fn short_window_is_ill_conditioned() {
        let traj = synthetic(|t| C64::from_polar(1.0, -t), 1000, 10.0);
        assert!(matches!(
            demodulate(&traj, 1.0, (0.0, 3.0)),
            Err(Error::Conditioning(_))
        ));
        assert!(matches!(
            demodulate(&traj, 1.0, (0.0, 11.0)),
            Err(Error::Conditioning(_))
        ));
    }
}
