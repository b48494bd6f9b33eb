//! Dormand–Prince 5(4) with embedded error control and FSAL, specialised to
//! small complex state vectors.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type State<const N: usize> = [C64; N];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControls {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: Option<f64>,
    /// Smallest admissible step, relative to the integration span.
    pub min_step_fraction: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

// Dormand–Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth- minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &State<N>, h: f64, terms: &[(f64, &State<N>)]) -> State<N> {
    let mut out = *y;
    for (w, k) in terms {
        let s = h * w;
        for i in 0..N {
            out[i] += s * k[i];
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1`, calling `observe` after every
/// accepted step (and once at `t0`). `observe` may abort with an error.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: State<N>,
    controls: &StepControls,
    mut observe: O,
) -> Result<(State<N>, StepStats)>
where
    F: FnMut(f64, &State<N>) -> State<N>,
    O: FnMut(f64, &State<N>) -> Result<()>,
{
    if !(t1 > t0) {
        return Err(Error::invalid("t_end", "must exceed the start time"));
    }
    if !(controls.rtol > 0.0 && controls.atol > 0.0) {
        return Err(Error::invalid("tolerance", "rtol and atol must be > 0"));
    }
    let span = t1 - t0;
    let h_min = controls.min_step_fraction * span;
    let mut stats = StepStats::default();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    observe(t, &y)?;

    let err_norm = |y: &State<N>, y_new: &State<N>, err: &State<N>| -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            let sc = controls.atol + controls.rtol * y[i].norm().max(y_new[i].norm());
            acc += (err[i].norm() / sc).powi(2);
        }
        (acc / N as f64).sqrt()
    };

    let mut h = match controls.initial_step {
        Some(h) => h,
        None => {
            // Hairer, Nørsett & Wanner starting-step selection
            let zero = [C64::new(0.0, 0.0); N];
            let d0 = err_norm(&y, &zero, &y);
            let d1 = err_norm(&y, &zero, &k1);
            let h0 = if d0 < 1e-5 || d1 < 1e-5 {
                1e-6 * span
            } else {
                0.01 * d0 / d1
            };
            let y1 = axpy(&y, h0, &[(1.0, &k1)]);
            let f1 = f(t + h0, &y1);
            stats.evaluations += 1;
            let mut diff = [C64::new(0.0, 0.0); N];
            for i in 0..N {
                diff[i] = f1[i] - k1[i];
            }
            let d2 = err_norm(&y, &zero, &diff) / h0;
            let h1 = if d1.max(d2) <= 1e-15 {
                (h0 * 1e-3).max(1e-6 * span)
            } else {
                (0.01 / d1.max(d2)).powf(0.2)
            };
            (100.0 * h0).min(h1).min(span)
        }
    };

    while t < t1 {
        if stats.accepted + stats.rejected >= controls.max_steps {
            return Err(Error::Stiffness { t, step: h });
        }
        if t + h > t1 {
            h = t1 - t;
        }
        if h < h_min {
            return Err(Error::Stiffness { t, step: h });
        }
        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h, &y_new);
        stats.evaluations += 6;

        let mut err = [C64::new(0.0, 0.0); N];
        for i in 0..N {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let e = err_norm(&y, &y_new, &err);
        if !e.is_finite() {
            return Err(Error::Instability { t });
        }
        if e <= 1.0 {
            t = if t1 - (t + h) <= 1e-15 * span { t1 } else { t + h };
            y = y_new;
            k1 = k7;
            stats.accepted += 1;
            observe(t, &y)?;
        } else {
            stats.rejected += 1;
        }
        let factor = if e == 0.0 {
            5.0
        } else {
            (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok((y, stats))
}
