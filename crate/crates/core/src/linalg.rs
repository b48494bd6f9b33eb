//! Dense complex Gaussian elimination for the handful of tiny systems in this
//! crate.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Solves `A x = b` in place by Gaussian elimination with partial pivoting.
///
/// A pivot below `n·ε·max|A|` is treated as singular.
pub fn solve_dense<const N: usize>(mut a: [[C64; N]; N], mut b: [C64; N]) -> Result<[C64; N]> {
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::Singular("matrix is zero or non-finite".into()));
    }
    let tiny = N as f64 * f64::EPSILON * scale;

    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[pivot][col].norm() <= tiny {
            return Err(Error::Singular(format!("zero pivot in column {col}")));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let factor = a[row][col] / a[col][col];
            if factor == C64::new(0.0, 0.0) {
                continue;
            }
            for k in col..N {
                let t = a[col][k];
                a[row][k] -= factor * t;
            }
            let t = b[col];
            b[row] -= factor * t;
        }
    }

    let mut x = [C64::new(0.0, 0.0); N];
    for row in (0..N).rev() {
        let mut acc = b[row];
        for k in row + 1..N {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}
