use serde::{Deserialize, Serialize};

use super::SpectrumTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    /// Grid index of the sampled minimum.
    pub index: usize,
    /// Refined location in normalized detuning.
    pub location: f64,
    /// Refined value of `Re ε_T` at `location`.
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureReport {
    /// Local minima of the absorption, ordered along the axis.
    pub minima: Vec<Minimum>,
    /// Distance between the two deepest minima, if there are two.
    pub splitting: Option<f64>,
    /// `Re ε_T` at `δ = ω_b`, linearly interpolated; `None` if off-grid.
    pub on_resonance_absorption: Option<f64>,
}

pub fn find_features(table: &SpectrumTable) -> Result<FeatureReport> {
    features_of(&table.axis, &table.absorption())
}

pub(crate) fn features_of(x: &[f64], y: &[f64]) -> Result<FeatureReport> {
    let n = x.len().min(y.len());
    if n < 3 {
        return Err(Error::InsufficientData { rows: n });
    }
    let mut minima = Vec::new();
    for i in 1..n - 1 {
        // strict on the left, lenient on the right: a flat bottom is reported
        // once, at its lowest index
        if y[i] < y[i - 1] && y[i] <= y[i + 1] {
            let (location, depth) = vertex([x[i - 1], x[i], x[i + 1]], [y[i - 1], y[i], y[i + 1]]);
            minima.push(Minimum {
                index: i,
                location,
                depth,
            });
        }
    }

    let mut by_depth: Vec<&Minimum> = minima.iter().collect();
    by_depth.sort_by(|a, b| a.depth.total_cmp(&b.depth).then(a.index.cmp(&b.index)));
    let splitting = match by_depth.as_slice() {
        [first, second, ..] => Some((first.location - second.location).abs()),
        _ => None,
    };

    Ok(FeatureReport {
        minima,
        splitting,
        on_resonance_absorption: interpolate_at_zero(&x[..n], &y[..n]),
    })
}

/// Vertex of the parabola through three points, clamped to their span.
fn vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let (d0, d1) = (x[1] - x[0], x[2] - x[1]);
    let s0 = (y[1] - y[0]) / d0;
    let s1 = (y[2] - y[1]) / d1;
    let curvature = (s1 - s0) / (x[2] - x[0]);
    if !(curvature > 0.0) {
        return (x[1], y[1]);
    }
    // slope at the midpoint of the first interval is s0
    let xv = (0.5 * (x[0] + x[1]) - s0 / (2.0 * curvature)).clamp(x[0], x[2]);
    let yv = y[1] + (xv - x[1]) * (s0 + curvature * (xv - x[0]));
    (xv, yv)
}

fn interpolate_at_zero(x: &[f64], y: &[f64]) -> Option<f64> {
    let k = x.partition_point(|&v| v < 0.0);
    if k < x.len() && x[k] == 0.0 {
        return Some(y[k]);
    }
    if k == 0 || k == x.len() {
        return None;
    }
    let w = -x[k - 1] / (x[k] - x[k - 1]);
    Some(y[k - 1] + w * (y[k] - y[k - 1]))
}
