use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::response::Response;
use crate::sweep::{sweep_2d_with, sweep_detuning_with, Provenance, SecondAxisKind, SpectrumTable, SweepGrid};

pub const COLUMNS: [&str; 6] = [
    "delta_norm",
    "re_eps_t",
    "im_eps_t",
    "re_t_pr",
    "im_t_pr",
    "abs_t_pr_sq",
];
pub const SECOND_AXIS_COLUMN: &str = "second_axis";

/// A sweep result ready to be written out.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Spectrum(SpectrumTable),
    Grid(SweepGrid),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArtifactKind {
    Spectrum,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

impl Artifact {
    pub fn kind(&self) -> ArtifactKind {
        match self {
            Artifact::Spectrum(_) => ArtifactKind::Spectrum,
            Artifact::Grid(_) => ArtifactKind::Grid,
        }
    }

    pub fn provenance(&self) -> &Provenance {
        match self {
            Artifact::Spectrum(t) => &t.provenance,
            Artifact::Grid(g) => &g.provenance,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Artifact::Spectrum(t) => t.is_empty(),
            Artifact::Grid(g) => g.is_empty() || g.matrix.iter().all(Vec::is_empty),
        }
    }

    /// Flat numeric rows in column order; grids append the second-axis value.
    pub fn data(&self) -> Vec<Vec<f64>> {
        fn row(x: f64, r: &Response) -> Vec<f64> {
            vec![x, r.eps_t.re, r.eps_t.im, r.t_pr.re, r.t_pr.im, r.t_pr.norm_sqr()]
        }
        match self {
            Artifact::Spectrum(t) => t.axis.iter().zip(&t.rows).map(|(x, r)| row(*x, r)).collect(),
            Artifact::Grid(g) => g
                .second_axis
                .values
                .iter()
                .zip(&g.matrix)
                .flat_map(|(s, rows)| {
                    g.axis.iter().zip(rows).map(move |(x, r)| {
                        let mut v = row(*x, r);
                        v.push(*s);
                        v
                    })
                })
                .collect(),
        }
    }

    pub fn columns(&self) -> Vec<String> {
        let mut c: Vec<String> = COLUMNS.iter().map(|s| s.to_string()).collect();
        if self.kind() == ArtifactKind::Grid {
            c.push(SECOND_AXIS_COLUMN.to_string());
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondAxisInfo {
    pub kind: SecondAxisKind,
    pub unit: String,
    pub values: Vec<f64>,
}

/// The JSON form of a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDocument {
    pub artifact_version: String,
    pub kind: ArtifactKind,
    pub columns: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_axis: Option<SecondAxisInfo>,
    pub data: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

impl TableDocument {
    pub fn from_artifact(a: &Artifact) -> Self {
        let second_axis = match a {
            Artifact::Spectrum(_) => None,
            Artifact::Grid(g) => Some(SecondAxisInfo {
                kind: g.second_axis.kind,
                unit: g.second_axis.unit().to_string(),
                values: g.second_axis.values.clone(),
            }),
        };
        TableDocument {
            artifact_version: a.provenance().artifact_version.clone(),
            kind: a.kind(),
            columns: a.columns(),
            second_axis,
            data: a.data(),
            provenance: a.provenance().clone(),
        }
    }
}

/// Formats a value with 17 significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn table_csv(a: &Artifact) -> String {
    let mut out = a.columns().join(",");
    out.push('\n');
    for row in a.data() {
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", format_value(*v));
        }
        out.push('\n');
    }
    out
}

pub fn table_json(a: &Artifact) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&TableDocument::from_artifact(a))
        .map_err(|e| Error::Provenance(format!("cannot serialize table: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn parse_table_json(text: &str) -> Result<TableDocument> {
    serde_json::from_str(text).map_err(|e| Error::Provenance(e.to_string()))
}

/// Re-runs the sweep described by a provenance block.
pub fn regenerate(p: &Provenance) -> Result<Artifact> {
    match &p.second_axis {
        None => sweep_detuning_with(&p.system, &p.drive, p.axis, p.gauge, &p.solver).map(Artifact::Spectrum),
        Some(second) => {
            sweep_2d_with(&p.system, &p.drive, p.axis, second.clone(), p.gauge, &p.solver).map(Artifact::Grid)
        }
    }
}

/// Refuses to clobber an existing file unless `overwrite` is set.
pub(crate) fn check_target(path: &Path, overwrite: bool) -> Result<()> {
    if !overwrite && path.exists() {
        return Err(Error::PathCollision(path.to_path_buf()));
    }
    Ok(())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn emit_table(a: &Artifact, format: TableFormat, path: impl AsRef<Path>, overwrite: bool) -> Result<()> {
    let path = path.as_ref();
    if a.is_empty() {
        return Err(Error::EmptyData("table has no rows"));
    }
    check_target(path, overwrite)?;
    let text = match format {
        TableFormat::Csv => table_csv(a),
        TableFormat::Json => table_json(a)?,
    };
    write_file(path, text.as_bytes())
}
