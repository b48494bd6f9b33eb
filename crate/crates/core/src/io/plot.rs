//! Self-contained SVG line plots and BMP heat maps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use base64::Engine as _;

use super::table::{check_target, write_file, Artifact};
use crate::error::{Error, Result};
use crate::sweep::{SecondAxisKind, SpectrumTable, SweepGrid};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const X_LABEL: &str = "(δ − ω_m)/ω_m";

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !(hi > lo) {
        let c = if lo.is_finite() { lo } else { 0.0 };
        return (c - 1.0, c + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn axes(svg: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        svg,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let xv = f.x.0 + t * (f.x.1 - f.x.0);
        let px = f.px(xv);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            y0 + 20.0,
            tick(xv)
        );
        let yv = f.y.0 + t * (f.y.1 - f.y.0);
        let py = f.py(yv);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            py + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{}" font-size="14" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" font-size="14" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn tick(v: f64) -> String {
    let v = if v.abs() < 1e-12 { 0.0 } else { v };
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn header(title: &str, metadata: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <title>{}</title>\n<metadata>{}</metadata>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        escape(title),
        escape(metadata)
    )
}

fn provenance_json(a: &Artifact) -> String {
    serde_json::to_string(a.provenance()).unwrap_or_default()
}

/// Absorption (solid) and dispersion (dashed) against normalized detuning.
pub fn spectrum_svg(t: &SpectrumTable, metadata: &str) -> String {
    let re = t.absorption();
    let im = t.dispersion();
    let frame = Frame {
        x: (t.axis[0], t.axis[t.axis.len() - 1]),
        y: padded_range(re.iter().chain(&im).copied()),
    };
    let mut svg = header("Re and Im of eps_T", metadata);
    axes(&mut svg, &frame, X_LABEL, "ε_T");
    for (values, style) in [(&re, ""), (&im, r#" stroke-dasharray="6 4""#)] {
        let points: Vec<String> = t
            .axis
            .iter()
            .zip(values.iter())
            .map(|(x, y)| format!("{:.2},{:.2}", frame.px(*x), frame.py(*y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="black" stroke-width="1.5"{style} points="{}"/>"#,
            points.join(" ")
        );
    }
    let lx = WIDTH - RIGHT - 150.0;
    let _ = writeln!(
        svg,
        r#"<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1.5"/>"#,
        TOP + 18.0,
        lx + 30.0,
        TOP + 18.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="12">Re[ε_T]</text>"#,
        lx + 36.0,
        TOP + 22.0
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
        TOP + 36.0,
        lx + 30.0,
        TOP + 36.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="12">Im[ε_T]</text>"#,
        lx + 36.0,
        TOP + 40.0
    );
    svg.push_str("</svg>\n");
    svg
}

/// Diverging map: blue for negative, white at zero, red for positive.
fn color(v: f64, scale: f64) -> [u8; 3] {
    let t = if scale > 0.0 { (v / scale).clamp(-1.0, 1.0) } else { 0.0 };
    let fade = |t: f64| (255.0 * (1.0 - t.abs())).round() as u8;
    if t >= 0.0 {
        [255, fade(t), fade(t)]
    } else {
        [fade(t), fade(t), 255]
    }
}

/// Uncompressed 24-bit BMP of `Re ε_T`; detuning runs left to right and the
/// second axis bottom to top.
pub fn grid_bmp(g: &SweepGrid) -> Vec<u8> {
    let w = g.axis.len();
    let h = g.matrix.len();
    let scale = g
        .matrix
        .iter()
        .flatten()
        .map(|r| r.absorption().abs())
        .fold(0.0, f64::max);
    let stride = (3 * w).div_ceil(4) * 4;
    let image_size = stride * h;
    let file_size = 54 + image_size;
    let mut out = Vec::with_capacity(file_size);
    out.extend_from_slice(b"BM");
    out.extend_from_slice(&(file_size as u32).to_le_bytes());
    out.extend_from_slice(&[0; 4]);
    out.extend_from_slice(&54u32.to_le_bytes());
    out.extend_from_slice(&40u32.to_le_bytes());
    out.extend_from_slice(&(w as i32).to_le_bytes());
    out.extend_from_slice(&(h as i32).to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&24u16.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&(image_size as u32).to_le_bytes());
    out.extend_from_slice(&2835i32.to_le_bytes());
    out.extend_from_slice(&2835i32.to_le_bytes());
    out.extend_from_slice(&[0; 8]);
    // rows are stored bottom-up, which matches the increasing second axis
    for row in &g.matrix {
        let start = out.len();
        for r in row {
            let [red, green, blue] = color(r.absorption(), scale);
            out.extend_from_slice(&[blue, green, red]);
        }
        out.resize(start + stride, 0);
    }
    out
}

/// SVG wrapper with axes around an embedded heat map.
pub fn grid_svg(g: &SweepGrid, bmp: &[u8], metadata: &str) -> String {
    let s = &g.second_axis.values;
    let half = if s.len() > 1 {
        0.5 * (s[s.len() - 1] - s[0]) / (s.len() - 1) as f64
    } else {
        0.5
    };
    let frame = Frame {
        x: (g.axis[0], g.axis[g.axis.len() - 1]),
        y: (s[0] - half, s[s.len() - 1] + half),
    };
    let y_label = match g.second_axis.kind {
        SecondAxisKind::Eta => "η",
        SecondAxisKind::Phi => "φ (rad)",
    };
    let mut svg = header("Re eps_T heat map", metadata);
    let data = base64::engine::general_purpose::STANDARD.encode(bmp);
    let _ = writeln!(
        svg,
        r#"<image x="{LEFT}" y="{TOP}" width="{}" height="{}" preserveAspectRatio="none" style="image-rendering:pixelated" href="data:image/bmp;base64,{data}"/>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
    axes(&mut svg, &frame, X_LABEL, y_label);
    let (lo, hi) = g
        .matrix
        .iter()
        .flatten()
        .map(|r| r.absorption())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let _ = writeln!(
        svg,
        r#"<text x="{LEFT}" y="{}" font-size="12">Re[ε_T] from {} (blue) to {} (red), white at 0</text>"#,
        TOP - 10.0,
        tick(lo),
        tick(hi)
    );
    svg.push_str("</svg>\n");
    svg
}

/// Writes the plot for `a` and returns the files written. Spectra become one
/// SVG at `path`; grids become `path` plus a BMP next to it.
pub fn emit_plot(a: &Artifact, path: impl AsRef<Path>, overwrite: bool) -> Result<Vec<PathBuf>> {
    let path = path.as_ref();
    if a.is_empty() {
        return Err(Error::EmptyData("plot has no data points"));
    }
    let meta = provenance_json(a);
    match a {
        Artifact::Spectrum(t) => {
            check_target(path, overwrite)?;
            write_file(path, spectrum_svg(t, &meta).as_bytes())?;
            Ok(vec![path.to_path_buf()])
        }
        Artifact::Grid(g) => {
            let bmp_path = path.with_extension("bmp");
            check_target(path, overwrite)?;
            check_target(&bmp_path, overwrite)?;
            let bmp = grid_bmp(g);
            write_file(&bmp_path, &bmp)?;
            write_file(path, grid_svg(g, &bmp, &meta).as_bytes())?;
            Ok(vec![path.to_path_buf(), bmp_path])
        }
    }
}
