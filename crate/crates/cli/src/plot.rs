//! Standalone SVG figures of 2-D instances.
//!
//! Positive points are drawn as filled circles and negative points as
//! squares. The decision line is solid, the two margin lines dashed, support
//! vectors are ringed and the Radon point is marked with a diamond.

use std::fmt::Write as _;
use std::path::Path;

use radon_svm::svm::Label;
use radon_svm::{LabeledPointSet, SvmSolution};

use crate::{CliError, Result};

const SIZE: f64 = 800.0;
const PAD: f64 = 0.05 * SIZE;

/// Affine map from data coordinates to the viewport, one scale for both
/// axes so angles and distances are kept.
struct Viewport {
    min: [f64; 2],
    max: [f64; 2],
    scale: f64,
    offset: [f64; 2],
}

impl Viewport {
    fn fit(points: &[[f64; 2]]) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        if points.is_empty() {
            (min, max) = ([-1.0; 2], [1.0; 2]);
        }
        let span = (max[0] - min[0]).max(max[1] - min[1]);
        let span = if span > 0.0 { span } else { 2.0 };
        // square data window centered on the points
        for k in 0..2 {
            let mid = 0.5 * (min[k] + max[k]);
            min[k] = mid - 0.5 * span;
            max[k] = mid + 0.5 * span;
        }
        let scale = (SIZE - 2.0 * PAD) / span;
        Viewport {
            min,
            max,
            scale,
            offset: [PAD - min[0] * scale, PAD + max[1] * scale],
        }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (self.offset[0] + p[0] * self.scale, self.offset[1] - p[1] * self.scale)
    }

    /// Segment of `w·x + b = level` inside the data window, if any.
    fn clip_line(&self, w: &[f64], b: f64, level: f64) -> Option<([f64; 2], [f64; 2])> {
        let c = level - b;
        let mut hits: Vec<[f64; 2]> = Vec::new();
        let eps = 1e-9 * (self.max[0] - self.min[0]);
        if w[1] != 0.0 {
            for x in [self.min[0], self.max[0]] {
                let y = (c - w[0] * x) / w[1];
                if y >= self.min[1] - eps && y <= self.max[1] + eps {
                    hits.push([x, y]);
                }
            }
        }
        if w[0] != 0.0 {
            for y in [self.min[1], self.max[1]] {
                let x = (c - w[1] * y) / w[0];
                if x >= self.min[0] - eps && x <= self.max[0] + eps {
                    hits.push([x, y]);
                }
            }
        }
        let mut best: Option<([f64; 2], [f64; 2], f64)> = None;
        for (i, p) in hits.iter().enumerate() {
            for q in &hits[i + 1..] {
                let d = (p[0] - q[0]).hypot(p[1] - q[1]);
                if best.is_none_or(|(_, _, bd)| d > bd) {
                    best = Some((*p, *q, d));
                }
            }
        }
        best.map(|(p, q, _)| (p, q))
    }
}

/// Renders the figure as an SVG document.
pub fn render_svg(
    data: &LabeledPointSet,
    solution: Option<&SvmSolution>,
    radon_point: Option<&[f64]>,
) -> Result<String> {
    if data.dim() != 2 {
        return Err(CliError::PlotDimension(data.dim()));
    }
    let xy = |p: &[f64]| [p[0], p[1]];
    let mut extent: Vec<[f64; 2]> = data.points().iter().map(|p| xy(p)).collect();
    if let Some(r) = radon_point {
        extent.push(xy(r));
    }
    let view = Viewport::fit(&extent);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);

    if let Some(sol) = solution {
        for (level, dash) in [(0.0, None), (1.0, Some("8 6")), (-1.0, Some("8 6"))] {
            let Some((p, q)) = view.clip_line(&sol.w, sol.b, level) else {
                continue;
            };
            let ((x1, y1), (x2, y2)) = (view.map(p), view.map(q));
            let dash = dash.map_or(String::new(), |d| format!(r#" stroke-dasharray="{d}""#));
            let class = match level {
                l if l > 0.0 => "margin-positive",
                l if l < 0.0 => "margin-negative",
                _ => "decision",
            };
            let _ = writeln!(
                svg,
                r#"<line class="{class}" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="black" stroke-width="1.5"{dash}/>"#
            );
        }
    }

    for (i, p) in data.points().iter().enumerate() {
        let (x, y) = view.map(xy(p));
        match data.label(i) {
            Label::Positive => {
                let _ = writeln!(
                    svg,
                    r##"<circle class="positive" cx="{x:.2}" cy="{y:.2}" r="5" fill="#1f77b4"/>"##
                );
            }
            Label::Negative => {
                let _ = writeln!(
                    svg,
                    r##"<rect class="negative" x="{:.2}" y="{:.2}" width="10" height="10" fill="#d62728"/>"##,
                    x - 5.0,
                    y - 5.0
                );
            }
        }
    }
    if let Some(sol) = solution {
        for &i in &sol.support_indices {
            let (x, y) = view.map(xy(data.point(i)));
            let _ = writeln!(
                svg,
                r#"<circle class="support" cx="{x:.2}" cy="{y:.2}" r="11" fill="none" stroke="black" stroke-width="1.5"/>"#
            );
        }
    }
    if let Some(r) = radon_point {
        let (x, y) = view.map(xy(r));
        let _ = writeln!(
            svg,
            r##"<polygon class="radon-point" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="#2ca02c"/>"##,
            x,
            y - 8.0,
            x + 8.0,
            y,
            x,
            y + 8.0,
            x - 8.0,
            y
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn plot_svg(
    data: &LabeledPointSet,
    solution: Option<&SvmSolution>,
    radon_point: Option<&[f64]>,
    path: &Path,
) -> Result<()> {
    let svg = render_svg(data, solution, radon_point)?;
    std::fs::write(path, svg).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
