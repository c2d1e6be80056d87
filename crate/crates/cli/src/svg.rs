//! Hand-written SVG scatter plots.

use std::fmt::Write;

use stratify_core::{Label, Partition, PointCloud};

use crate::error::{CliError, CliResult};

const PANEL: f64 = 360.0;
const MARGIN: f64 = 40.0;
const RADIUS: f64 = 2.0;

pub fn colour(label: Label) -> &'static str {
    match label {
        Label::Intersection => "red",
        Label::Boundary => "cyan",
        Label::Manifold => "grey",
    }
}

/// Coordinate pairs drawn for a cloud of dimension `dim`.
fn panels(dim: usize) -> CliResult<Vec<(usize, usize)>> {
    match dim {
        2 => Ok(vec![(0, 1)]),
        3 => Ok(vec![(0, 1), (0, 2), (1, 2)]),
        d => Err(CliError::Integrity(format!(
            "can only plot 2 or 3 coordinates, got {d}; run `stratify project` first"
        ))),
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (-0.5, 0.5);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
    (lo - pad, hi + pad)
}

/// Scatter plot of the partitioned points, one panel per coordinate pair.
/// Manifold points are drawn first so the rarer classes stay visible.
pub fn scatter(cloud: &PointCloud, partition: &Partition, title: Option<&str>) -> CliResult<String> {
    let pairs = panels(cloud.ambient_dim())?;
    if partition.len() > cloud.len() {
        return Err(CliError::Integrity(format!(
            "{} labels for {} points",
            partition.len(),
            cloud.len()
        )));
    }
    if let Some(&i) = partition.indices.iter().find(|&&i| i >= cloud.len()) {
        return Err(CliError::Integrity(format!(
            "label for point {i} but the cloud has {} points",
            cloud.len()
        )));
    }

    let top = if title.is_some() { 30.0 } else { 0.0 };
    let width = pairs.len() as f64 * (PANEL + MARGIN) + MARGIN;
    let height = PANEL + 2.0 * MARGIN + top + 20.0;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
    if let Some(t) = title {
        writeln!(svg, r#"<text x="{MARGIN}" y="24" font-size="16">{}</text>"#, escape(t)).unwrap();
    }

    let mut order: Vec<usize> = (0..partition.len()).collect();
    order.sort_by_key(|&j| {
        let rank = match partition.labels[j] {
            Label::Manifold => 0,
            Label::Boundary => 1,
            Label::Intersection => 2,
        };
        (rank, partition.indices[j])
    });

    for (p, &(a, b)) in pairs.iter().enumerate() {
        let x0 = MARGIN + p as f64 * (PANEL + MARGIN);
        let y0 = MARGIN + top;
        let (ax_lo, ax_hi) = range(partition.indices.iter().map(|&i| cloud.point(i)[a]));
        let (bx_lo, bx_hi) = range(partition.indices.iter().map(|&i| cloud.point(i)[b]));
        writeln!(svg, r#"<g>"#).unwrap();
        writeln!(
            svg,
            r#"<rect x="{x0}" y="{y0}" width="{PANEL}" height="{PANEL}" fill="none" stroke="black"/>"#
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">x{a}</text>"#,
            x0 + PANEL / 2.0,
            y0 + PANEL + 16.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">x{b}</text>"#,
            x0 - 8.0,
            y0 + PANEL / 2.0,
            x0 - 8.0,
            y0 + PANEL / 2.0
        )
        .unwrap();
        for &j in &order {
            let pt = cloud.point(partition.indices[j]);
            let cx = x0 + (pt[a] - ax_lo) / (ax_hi - ax_lo) * PANEL;
            let cy = y0 + PANEL - (pt[b] - bx_lo) / (bx_hi - bx_lo) * PANEL;
            writeln!(
                svg,
                r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{RADIUS}" fill="{}"/>"#,
                colour(partition.labels[j])
            )
            .unwrap();
        }
        writeln!(svg, "</g>").unwrap();
    }

    // Legend uses squares so circles count only data points.
    let counts = partition.class_counts();
    let ly = height - 14.0;
    for (n, label) in Label::ALL.into_iter().enumerate() {
        let lx = MARGIN + n as f64 * 150.0;
        writeln!(
            svg,
            r#"<rect x="{lx}" y="{}" width="8" height="8" fill="{}"/><text x="{}" y="{ly}">{label} ({})</text>"#,
            ly - 8.0,
            colour(label),
            lx + 12.0,
            counts[label.index()]
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
