//! Minimal SVG polyline plots.

use std::fmt::Write as _;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

#[derive(Debug, Clone)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    pub color: String,
    pub width: f64,
    pub dashed: bool,
}

impl Polyline {
    pub fn new(points: Vec<(f64, f64)>, index: usize) -> Self {
        Self {
            points,
            color: PALETTE[index % PALETTE.len()].into(),
            width: 1.5,
            dashed: false,
        }
    }

    pub fn styled(points: Vec<(f64, f64)>, color: &str, width: f64, dashed: bool) -> Self {
        Self {
            points,
            color: color.into(),
            width,
            dashed,
        }
    }
}

#[derive(Debug, Default)]
pub struct Plot {
    pub lines: Vec<Polyline>,
    /// Marker dots, e.g. control points.
    pub dots: Vec<(f64, f64)>,
    /// Keep one unit the same length on both axes.
    pub equal_aspect: bool,
}

impl Plot {
    pub fn render(&self, width: f64, height: f64) -> String {
        let all = self.lines.iter().flat_map(|l| l.points.iter()).chain(&self.dots);
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in all.filter(|(x, y)| x.is_finite() && y.is_finite()) {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let (mut sx, mut sy) = ((x1 - x0).max(1e-12), (y1 - y0).max(1e-12));
        if self.equal_aspect {
            let s = sx.max(sy);
            (sx, sy) = (s, s);
        }
        let margin = 10.0;
        let (w, h) = (width - 2.0 * margin, height - 2.0 * margin);
        let map = |(x, y): (f64, f64)| (margin + (x - x0) / sx * w, height - margin - (y - y0) / sy * h);

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for line in &self.lines {
            let pts: Vec<String> = line
                .points
                .iter()
                .map(|&p| {
                    let (u, v) = map(p);
                    format!("{u:.3},{v:.3}")
                })
                .collect();
            let dash = if line.dashed { r#" stroke-dasharray="4 3""# } else { "" };
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{}" stroke-width="{}"{dash} points="{}"/>"#,
                line.color,
                line.width,
                pts.join(" ")
            );
        }
        for &p in &self.dots {
            let (u, v) = map(p);
            let _ = writeln!(out, r#"<circle cx="{u:.3}" cy="{v:.3}" r="3" fill="black"/>"#);
        }
        out.push_str("</svg>\n");
        out
    }
}
