//! Dependency-free SVG line charts of cumulative-average curves.

use std::fmt::Write as _;
use std::io::Read;

use crate::error::{input_err, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// `(trial index, cumulative average iterations)`
    pub points: Vec<(f64, f64)>,
}

/// Reads `trial,cum_avg_iterations,cum_avg_measurements` rows.
pub fn read_cumulative_csv<R: Read>(label: impl Into<String>, reader: R) -> Result<Series> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(|e| bad(format!("unreadable header: {e}")))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["trial", "cum_avg_iterations", "cum_avg_measurements"] {
        return input_err(format!("unexpected cumulative CSV header {:?}", headers.iter().collect::<Vec<_>>()));
    }
    let mut points = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| bad(format!("row {}: {e}", line + 1)))?;
        let num = |i: usize| -> Result<f64> {
            row.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("row {}: column {} is not a number", line + 1, i + 1)))
        };
        points.push((num(0)?, num(1)?));
    }
    if points.is_empty() {
        return input_err("cumulative CSV has no rows");
    }
    Ok(Series { label: label.into(), points })
}

fn bad(msg: String) -> crate::error::VqaaError {
    crate::error::VqaaError::Input(msg)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One polyline per series, plus a dashed horizontal line at `baseline` when given.
/// Output is a pure function of the inputs.
pub fn emit_plot(series: &[Series], baseline: Option<f64>) -> Result<String> {
    if series.is_empty() || series.iter().any(|s| s.points.is_empty()) {
        return input_err("nothing to plot");
    }
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, baseline.unwrap_or(0.0));
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let y1 = if y1 > 0.0 { y1 * 1.05 } else { 1.0 };
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (WIDTH - LEFT - RIGHT);
    let sy = |y: f64| HEIGHT - BOTTOM - y / y1 * (HEIGHT - TOP - BOTTOM);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (ax, ay) = (sx(x0), sy(0.0));
    let _ = writeln!(
        svg,
        r#"<path d="M{ax:.2} {:.2} L{ax:.2} {ay:.2} L{:.2} {ay:.2}" stroke="black" fill="none"/>"#,
        TOP,
        WIDTH - RIGHT
    );
    for k in 0..=4 {
        let v = y1 / 1.05 * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(v) + 4.0,
            tick(v)
        );
    }
    for (i, v) in [x0, (x0 + x1) / 2.0, x1].into_iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle" id="xtick{i}">{}</text>"#,
            sx(v),
            ay + 16.0,
            tick(v)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">trial index</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.2})">average iterations</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    if let Some(b) = baseline {
        let _ = writeln!(
            svg,
            r##"<line x1="{ax:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#555555" stroke-dasharray="6 4"/>"##,
            WIDTH - RIGHT,
            y = sy(b)
        );
    }
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(svg, r#"<polyline points="{}" stroke="{color}" fill="none"/>"#, pts.join(" "));
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" fill="{color}">{}</text>"#,
            WIDTH - RIGHT - 150.0,
            TOP + 14.0 * (i + 1) as f64,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn tick(v: f64) -> String {
    if v.abs() >= 100.0 || v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}
