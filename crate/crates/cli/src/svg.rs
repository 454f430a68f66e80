//! Standalone SVG line plots built from metrics rows alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use mcast_core::sim::{Experiment, MetricsRow};

use crate::report::sig6;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn axes(experiment: Experiment) -> (&'static str, &'static str) {
    match experiment {
        Experiment::Coverage => (
            "maximum number of hops",
            "fraction of terminals not covered",
        ),
        Experiment::ContentsPerTx => ("Zipf exponent s", "contents per transmission"),
        Experiment::Throughput => (
            "content request probability",
            "requests satisfied per slot per helper",
        ),
    }
}

fn series(experiment: Experiment, rows: &[MetricsRow]) -> Vec<Series> {
    let mut by_label: BTreeMap<(usize, String), Vec<(f64, f64)>> = BTreeMap::new();
    for (order, r) in rows.iter().enumerate() {
        let (key, point) = match experiment {
            Experiment::Coverage => (
                (r.helpers, format!("{} helpers", r.helpers)),
                (r.param, r.not_covered()),
            ),
            Experiment::ContentsPerTx => (
                (0, "index coding".to_string()),
                (r.param, r.contents_per_tx),
            ),
            Experiment::Throughput => {
                // keep series in first-seen order
                let first = rows
                    .iter()
                    .position(|x| x.series == r.series)
                    .unwrap_or(order);
                (
                    (first, r.series.clone()),
                    (r.param, r.requests_per_slot_per_helper),
                )
            }
        };
        by_label.entry(key).or_default().push(point);
    }
    by_label
        .into_iter()
        .map(|((_, label), points)| Series { label, points })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo > 1e-12 {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// SVG text for `rows`; fails when there is nothing to draw.
pub fn render_svg(experiment: Experiment, rows: &[MetricsRow]) -> Result<String, String> {
    if rows.is_empty() {
        return Err("no rows to plot".to_string());
    }
    let series = series(experiment, rows);
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let ys = series.iter().flat_map(|s| s.points.iter().map(|p| p.1));
    let (x0, x1) = span(
        xs.clone().fold(f64::INFINITY, f64::min),
        xs.fold(f64::NEG_INFINITY, f64::max),
    );
    let y_max = ys.fold(f64::NEG_INFINITY, f64::max);
    let (y0, y1) = span(0.0_f64.min(y_max), y_max * 1.05);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;
    let (xlabel, ylabel) = axes(experiment);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (gx, gy) = (px(xv), py(yv));
        let _ = writeln!(
            s,
            r##"<line x1="{gx:.2}" y1="{}" x2="{gx:.2}" y2="{}" stroke="#ccc"/><text x="{gx:.2}" y="{}" text-anchor="middle">{}</text>"##,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            sig6(xv)
        );
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{gy:.2}" x2="{LEFT}" y2="{gy:.2}" stroke="#ccc"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            gy + 4.0,
            sig6(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(ylabel)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        if pts.len() > 1 {
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                pts.join(" ")
            );
        }
        for &(x, y) in &ser.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                px(x),
                py(y)
            );
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg(experiment: Experiment, rows: &[MetricsRow], path: &Path) -> io::Result<()> {
    let text =
        render_svg(experiment, rows).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    fs::write(path, text)
}
