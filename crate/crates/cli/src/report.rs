//! CSV emission. Every file starts with a `# config:` line listing the
//! resolved settings, then a column row, then one line per metrics row.

use std::fs;
use std::io;
use std::path::Path;

use mcast_core::sim::{Experiment, MetricsRow};

/// Six significant digits, `%g` style: trailing zeros dropped, scientific
/// notation outside `1e-5 ..= 1e6`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..6).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn hops(h: Option<u32>) -> String {
    h.map_or("none".to_string(), |h| h.to_string())
}

pub fn columns(experiment: Experiment) -> &'static str {
    match experiment {
        Experiment::Coverage => "helpers,max_hops,coverage_mean,coverage_ci95,seeds",
        Experiment::ContentsPerTx => {
            "s,contents_per_tx_mean,contents_per_tx_ci95,gain_mean,misses,seeds"
        }
        Experiment::Throughput => {
            "q,series,helpers,max_hops,requests_per_slot_per_helper_mean,\
             requests_per_slot_per_helper_ci95,gain_mean,misses,seeds"
        }
    }
}

fn line(row: &MetricsRow) -> String {
    match row.experiment {
        Experiment::Coverage => format!(
            "{},{},{},{},{}",
            row.helpers,
            hops(row.max_hops),
            sig6(row.coverage),
            sig6(row.ci95),
            row.seeds_used
        ),
        Experiment::ContentsPerTx => format!(
            "{},{},{},{},{},{}",
            sig6(row.param),
            sig6(row.contents_per_tx),
            sig6(row.ci95),
            sig6(row.gain),
            row.misses,
            row.seeds_used
        ),
        Experiment::Throughput => format!(
            "{},{},{},{},{},{},{},{},{}",
            sig6(row.param),
            row.series,
            row.helpers,
            hops(row.max_hops),
            sig6(row.requests_per_slot_per_helper),
            sig6(row.ci95),
            sig6(row.gain),
            row.misses,
            row.seeds_used
        ),
    }
}

/// CSV text for `rows`, in the order given.
pub fn render_csv(
    experiment: Experiment,
    config: &[(String, String)],
    rows: &[MetricsRow],
) -> String {
    let pairs: Vec<String> = config.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let mut out = format!("# config: {}\n{}\n", pairs.join(" "), columns(experiment));
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

pub fn emit_csv(
    experiment: Experiment,
    config: &[(String, String)],
    rows: &[MetricsRow],
    path: &Path,
) -> io::Result<()> {
    fs::write(path, render_csv(experiment, config, rows))
}
