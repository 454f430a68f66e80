//! Front end for the `mcast` binary: argument parsing, experiment dispatch
//! and CSV/SVG output.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 when a run fails
//! (including any decode verification failure).

pub mod args;
pub mod demo;
pub mod report;
pub mod svg;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use mcast_core::bounds::{
    chromatic_estimate, clique_count_floor, disjoint_cycle_floor, erdos_edge_threshold,
    gain_estimate, BoundParams,
};
use mcast_core::sim::{
    experiment_contents_per_tx, experiment_coverage, experiment_helper_throughput, Experiment,
    MetricsRow, RequestModel, SimConfig,
};
use mcast_core::zipf::{edge_prob_floor, popular_head};

use args::{BoundsArgs, Cli, Command, CoverageArgs, GainArgs, ThroughputArgs, Traffic};
use report::sig6;

/// A validated command line with every default resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct CliInvocation {
    pub subcommand: Job,
    /// Resolved settings, in the order they appear in output headers.
    pub flags: Vec<(String, String)>,
    pub out_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Coverage {
        config: SimConfig,
        helpers: Vec<usize>,
        max_hops: u32,
        seeds: usize,
    },
    Gain {
        config: SimConfig,
        s_values: Vec<f64>,
        seeds: usize,
    },
    Throughput {
        proposed: SimConfig,
        baseline: SimConfig,
        q_values: Vec<f64>,
        seeds: usize,
    },
    Bounds(BoundsJob),
    Demo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsJob {
    pub n: u64,
    pub m: u64,
    pub s: f64,
    pub epsilon: f64,
    pub k: u64,
    pub v: u64,
    pub d: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// `--help` or `--version` output; not a failure.
    Info(String),
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Info(_) => 0,
            Self::Usage(_) => 1,
            Self::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Info(s) | Self::Usage(s) | Self::Runtime(s) => f.write_str(s),
        }
    }
}

impl std::error::Error for CliError {}

impl From<mcast_core::Error> for CliError {
    fn from(e: mcast_core::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

fn usage(flag: &str, reason: impl fmt::Display) -> CliError {
    CliError::Usage(format!("error: invalid value for '{flag}': {reason}"))
}

/// `lo, lo + step, ..` up to `hi` inclusive, rounded to nine decimals so
/// that values like `0.3` print as written.
fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| ((lo + i as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

fn pairs(config: &SimConfig) -> Vec<(String, String)> {
    config
        .describe()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn apply_traffic(config: &mut SimConfig, t: &Traffic) {
    config.m = t.catalog;
    config.delta = t.delta;
    config.policy = t.policy;
    config.helper_top_k = t.helper_top_k.unwrap_or(t.catalog);
    config.warmup_rounds = t.warmup_rounds;
    config.strategy = t.strategy;
    config.max_cycle_len = t.max_cycle_len;
    config.duplicates = t.duplicates;
    config.payload_len = t.payload_len;
}

fn coverage_job(a: CoverageArgs) -> Result<CliInvocation, CliError> {
    if a.output.out.is_none() {
        return Err(missing_out());
    }
    let config = SimConfig {
        n: a.cell.uts,
        cell_radius_m: a.cell.radius,
        tx_range_m: a.cell.range,
        seed: a.output.seed,
        ..SimConfig::default()
    };
    let helpers: Vec<String> = a.helpers.iter().map(|h| h.to_string()).collect();
    let flags = vec![
        ("uts".to_string(), a.cell.uts.to_string()),
        ("radius".to_string(), a.cell.radius.to_string()),
        ("range".to_string(), a.cell.range.to_string()),
        ("helpers".to_string(), helpers.join(";")),
        ("max_hops".to_string(), a.max_hops.to_string()),
        ("seeds".to_string(), a.output.seeds.to_string()),
        ("seed".to_string(), a.output.seed.to_string()),
    ];
    Ok(CliInvocation {
        subcommand: Job::Coverage {
            config,
            helpers: a.helpers,
            max_hops: a.max_hops,
            seeds: a.output.seeds,
        },
        flags,
        out_path: a.output.out,
        svg_path: a.output.svg,
        seed: a.output.seed,
    })
}

fn gain_job(a: GainArgs) -> Result<CliInvocation, CliError> {
    if a.output.out.is_none() {
        return Err(missing_out());
    }
    if a.s_min > a.s_max {
        return Err(usage(
            "--s-min",
            format!("{} exceeds --s-max {}", a.s_min, a.s_max),
        ));
    }
    let n = a.cell.uts;
    let mut config = SimConfig {
        n,
        cell_radius_m: a.cell.radius,
        tx_range_m: a.cell.range,
        k_helpers: a.helpers,
        max_hops: (a.max_hops > 0).then_some(a.max_hops),
        request_model: RequestModel::Poisson {
            rate: a.rate.unwrap_or(1.0 / n as f64),
        },
        frame_slots: a.frame_slots.unwrap_or(n as u32),
        measure_rounds: a.measure_rounds,
        seed: a.output.seed,
        ..SimConfig::contents_per_tx()
    };
    apply_traffic(&mut config, &a.traffic);
    config
        .validate()
        .map_err(|e| CliError::Usage(format!("error: {e}")))?;
    let mut flags = pairs(&config);
    flags.retain(|(k, _)| k != "s");
    flags.extend([
        ("s_min".to_string(), a.s_min.to_string()),
        ("s_max".to_string(), a.s_max.to_string()),
        ("s_step".to_string(), a.s_step.to_string()),
        ("seeds".to_string(), a.output.seeds.to_string()),
    ]);
    Ok(CliInvocation {
        subcommand: Job::Gain {
            config,
            s_values: grid(a.s_min, a.s_max, a.s_step),
            seeds: a.output.seeds,
        },
        flags,
        out_path: a.output.out,
        svg_path: a.output.svg,
        seed: a.output.seed,
    })
}

fn throughput_job(a: ThroughputArgs) -> Result<CliInvocation, CliError> {
    if a.output.out.is_none() {
        return Err(missing_out());
    }
    if a.q_min > a.q_max {
        return Err(usage(
            "--q-min",
            format!("{} exceeds --q-max {}", a.q_min, a.q_max),
        ));
    }
    let mut proposed = SimConfig {
        n: a.cell.uts,
        s: a.s,
        cell_radius_m: a.cell.radius,
        tx_range_m: a.cell.range,
        k_helpers: a.helpers,
        max_hops: Some(a.max_hops),
        measure_rounds: a.measure_rounds,
        slot_accounting: a.slot_accounting,
        pool_cap: a.pool_cap,
        seed: a.output.seed,
        ..SimConfig::throughput_proposed()
    };
    apply_traffic(&mut proposed, &a.traffic);
    proposed
        .validate()
        .map_err(|e| CliError::Usage(format!("error: {e}")))?;
    let baseline = SimConfig {
        k_helpers: a.baseline_helpers,
        max_hops: Some(a.baseline_max_hops),
        coded: false,
        ..proposed.clone()
    };
    let mut flags = pairs(&proposed);
    flags.retain(|(k, _)| k != "requests");
    flags.extend([
        (
            "baseline_helpers".to_string(),
            a.baseline_helpers.to_string(),
        ),
        (
            "baseline_max_hops".to_string(),
            a.baseline_max_hops.to_string(),
        ),
        ("q_min".to_string(), a.q_min.to_string()),
        ("q_max".to_string(), a.q_max.to_string()),
        ("q_step".to_string(), a.q_step.to_string()),
        ("seeds".to_string(), a.output.seeds.to_string()),
    ]);
    Ok(CliInvocation {
        subcommand: Job::Throughput {
            proposed,
            baseline,
            q_values: grid(a.q_min, a.q_max, a.q_step),
            seeds: a.output.seeds,
        },
        flags,
        out_path: a.output.out,
        svg_path: a.output.svg,
        seed: a.output.seed,
    })
}

fn bounds_job(a: BoundsArgs) -> CliInvocation {
    let job = BoundsJob {
        n: a.n as u64,
        m: a.m as u64,
        s: a.s,
        epsilon: a.epsilon,
        k: a.k as u64,
        v: a.v,
        d: a.d,
    };
    let flags = vec![
        ("n".to_string(), a.n.to_string()),
        ("m".to_string(), a.m.to_string()),
        ("s".to_string(), a.s.to_string()),
        ("epsilon".to_string(), a.epsilon.to_string()),
        ("k".to_string(), a.k.to_string()),
        ("v".to_string(), a.v.to_string()),
        ("d".to_string(), a.d.to_string()),
    ];
    CliInvocation {
        subcommand: Job::Bounds(job),
        flags,
        out_path: a.out,
        svg_path: None,
        seed: 42,
    }
}

fn missing_out() -> CliError {
    CliError::Usage("error: the flag '--out <PATH>' is required for experiment runs".to_string())
}

/// Parses `argv` (program name first) into a resolved invocation.
pub fn parse_args<I, T>(argv: I) -> Result<CliInvocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        let text = e.render().to_string();
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(text),
            _ => CliError::Usage(text),
        }
    })?;
    match cli.command {
        Command::Coverage(a) => coverage_job(a),
        Command::Gain(a) => gain_job(a),
        Command::Throughput(a) => throughput_job(a),
        Command::Bounds(a) => Ok(bounds_job(a)),
        Command::Demo => Ok(CliInvocation {
            subcommand: Job::Demo,
            flags: Vec::new(),
            out_path: None,
            svg_path: None,
            seed: 42,
        }),
    }
}

fn write_outputs(
    inv: &CliInvocation,
    experiment: Experiment,
    rows: &[MetricsRow],
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let io_err = |p: &PathBuf, e: std::io::Error| {
        CliError::Runtime(format!("cannot write {}: {e}", p.display()))
    };
    if let Some(path) = &inv.out_path {
        report::emit_csv(experiment, &inv.flags, rows, path).map_err(|e| io_err(path, e))?;
        let _ = writeln!(stdout, "wrote {} rows to {}", rows.len(), path.display());
    }
    if let Some(path) = &inv.svg_path {
        svg::emit_svg(experiment, rows, path).map_err(|e| io_err(path, e))?;
        let _ = writeln!(stdout, "wrote plot to {}", path.display());
    }
    Ok(())
}

fn bounds_report(b: &BoundsJob) -> Result<Vec<(String, String)>, CliError> {
    let params = BoundParams::new(b.n, b.m, b.s, b.epsilon)?;
    let head = popular_head(b.epsilon, b.s)?;
    let p = edge_prob_floor(b.epsilon, b.s, b.m)?;
    let floor = disjoint_cycle_floor(&params)?;
    let f = erdos_edge_threshold(b.v, b.d)?;
    let mut out = vec![
        ("h_eps".to_string(), head.to_string()),
        ("p_eps".to_string(), sig6(p)),
        ("d_star".to_string(), floor.d_star.to_string()),
        (
            "cycle_floor_verified".to_string(),
            floor.verified().to_string(),
        ),
        (format!("f({},{})", b.v, b.d), f.value.to_string()),
        (
            "f_size_hypothesis".to_string(),
            f.size_hypothesis_holds.to_string(),
        ),
        (
            format!("clique_count_floor(k={})", b.k),
            sig6(clique_count_floor(b.n, b.k, b.s, b.epsilon)?),
        ),
    ];
    match chromatic_estimate(b.n, p) {
        Ok(x) => out.push(("chromatic_estimate".to_string(), sig6(x))),
        Err(e) => out.push(("chromatic_estimate".to_string(), format!("undefined ({e})"))),
    }
    match gain_estimate(b.n, b.epsilon, b.s, b.m) {
        Ok(x) => out.push(("gain_estimate".to_string(), sig6(x))),
        Err(e) => out.push(("gain_estimate".to_string(), format!("undefined ({e})"))),
    }
    Ok(out)
}

/// Runs a parsed invocation, reporting progress and text output on `stdout`.
pub fn execute(inv: &CliInvocation, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &inv.subcommand {
        Job::Coverage {
            config,
            helpers,
            max_hops,
            seeds,
        } => {
            let rows = experiment_coverage(config, helpers, *max_hops, *seeds)?;
            write_outputs(inv, Experiment::Coverage, &rows, stdout)
        }
        Job::Gain {
            config,
            s_values,
            seeds,
        } => {
            let rows = experiment_contents_per_tx(config, s_values, *seeds)?;
            write_outputs(inv, Experiment::ContentsPerTx, &rows, stdout)
        }
        Job::Throughput {
            proposed,
            baseline,
            q_values,
            seeds,
        } => {
            let rows = experiment_helper_throughput(proposed, baseline, q_values, *seeds)?;
            write_outputs(inv, Experiment::Throughput, &rows, stdout)
        }
        Job::Bounds(b) => {
            let values = bounds_report(b)?;
            for (k, v) in &values {
                let _ = writeln!(stdout, "{k} = {v}");
            }
            if let Some(path) = &inv.out_path {
                let pairs: Vec<String> =
                    inv.flags.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let mut text = format!("# config: {}\nquantity,value\n", pairs.join(" "));
                for (k, v) in &values {
                    text.push_str(&format!("\"{k}\",{v}\n"));
                }
                std::fs::write(path, text).map_err(|e| {
                    CliError::Runtime(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            Ok(())
        }
        Job::Demo => {
            let text = demo::demo()?;
            let _ = stdout.write_all(text.as_bytes());
            Ok(())
        }
    }
}

/// Parses, runs and maps the outcome to an exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut stdout = std::io::stdout().lock();
    let result = parse_args(argv).and_then(|inv| execute(&inv, &mut stdout));
    match result {
        Ok(()) => 0,
        Err(CliError::Info(text)) => {
            let _ = write!(stdout, "{text}");
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_string().trim_end());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive_and_clean() {
        assert_eq!(grid(0.05, 0.3, 0.05), vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.3]);
        let s = grid(0.1, 4.0, 0.1);
        assert_eq!(s.len(), 40);
        assert_eq!(s[29], 3.0);
        assert_eq!(grid(1.0, 1.0, 0.5), vec![1.0]);
    }
}
