//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mcast_core::cache::CachePolicy;
use mcast_core::coding::{DuplicateHandling, Strategy};
use mcast_core::sim::SlotAccounting;

#[derive(Debug, Parser)]
#[command(
    name = "mcast",
    version,
    about = "Caching-aided coded multicast over multihop D2D cells"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fraction of terminals within reach of a helper against the hop limit.
    Coverage(CoverageArgs),
    /// Contents per coded transmission against the Zipf exponent.
    Gain(GainArgs),
    /// Requests satisfied per slot per helper against the request probability.
    Throughput(ThroughputArgs),
    /// Evaluate the closed-form popularity and coding bounds.
    Bounds(BoundsArgs),
    /// Walk through the six-terminal worked example.
    Demo,
}

#[derive(Debug, Args)]
pub struct Output {
    /// CSV file to write.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also render the rows as an SVG plot.
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// Independent replications per point.
    #[arg(long, default_value_t = 30, value_parser = at_least_one)]
    pub seeds: usize,
    /// Base seed; replication `i` uses `seed + i`.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct Cell {
    /// Terminals in the cell.
    #[arg(long, default_value_t = 1000, value_parser = at_least_one)]
    pub uts: usize,
    /// Cell radius in metres.
    #[arg(long, default_value_t = 400.0, value_parser = positive)]
    pub radius: f64,
    /// D2D transmission range in metres.
    #[arg(long, default_value_t = 100.0, value_parser = positive)]
    pub range: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CoverageArgs {
    #[command(flatten)]
    pub cell: Cell,
    /// Helper counts to evaluate, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub helpers: Vec<usize>,
    /// Largest hop limit; every limit from 1 up is reported.
    #[arg(long, default_value_t = 5, value_parser = at_least_one_u32)]
    pub max_hops: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct Traffic {
    /// Catalog size.
    #[arg(long, default_value_t = 1000, value_parser = at_least_one_u32)]
    pub catalog: u32,
    /// Terminal cache size.
    #[arg(long, default_value_t = 10, value_parser = at_least_one)]
    pub delta: usize,
    #[arg(long, default_value_t = CachePolicy::Lru)]
    pub policy: CachePolicy,
    /// Contents stored per helper (the most popular ones); defaults to the
    /// whole catalog.
    #[arg(long, value_parser = at_least_one_u32)]
    pub helper_top_k: Option<u32>,
    /// Warm-up requests per terminal.
    #[arg(long, default_value_t = 100, value_parser = at_least_one)]
    pub warmup_rounds: usize,
    #[arg(long, default_value_t = Strategy::ColoringThenCycles)]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 4, value_parser = at_least_two)]
    pub max_cycle_len: usize,
    #[arg(long, default_value_t = DuplicateHandling::Share)]
    pub duplicates: DuplicateHandling,
    /// Synthetic payload bytes per content (0 = symbolic decoding).
    #[arg(long, default_value_t = 64)]
    pub payload_len: usize,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct GainArgs {
    #[command(flatten)]
    pub cell: Cell,
    #[command(flatten)]
    pub traffic: Traffic,
    /// Helpers in the cell.
    #[arg(long, default_value_t = 1)]
    pub helpers: usize,
    /// Hop limit; 0 means unlimited.
    #[arg(long, default_value_t = 0)]
    pub max_hops: u32,
    #[arg(long, default_value_t = 0.1, value_parser = positive)]
    pub s_min: f64,
    #[arg(long, default_value_t = 4.0, value_parser = positive)]
    pub s_max: f64,
    #[arg(long, default_value_t = 0.1, value_parser = positive)]
    pub s_step: f64,
    /// Per-terminal Poisson request rate per slot; defaults to 1/uts.
    #[arg(long, value_parser = positive)]
    pub rate: Option<f64>,
    /// Slots batched into one delivery round; defaults to uts.
    #[arg(long, value_parser = at_least_one_u32)]
    pub frame_slots: Option<u32>,
    /// Delivery rounds measured per seed.
    #[arg(long, default_value_t = 5, value_parser = at_least_one)]
    pub measure_rounds: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ThroughputArgs {
    #[command(flatten)]
    pub cell: Cell,
    #[command(flatten)]
    pub traffic: Traffic,
    /// Zipf exponent.
    #[arg(long, default_value_t = 2.0, value_parser = non_negative)]
    pub s: f64,
    /// Helpers of the coded multihop scheme.
    #[arg(long, default_value_t = 4)]
    pub helpers: usize,
    #[arg(long, default_value_t = 3, value_parser = at_least_one_u32)]
    pub max_hops: u32,
    /// Helpers of the uncoded single-hop baseline.
    #[arg(long, default_value_t = 27)]
    pub baseline_helpers: usize,
    #[arg(long, default_value_t = 1, value_parser = at_least_one_u32)]
    pub baseline_max_hops: u32,
    #[arg(long, default_value_t = 0.05, value_parser = probability)]
    pub q_min: f64,
    #[arg(long, default_value_t = 0.3, value_parser = probability)]
    pub q_max: f64,
    #[arg(long, default_value_t = 0.05, value_parser = positive)]
    pub q_step: f64,
    /// Slots measured per seed.
    #[arg(long, default_value_t = 100, value_parser = at_least_one)]
    pub measure_rounds: usize,
    #[arg(long, default_value_t = SlotAccounting::GroupPerSlot)]
    pub slot_accounting: SlotAccounting,
    /// Oldest queued requests coded together per slot.
    #[arg(long, default_value_t = 128, value_parser = at_least_one)]
    pub pool_cap: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BoundsArgs {
    /// Requesting terminals.
    #[arg(long, default_value_t = 1000, value_parser = at_least_one)]
    pub n: usize,
    /// Catalog size.
    #[arg(long, default_value_t = 1000, value_parser = at_least_one_u32)]
    pub m: u32,
    /// Zipf exponent (greater than 1).
    #[arg(long, default_value_t = 2.0, value_parser = above_one)]
    pub s: f64,
    /// Tail mass left outside the popular head.
    #[arg(long, default_value_t = 0.01, value_parser = open_unit)]
    pub epsilon: f64,
    /// Clique size for the clique-count floor.
    #[arg(long, default_value_t = 2, value_parser = at_least_one)]
    pub k: usize,
    /// Vertices for the edge threshold f(v, d).
    #[arg(long, default_value_t = 1000)]
    pub v: u64,
    /// Disjoint cycles for the edge threshold f(v, d).
    #[arg(long, default_value_t = 3, value_parser = at_least_two_u64)]
    pub d: u64,
    /// Also write the values as CSV.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be non-negative, got {v}"))
    }
}

fn above_one(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 1.0 {
        Ok(v)
    } else {
        Err(format!("must exceed 1, got {v}"))
    }
}

fn probability(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("must lie in (0, 1], got {v}"))
    }
}

fn open_unit(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("must lie in (0, 1), got {v}"))
    }
}

fn at_least<T: std::str::FromStr + PartialOrd + std::fmt::Display>(
    s: &str,
    min: T,
) -> Result<T, String> {
    let v: T = s
        .parse()
        .map_err(|_| format!("`{s}` is not a non-negative integer"))?;
    if v >= min {
        Ok(v)
    } else {
        Err(format!("must be at least {min}, got {v}"))
    }
}

fn at_least_one(s: &str) -> Result<usize, String> {
    at_least(s, 1usize)
}

fn at_least_two(s: &str) -> Result<usize, String> {
    at_least(s, 2usize)
}

fn at_least_one_u32(s: &str) -> Result<u32, String> {
    at_least(s, 1u32)
}

fn at_least_two_u64(s: &str) -> Result<u64, String> {
    at_least(s, 2u64)
}
