//! End-to-end experiments: helper assignment, coded multihop delivery and
//! decoding, run over random cells and Zipf request streams.
//!
//! A run is fully determined by its [`SimConfig`] (seed included). Sweeps
//! over parameters and seeds fan out across threads and are reassembled in
//! a fixed order, so results never depend on scheduling.

mod delivery;
mod experiments;
mod stats;
pub mod worked_example;

use std::fmt;
use std::str::FromStr;

pub use delivery::{
    draw_arrivals, run_delivery_round, warmup_caches, DecodeTrace, Delivery, Request, RoundResult,
};
pub use experiments::{
    experiment_contents_per_tx, experiment_coverage, experiment_helper_throughput, run_seed,
    throughput_run, ThroughputRun,
};
pub use stats::{mean_ci95, Summary};

use crate::cache::CachePolicy;
use crate::coding::{DuplicateHandling, Strategy, DEFAULT_MAX_CYCLE_LEN};
use crate::error::{invalid, Result};

/// How many requests a terminal issues per slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RequestModel {
    /// Poisson arrivals with the given mean per slot.
    Poisson { rate: f64 },
    /// At most one request per slot, with probability `q`.
    Bernoulli { q: f64 },
}

impl fmt::Display for RequestModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Poisson { rate } => write!(f, "poisson({rate})"),
            Self::Bernoulli { q } => write!(f, "bernoulli({q})"),
        }
    }
}

/// What a helper may send in one slot of a queueing run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlotAccounting {
    /// One whole code group, relays included.
    #[default]
    GroupPerSlot,
    /// One codeword; a group of `c` codewords keeps its helper busy for `c`
    /// slots.
    CodewordPerSlot,
}

impl fmt::Display for SlotAccounting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::GroupPerSlot => "group",
            Self::CodewordPerSlot => "codeword",
        })
    }
}

impl FromStr for SlotAccounting {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "group" => Ok(Self::GroupPerSlot),
            "codeword" => Ok(Self::CodewordPerSlot),
            other => Err(format!(
                "unknown slot accounting `{other}` (expected group or codeword)"
            )),
        }
    }
}

/// Every knob of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Terminals in the cell.
    pub n: usize,
    /// Catalog size.
    pub m: u32,
    /// Zipf exponent.
    pub s: f64,
    /// Terminal cache size.
    pub delta: usize,
    pub policy: CachePolicy,
    pub k_helpers: usize,
    pub cell_radius_m: f64,
    pub tx_range_m: f64,
    /// `None` lets a helper reach any terminal in its component.
    pub max_hops: Option<u32>,
    /// Each helper stores ranks `1..=helper_top_k`.
    pub helper_top_k: u32,
    pub request_model: RequestModel,
    /// Slots of arrivals collected into one delivery round.
    pub frame_slots: u32,
    /// Warm-up requests drawn per terminal before measuring.
    pub warmup_rounds: usize,
    /// Delivery rounds (or slots, for queueing runs) measured per seed.
    pub measure_rounds: usize,
    /// `false` serves every request by uncoded unicast.
    pub coded: bool,
    pub strategy: Strategy,
    pub max_cycle_len: usize,
    pub duplicates: DuplicateHandling,
    pub slot_accounting: SlotAccounting,
    /// Oldest queued requests a helper considers when coding one slot.
    pub pool_cap: usize,
    pub seed: u64,
    /// Synthetic payload bytes per content; 0 decodes symbolically.
    pub payload_len: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            m: 1000,
            s: 2.0,
            delta: 10,
            policy: CachePolicy::Lru,
            k_helpers: 4,
            cell_radius_m: 400.0,
            tx_range_m: 100.0,
            max_hops: Some(3),
            helper_top_k: 1000,
            request_model: RequestModel::Poisson { rate: 1.0 / 1000.0 },
            frame_slots: 1,
            warmup_rounds: 100,
            measure_rounds: 100,
            coded: true,
            strategy: Strategy::ColoringThenCycles,
            max_cycle_len: DEFAULT_MAX_CYCLE_LEN,
            duplicates: DuplicateHandling::Share,
            slot_accounting: SlotAccounting::GroupPerSlot,
            pool_cap: 128,
            seed: 42,
            payload_len: 1024,
        }
    }
}

impl SimConfig {
    /// Contents-per-transmission setup: one central helper reaching the
    /// whole cell, Poisson arrivals at rate `1/n` per slot batched over
    /// frames of `n` slots.
    pub fn contents_per_tx() -> Self {
        let n = 1000;
        Self {
            n,
            s: 1.0,
            delta: 10,
            k_helpers: 1,
            max_hops: None,
            request_model: RequestModel::Poisson {
                rate: 1.0 / n as f64,
            },
            frame_slots: n as u32,
            measure_rounds: 5,
            payload_len: 64,
            ..Self::default()
        }
    }

    /// Helper-throughput setup, coded multihop side: four helpers, three
    /// hops, `s = 2`.
    pub fn throughput_proposed() -> Self {
        Self {
            request_model: RequestModel::Bernoulli { q: 0.1 },
            measure_rounds: 100,
            payload_len: 64,
            ..Self::default()
        }
    }

    /// Helper-throughput baseline: 27 single-hop helpers, uncoded unicast.
    pub fn throughput_baseline() -> Self {
        Self {
            k_helpers: 27,
            max_hops: Some(1),
            coded: false,
            ..Self::throughput_proposed()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(
                    name,
                    format!("must be positive and finite, got {v}"),
                ))
            }
        };
        if self.n == 0 {
            return Err(invalid("n", "need at least one terminal"));
        }
        if self.m == 0 {
            return Err(invalid("m", "catalog must be non-empty"));
        }
        if !(self.s.is_finite() && self.s >= 0.0) {
            return Err(invalid(
                "s",
                format!("must be finite and non-negative, got {}", self.s),
            ));
        }
        if self.delta == 0 {
            return Err(invalid("delta", "cache size must be positive"));
        }
        positive("cell_radius_m", self.cell_radius_m)?;
        positive("tx_range_m", self.tx_range_m)?;
        if self.max_hops == Some(0) {
            return Err(invalid("max_hops", "must be at least 1"));
        }
        if self.helper_top_k == 0 {
            return Err(invalid("helper_top_k", "helpers must store something"));
        }
        match self.request_model {
            RequestModel::Poisson { rate } => positive("rate", rate)?,
            RequestModel::Bernoulli { q } => {
                if !(q > 0.0 && q <= 1.0) {
                    return Err(invalid("q", format!("must lie in (0, 1], got {q}")));
                }
            }
        }
        if self.frame_slots == 0 {
            return Err(invalid("frame_slots", "must be positive"));
        }
        if self.warmup_rounds == 0 {
            return Err(invalid("warmup_rounds", "must be positive"));
        }
        if self.measure_rounds == 0 {
            return Err(invalid("measure_rounds", "must be positive"));
        }
        if self.max_cycle_len < 2 {
            return Err(invalid(
                "max_cycle_len",
                "cycles have at least two vertices",
            ));
        }
        if self.pool_cap == 0 {
            return Err(invalid("pool_cap", "must be positive"));
        }
        Ok(())
    }

    /// Resolved settings as `key=value` pairs, in a fixed order.
    pub fn describe(&self) -> Vec<(&'static str, String)> {
        let hops = self.max_hops.map_or("none".to_string(), |h| h.to_string());
        vec![
            ("n", self.n.to_string()),
            ("m", self.m.to_string()),
            ("s", self.s.to_string()),
            ("delta", self.delta.to_string()),
            ("policy", self.policy.to_string()),
            ("helpers", self.k_helpers.to_string()),
            ("radius", self.cell_radius_m.to_string()),
            ("range", self.tx_range_m.to_string()),
            ("max_hops", hops),
            ("helper_top_k", self.helper_top_k.to_string()),
            ("requests", self.request_model.to_string()),
            ("frame_slots", self.frame_slots.to_string()),
            ("warmup_rounds", self.warmup_rounds.to_string()),
            ("measure_rounds", self.measure_rounds.to_string()),
            ("coded", self.coded.to_string()),
            ("strategy", self.strategy.to_string()),
            ("max_cycle_len", self.max_cycle_len.to_string()),
            ("duplicates", self.duplicates.to_string()),
            ("slot_accounting", self.slot_accounting.to_string()),
            ("pool_cap", self.pool_cap.to_string()),
            ("seed", self.seed.to_string()),
            ("payload_len", self.payload_len.to_string()),
        ]
    }
}

/// Which experiment produced a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Coverage,
    ContentsPerTx,
    Throughput,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Coverage => "coverage",
            Self::ContentsPerTx => "contents_per_tx",
            Self::Throughput => "throughput",
        })
    }
}

/// One aggregated point of an experiment. Means are taken over seeds and
/// `ci95` is the 95% half-width of the experiment's headline metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub experiment: Experiment,
    /// `"proposed"` or `"baseline"` for throughput rows, empty otherwise.
    pub series: String,
    /// Swept value: `s`, `q`, or the hop limit for coverage rows.
    pub param: f64,
    pub helpers: usize,
    pub max_hops: Option<u32>,
    pub contents_per_tx: f64,
    pub requests_per_slot_per_helper: f64,
    pub coverage: f64,
    /// Mean saved transmissions (`requests - codewords`) per round.
    pub gain: f64,
    /// Requests no helper could serve, summed over seeds.
    pub misses: u64,
    pub seeds_used: usize,
    pub ci95: f64,
}

impl MetricsRow {
    pub(crate) fn blank(experiment: Experiment, param: f64, helpers: usize, seeds: usize) -> Self {
        Self {
            experiment,
            series: String::new(),
            param,
            helpers,
            max_hops: None,
            contents_per_tx: 0.0,
            requests_per_slot_per_helper: 0.0,
            coverage: 0.0,
            gain: 0.0,
            misses: 0,
            seeds_used: seeds,
            ci95: 0.0,
        }
    }

    pub fn not_covered(&self) -> f64 {
        1.0 - self.coverage
    }
}
