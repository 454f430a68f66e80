use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::delivery::{apply, cache_sets, deliver, helper_stores, plan};
use super::{
    draw_arrivals, mean_ci95, run_delivery_round, warmup_caches, Experiment, MetricsRow, Request,
    RoundResult, SimConfig, SlotAccounting,
};
use crate::coding::Payloads;
use crate::error::Result;
use crate::topology::Topology;
use crate::zipf::{Catalog, Rank};

fn with_seed(config: &SimConfig, index: usize) -> SimConfig {
    SimConfig {
        seed: config.seed.wrapping_add(index as u64),
        ..config.clone()
    }
}

fn payloads(config: &SimConfig) -> Option<Payloads> {
    (config.payload_len > 0).then(|| Payloads::new(config.payload_len, config.seed))
}

/// One seed of the batched-delivery experiment: a fresh cell, warmed-up
/// caches and `measure_rounds` frames of arrivals, each served by
/// [`run_delivery_round`]. Returns the totals, without per-group details.
pub fn run_seed(config: &SimConfig) -> Result<RoundResult> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let catalog = Catalog::new(config.m, config.s)?;
    let topology = Topology::generate_cell(
        config.n,
        config.k_helpers,
        config.cell_radius_m,
        config.tx_range_m,
        &mut rng,
    )?;
    let mut caches = warmup_caches(config, &catalog, &mut rng)?;
    let payloads = payloads(config);
    let mut total = RoundResult::default();
    for _ in 0..config.measure_rounds {
        let active = draw_arrivals(config, &catalog, &mut rng)?;
        let r = run_delivery_round(config, &topology, &mut caches, &active, payloads.as_ref())?;
        total.transmissions += r.transmissions;
        total.baseline_transmissions += r.baseline_transmissions;
        total.codewords += r.codewords;
        total.contents_sent += r.contents_sent;
        total.satisfied += r.satisfied;
        total.self_hits += r.self_hits;
        total.misses += r.misses;
    }
    Ok(total)
}

/// Coverage (fraction of terminals within the hop limit of some helper)
/// for every helper count in `helpers` and every hop limit `1..=max_hops`.
/// Rows are ordered by helper count, then hop limit.
pub fn experiment_coverage(
    config: &SimConfig,
    helpers: &[usize],
    max_hops: u32,
    seeds: usize,
) -> Result<Vec<MetricsRow>> {
    let jobs: Vec<(usize, usize)> = helpers
        .iter()
        .flat_map(|&k| (0..seeds).map(move |i| (k, i)))
        .collect();
    let per_job: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(k, i)| {
            let c = with_seed(config, i);
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            let topo = Topology::generate_cell(c.n, k, c.cell_radius_m, c.tx_range_m, &mut rng)?;
            let all: Vec<usize> = (0..k).collect();
            let hops = topo.hop_distances(&all);
            Ok((1..=max_hops)
                .map(|limit| {
                    let covered = hops
                        .iter()
                        .filter(|h| h.is_some_and(|h| h <= limit))
                        .count();
                    if c.n == 0 {
                        0.0
                    } else {
                        covered as f64 / c.n as f64
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (ki, &k) in helpers.iter().enumerate() {
        for limit in 1..=max_hops {
            let samples: Vec<f64> = (0..seeds)
                .map(|i| per_job[ki * seeds + i][limit as usize - 1])
                .collect();
            let s = mean_ci95(&samples);
            let mut row = MetricsRow::blank(Experiment::Coverage, limit as f64, k, seeds);
            row.max_hops = Some(limit);
            row.coverage = s.mean;
            row.ci95 = s.ci95;
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Mean number of distinct contents per coded transmission as a function
/// of the Zipf exponent. Each seed contributes the ratio of contents sent
/// to codewords over its measured rounds; seeds without any codeword are
/// left out of the mean.
pub fn experiment_contents_per_tx(
    config: &SimConfig,
    s_values: &[f64],
    seeds: usize,
) -> Result<Vec<MetricsRow>> {
    let jobs: Vec<(usize, usize)> = (0..s_values.len())
        .flat_map(|si| (0..seeds).map(move |i| (si, i)))
        .collect();
    let totals: Vec<RoundResult> = jobs
        .par_iter()
        .map(|&(si, i)| {
            let c = SimConfig {
                s: s_values[si],
                ..with_seed(config, i)
            };
            run_seed(&c)
        })
        .collect::<Result<_>>()?;

    Ok(s_values
        .iter()
        .enumerate()
        .map(|(si, &s)| {
            let runs = &totals[si * seeds..(si + 1) * seeds];
            let ratios: Vec<f64> = runs
                .iter()
                .filter(|r| r.codewords > 0)
                .map(|r| r.contents_sent as f64 / r.codewords as f64)
                .collect();
            let gains: Vec<f64> = runs
                .iter()
                .map(|r| (r.satisfied as f64 - r.codewords as f64) / config.measure_rounds as f64)
                .collect();
            let summary = mean_ci95(&ratios);
            let mut row =
                MetricsRow::blank(Experiment::ContentsPerTx, s, config.k_helpers, ratios.len());
            row.max_hops = config.max_hops;
            row.contents_per_tx = summary.mean;
            row.ci95 = summary.ci95;
            row.gain = mean_ci95(&gains).mean;
            row.misses = runs.iter().map(|r| r.misses as u64).sum();
            row
        })
        .collect())
}

/// Totals of one queueing run. Every generated request ends up in exactly
/// one of `satisfied`, `self_hits`, `misses` or `queued`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ThroughputRun {
    pub generated: u64,
    pub satisfied: u64,
    pub self_hits: u64,
    pub misses: u64,
    pub queued: u64,
    pub codewords: u64,
    pub transmissions: u64,
    pub helpers: usize,
    pub slots: usize,
}

impl ThroughputRun {
    pub fn per_slot_per_helper(&self) -> f64 {
        if self.helpers == 0 {
            0.0
        } else {
            self.satisfied as f64 / (self.helpers * self.slots) as f64
        }
    }

    pub fn is_conserved(&self) -> bool {
        self.generated == self.satisfied + self.self_hits + self.misses + self.queued
    }
}

/// Slot-by-slot queueing run. Each slot, terminals issue requests per the
/// request model; requests not held locally queue at their assigned helper.
/// An idle helper then codes the oldest `pool_cap` requests of its queue and
/// serves the single group with the most requests per codeword (ties to
/// the group planned first). Uncoded configurations serve the oldest
/// request.
pub fn throughput_run(config: &SimConfig) -> Result<ThroughputRun> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let catalog = Catalog::new(config.m, config.s)?;
    let topology = Topology::generate_cell(
        config.n,
        config.k_helpers,
        config.cell_radius_m,
        config.tx_range_m,
        &mut rng,
    )?;
    let mut caches = warmup_caches(config, &catalog, &mut rng)?;
    let payloads = payloads(config);
    let stores = helper_stores(config, topology.n_helpers());
    let k = topology.n_helpers();
    let mut queues: Vec<VecDeque<Request>> = vec![VecDeque::new(); k];
    let mut busy_until = vec![0usize; k];
    let mut run = ThroughputRun {
        helpers: k,
        slots: config.measure_rounds,
        ..ThroughputRun::default()
    };

    for slot in 0..config.measure_rounds {
        let arrivals = draw_arrivals(config, &catalog, &mut rng)?;
        run.generated += arrivals.len() as u64;
        let mut fresh = Vec::new();
        for r in arrivals {
            if caches[r.terminal].contains(r.rank) {
                caches[r.terminal].update(r.rank);
                run.self_hits += 1;
            } else {
                fresh.push(r);
            }
        }
        let pairs: Vec<(usize, Rank)> = fresh.iter().map(|r| (r.terminal, r.rank)).collect();
        for (r, h) in fresh
            .iter()
            .zip(topology.assign_helpers(&pairs, &stores, config.max_hops))
        {
            match h {
                Some(h) => queues[h].push_back(*r),
                None => run.misses += 1,
            }
        }

        let sides = cache_sets(&caches);
        let mut delivered = Vec::new();
        for h in 0..k {
            let queue = &mut queues[h];
            let before = queue.len();
            queue.retain(|r| !sides[r.terminal].contains(&r.rank));
            run.self_hits += (before - queue.len()) as u64;
            if busy_until[h] > slot || queue.is_empty() {
                continue;
            }
            let take = queue.len().min(config.pool_cap);
            let pool: Vec<Request> = queue.iter().take(take).copied().collect();
            let code = plan(config, &pool, &sides);
            let best = code
                .groups
                .iter()
                .enumerate()
                .max_by(|(ia, a), (ib, b)| {
                    let lhs = a.members.len() * b.codewords.len();
                    let rhs = b.members.len() * a.codewords.len();
                    lhs.cmp(&rhs).then(ib.cmp(ia))
                })
                .map(|(_, g)| g)
                .expect("non-empty pool yields a group");
            let d = deliver(&topology, h, best, &pool, &sides, payloads.as_ref())?;
            run.satisfied += d.requests.len() as u64;
            run.codewords += d.codewords.len() as u64;
            run.transmissions += d.transmissions;
            if config.slot_accounting == SlotAccounting::CodewordPerSlot {
                busy_until[h] = slot + d.codewords.len();
            }
            let mut served = vec![false; take];
            for &i in &best.members {
                served[i] = true;
            }
            let mut idx = 0;
            queue.retain(|_| {
                idx += 1;
                !(idx <= take && served[idx - 1])
            });
            delivered.extend(d.requests);
        }
        apply(&mut caches, &mut delivered);
    }
    run.queued = queues.iter().map(|q| q.len() as u64).sum();
    Ok(run)
}

/// Requests satisfied per slot per helper against the request probability,
/// for a proposed and a baseline configuration. Rows are ordered by `q`,
/// proposed before baseline.
pub fn experiment_helper_throughput(
    proposed: &SimConfig,
    baseline: &SimConfig,
    q_values: &[f64],
    seeds: usize,
) -> Result<Vec<MetricsRow>> {
    let series = [("proposed", proposed), ("baseline", baseline)];
    let jobs: Vec<(usize, usize, usize)> = (0..q_values.len())
        .flat_map(|qi| (0..2).flat_map(move |si| (0..seeds).map(move |i| (qi, si, i))))
        .collect();
    let runs: Vec<ThroughputRun> = jobs
        .par_iter()
        .map(|&(qi, si, i)| {
            let c = SimConfig {
                request_model: super::RequestModel::Bernoulli { q: q_values[qi] },
                ..with_seed(series[si].1, i)
            };
            throughput_run(&c)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (qi, &q) in q_values.iter().enumerate() {
        for (si, (name, cfg)) in series.iter().enumerate() {
            let start = (qi * 2 + si) * seeds;
            let chunk = &runs[start..start + seeds];
            let rates: Vec<f64> = chunk
                .iter()
                .map(ThroughputRun::per_slot_per_helper)
                .collect();
            let gains: Vec<f64> = chunk
                .iter()
                .map(|r| (r.satisfied as f64 - r.codewords as f64) / r.slots as f64)
                .collect();
            let s = mean_ci95(&rates);
            let mut row = MetricsRow::blank(Experiment::Throughput, q, cfg.k_helpers, seeds);
            row.series = name.to_string();
            row.max_hops = cfg.max_hops;
            row.requests_per_slot_per_helper = s.mean;
            row.ci95 = s.ci95;
            row.gain = mean_ci95(&gains).mean;
            row.misses = chunk.iter().map(|r| r.misses).sum();
            rows.push(row);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimConfig {
        SimConfig {
            n: 150,
            m: 100,
            s: 1.0,
            delta: 5,
            k_helpers: 2,
            cell_radius_m: 150.0,
            tx_range_m: 50.0,
            measure_rounds: 20,
            warmup_rounds: 20,
            payload_len: 16,
            ..SimConfig::default()
        }
    }

    #[test]
    fn queueing_runs_conserve_requests() {
        for coded in [true, false] {
            for accounting in [
                SlotAccounting::GroupPerSlot,
                SlotAccounting::CodewordPerSlot,
            ] {
                let c = SimConfig {
                    coded,
                    slot_accounting: accounting,
                    request_model: super::super::RequestModel::Bernoulli { q: 0.2 },
                    ..small()
                };
                let r = throughput_run(&c).unwrap();
                assert!(r.is_conserved(), "{r:?}");
                assert!(r.generated > 0);
            }
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let c = small();
        assert_eq!(run_seed(&c).unwrap(), run_seed(&c).unwrap());
        let rows = |seed| {
            experiment_contents_per_tx(&SimConfig { seed, ..small() }, &[0.5, 1.5], 3).unwrap()
        };
        assert_eq!(rows(9), rows(9));
    }

    #[test]
    fn no_helpers_cover_nothing() {
        let rows = experiment_coverage(&small(), &[0], 4, 3).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.coverage == 0.0));
    }

    #[test]
    fn coded_never_costs_more_than_unicast() {
        let c = SimConfig {
            request_model: super::super::RequestModel::Poisson { rate: 0.5 },
            ..small()
        };
        let r = run_seed(&c).unwrap();
        assert!(r.transmissions <= r.baseline_transmissions);
        assert!(r.satisfied > 0);
    }
}
