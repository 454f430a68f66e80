use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};

use super::{RequestModel, SimConfig};
use crate::cache::CacheState;
use crate::coding::{
    build_requester_code, decode, encode, CodeGroup, GroupKind, IndexCode, Payloads,
};
use crate::error::{Error, Result};
use crate::topology::{HelperStore, MulticastTree, Topology};
use crate::zipf::{Catalog, Rank};

/// A terminal asking for one content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Request {
    pub terminal: usize,
    pub rank: Rank,
}

impl Request {
    pub fn new(terminal: usize, rank: Rank) -> Self {
        Self { terminal, rank }
    }
}

/// How one member recovered its content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeTrace {
    pub terminal: usize,
    pub want: Rank,
    /// Contents resolved by peeling, in order.
    pub steps: Vec<Rank>,
    /// Cached contents the terminal used as side information.
    pub cache: BTreeSet<Rank>,
}

/// One code group sent by a helper and verified at every member.
#[derive(Debug, Clone, PartialEq)]
pub struct Delivery {
    pub helper: usize,
    pub kind: GroupKind,
    pub requests: Vec<Request>,
    /// Rank sets actually transmitted by the helper.
    pub codewords: Vec<BTreeSet<Rank>>,
    /// `false` when the group went out as plain unicasts.
    pub coded: bool,
    /// Multicast tree of a coded group; `None` for unicasts.
    pub tree: Option<MulticastTree>,
    /// Broadcasts by the helper and relays.
    pub transmissions: u64,
    /// What serving the same requests by unicast costs.
    pub unicast_cost: u64,
    pub traces: Vec<DecodeTrace>,
}

/// Outcome of serving a batch of requests.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoundResult {
    pub transmissions: u64,
    pub baseline_transmissions: u64,
    pub codewords: u64,
    /// Sum of `|rank_set|` over codewords.
    pub contents_sent: u64,
    /// Requests delivered by a helper.
    pub satisfied: usize,
    /// Requests already in the requester's cache.
    pub self_hits: usize,
    /// Requests no helper could serve.
    pub misses: usize,
    pub deliveries: Vec<Delivery>,
}

/// Fills each terminal's cache from `warmup_rounds` independent requests.
pub fn warmup_caches<R: Rng + ?Sized>(
    config: &SimConfig,
    catalog: &Catalog<f64>,
    rng: &mut R,
) -> Result<Vec<CacheState>> {
    (0..config.n)
        .map(|_| {
            let mut cache = CacheState::new(config.policy, config.delta)?;
            for _ in 0..config.warmup_rounds {
                cache.update(catalog.sample(rng));
            }
            Ok(cache)
        })
        .collect()
}

/// Requests arriving over one frame of `frame_slots` slots, grouped by
/// terminal in ascending order.
pub fn draw_arrivals<R: Rng + ?Sized>(
    config: &SimConfig,
    catalog: &Catalog<f64>,
    rng: &mut R,
) -> Result<Vec<Request>> {
    let slots = config.frame_slots as f64;
    let mut counts: Box<dyn FnMut(&mut R) -> u64> = match config.request_model {
        RequestModel::Poisson { rate } => {
            let d = Poisson::new(rate * slots)
                .map_err(|e| crate::error::invalid("rate", e.to_string()))?;
            Box::new(move |rng: &mut R| d.sample(rng) as u64)
        }
        RequestModel::Bernoulli { q } => {
            let d = Binomial::new(config.frame_slots as u64, q)
                .map_err(|e| crate::error::invalid("q", e.to_string()))?;
            Box::new(move |rng: &mut R| d.sample(rng))
        }
    };
    let mut out = Vec::new();
    for t in 0..config.n {
        for _ in 0..counts(rng) {
            out.push(Request::new(t, catalog.sample(rng)));
        }
    }
    Ok(out)
}

pub(crate) fn helper_stores(config: &SimConfig, k: usize) -> Vec<HelperStore> {
    vec![HelperStore::TopK(config.helper_top_k.min(config.m)); k]
}

pub(crate) fn cache_sets(caches: &[CacheState]) -> Vec<BTreeSet<Rank>> {
    caches
        .iter()
        .map(|c| c.slots().iter().copied().collect())
        .collect()
}

/// Code groups for `pool`; members index into `pool`.
pub(crate) fn plan(config: &SimConfig, pool: &[Request], sides: &[BTreeSet<Rank>]) -> IndexCode {
    let ranks: Vec<Rank> = pool.iter().map(|r| r.rank).collect();
    if !config.coded {
        let groups = ranks
            .iter()
            .enumerate()
            .map(|(i, &r)| CodeGroup::new(GroupKind::Singleton, vec![i], &[r]))
            .collect();
        return IndexCode::from_groups(groups);
    }
    let side: Vec<&BTreeSet<Rank>> = pool.iter().map(|r| &sides[r.terminal]).collect();
    build_requester_code(
        &ranks,
        &side,
        config.strategy,
        config.max_cycle_len,
        config.duplicates,
    )
}

/// Sends `group` from `helper` and checks that every member decodes.
///
/// A coded group whose multicast would cost more than unicasting its
/// requests is sent as unicasts instead, so coding never loses.
pub(crate) fn deliver(
    topology: &Topology,
    helper: usize,
    group: &CodeGroup,
    pool: &[Request],
    sides: &[BTreeSet<Rank>],
    payloads: Option<&Payloads>,
) -> Result<Delivery> {
    let requests: Vec<Request> = group.members.iter().map(|&i| pool[i]).collect();
    let pairs: Vec<(usize, Rank)> = requests.iter().map(|r| (r.terminal, r.rank)).collect();
    let unicast_cost = topology.baseline_unicast_cost(helper, &pairs)?;
    let terminals: Vec<usize> = requests
        .iter()
        .map(|r| r.terminal)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let tree = topology.multicast_tree(helper, &terminals)?;
    let multicast_cost = (group.codewords.len() * tree.transmission_count()) as u64;

    let (sent, tree, coded, transmissions) = if multicast_cost <= unicast_cost {
        (encode(group, payloads), Some(tree), true, multicast_cost)
    } else {
        let plain: Vec<CodeGroup> = requests
            .iter()
            .map(|r| CodeGroup::new(GroupKind::Singleton, vec![r.terminal], &[r.rank]))
            .collect();
        let sent = plain.iter().flat_map(|g| encode(g, payloads)).collect();
        (sent, None, false, unicast_cost)
    };

    let mut traces = Vec::with_capacity(requests.len());
    for r in &requests {
        let cache = &sides[r.terminal];
        let mut known = BTreeMap::new();
        let out = decode(cache, &mut known, &sent, r.rank, payloads).map_err(|_| {
            Error::DecodeFailure {
                terminal: r.terminal,
                want: r.rank,
            }
        })?;
        if let (Some(p), Some(got)) = (payloads, &out.payload) {
            if *got != p.of(r.rank) {
                return Err(Error::PayloadMismatch {
                    terminal: r.terminal,
                    rank: r.rank,
                });
            }
        }
        traces.push(DecodeTrace {
            terminal: r.terminal,
            want: r.rank,
            steps: out.steps,
            cache: cache.clone(),
        });
    }
    Ok(Delivery {
        helper,
        kind: group.kind,
        requests,
        codewords: sent.into_iter().map(|c| c.ranks).collect(),
        coded,
        tree,
        transmissions,
        unicast_cost,
        traces,
    })
}

/// Receivers cache what they asked for, in ascending terminal order.
pub(crate) fn apply(caches: &mut [CacheState], delivered: &mut [Request]) {
    delivered.sort_by_key(|r| r.terminal);
    for r in delivered.iter() {
        caches[r.terminal].update(r.rank);
    }
}

impl RoundResult {
    pub(crate) fn record(&mut self, d: Delivery) {
        self.transmissions += d.transmissions;
        self.baseline_transmissions += d.unicast_cost;
        self.codewords += d.codewords.len() as u64;
        self.contents_sent += d.codewords.iter().map(|c| c.len() as u64).sum::<u64>();
        self.satisfied += d.requests.len();
        self.deliveries.push(d);
    }
}

/// Serves every active request in one round.
///
/// Self-hits are answered from the terminal's own cache. The rest go to the
/// closest helper holding the content within the hop limit; each helper
/// codes its requests, multicasts the groups and every member decodes
/// against its cache as it was at the start of the round. Caches then
/// absorb the delivered contents.
pub fn run_delivery_round(
    config: &SimConfig,
    topology: &Topology,
    caches: &mut [CacheState],
    active: &[Request],
    payloads: Option<&Payloads>,
) -> Result<RoundResult> {
    let mut result = RoundResult::default();
    let mut pending = Vec::new();
    for &r in active {
        if caches[r.terminal].contains(r.rank) {
            caches[r.terminal].update(r.rank);
            result.self_hits += 1;
        } else {
            pending.push(r);
        }
    }
    let pairs: Vec<(usize, Rank)> = pending.iter().map(|r| (r.terminal, r.rank)).collect();
    let stores = helper_stores(config, topology.n_helpers());
    let assigned = topology.assign_helpers(&pairs, &stores, config.max_hops);
    let mut per_helper = vec![Vec::new(); topology.n_helpers()];
    for (r, h) in pending.iter().zip(&assigned) {
        match h {
            Some(h) => per_helper[*h].push(*r),
            None => result.misses += 1,
        }
    }

    let sides = cache_sets(caches);
    for (helper, pool) in per_helper.iter().enumerate() {
        for group in plan(config, pool, &sides).groups {
            result.record(deliver(topology, helper, &group, pool, &sides, payloads)?);
        }
    }
    let mut delivered: Vec<Request> = result
        .deliveries
        .iter()
        .flat_map(|d| d.requests.iter().copied())
        .collect();
    apply(caches, &mut delivered);
    Ok(result)
}
