//! Per-terminal content caches under LRU and LFU replacement.

use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::num::Scalar;
use crate::zipf::{Catalog, Rank};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CachePolicy {
    Lru,
    Lfu,
}

impl std::str::FromStr for CachePolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lru" => Ok(Self::Lru),
            "lfu" => Ok(Self::Lfu),
            other => Err(format!(
                "unknown cache policy `{other}` (expected lru or lfu)"
            )),
        }
    }
}

impl std::fmt::Display for CachePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Lru => "lru",
            Self::Lfu => "lfu",
        })
    }
}

/// One terminal's cache of `capacity` content ranks.
///
/// `slots[0]` is the first cache location. Under LRU slots are ordered by
/// recency (most recent first); under LFU by descending request count with
/// ties going to the lower rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheState {
    policy: CachePolicy,
    capacity: usize,
    slots: Vec<Rank>,
    freq: BTreeMap<Rank, u64>,
}

impl CacheState {
    pub fn new(policy: CachePolicy, capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(invalid("delta", "cache size must be positive"));
        }
        Ok(Self {
            policy,
            capacity,
            slots: Vec::with_capacity(capacity),
            freq: BTreeMap::new(),
        })
    }

    pub fn policy(&self) -> CachePolicy {
        self.policy
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn slots(&self) -> &[Rank] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn contains(&self, rank: Rank) -> bool {
        self.slots.contains(&rank)
    }

    /// Request count seen by this cache; always zero under LRU.
    pub fn frequency(&self, rank: Rank) -> u64 {
        self.freq.get(&rank).copied().unwrap_or(0)
    }

    /// Records a request for `rank` and applies the replacement policy.
    pub fn update(&mut self, rank: Rank) {
        match self.policy {
            CachePolicy::Lru => self.lru_update(rank),
            CachePolicy::Lfu => self.lfu_update(rank),
        }
    }

    fn lru_update(&mut self, rank: Rank) {
        match self.slots.iter().position(|&r| r == rank) {
            Some(pos) => self.slots[..=pos].rotate_right(1),
            None => {
                if self.slots.len() == self.capacity {
                    self.slots.pop();
                }
                self.slots.insert(0, rank);
            }
        }
    }

    fn lfu_update(&mut self, rank: Rank) {
        *self.freq.entry(rank).or_insert(0) += 1;
        // Only `rank` changed its key, so the top-capacity set changes by at
        // most one element: either it is already cached, there is room, or it
        // displaces the current last slot.
        let mut pos = match self.slots.iter().position(|&r| r == rank) {
            Some(pos) => pos,
            None if self.slots.len() < self.capacity => {
                self.slots.push(rank);
                self.slots.len() - 1
            }
            None => {
                let last = self.slots.len() - 1;
                if !self.lfu_before(rank, self.slots[last]) {
                    return;
                }
                self.slots[last] = rank;
                last
            }
        };
        while pos > 0 && self.lfu_before(self.slots[pos], self.slots[pos - 1]) {
            self.slots.swap(pos, pos - 1);
            pos -= 1;
        }
    }

    // LFU order: higher count first, then lower rank.
    fn lfu_before(&self, a: Rank, b: Rank) -> bool {
        let (fa, fb) = (self.frequency(a), self.frequency(b));
        fa > fb || (fa == fb && a < b)
    }
}

/// Lower bound on `Pr[rank in C_j]` for a terminal under LRU or LFU: the
/// probability that the terminal's latest request was `rank`, i.e. the Zipf pmf.
pub fn hit_prob_floor<T: Scalar>(rank: Rank, cat: &Catalog<T>) -> Result<T> {
    cat.pmf(rank)
}
