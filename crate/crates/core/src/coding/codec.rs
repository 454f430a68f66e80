//! GF(2) encoding of code groups and the peeling decoder.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CodeGroup, GroupKind};
use crate::zipf::Rank;

/// Synthetic content bytes: content `r` is `len` bytes of a ChaCha stream
/// keyed by `r` and `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Payloads {
    len: usize,
    seed: u64,
}

impl Payloads {
    pub const DEFAULT_LEN: usize = 1024;

    pub fn new(len: usize, seed: u64) -> Self {
        Self { len, seed }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn of(&self, rank: Rank) -> Vec<u8> {
        let key = self.seed ^ (rank as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        let mut bytes = vec![0u8; self.len];
        rng.fill(&mut bytes[..]);
        bytes
    }
}

pub fn xor_into(dst: &mut [u8], src: &[u8]) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// One coded transmission: the XOR of the contents in `ranks`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub ranks: BTreeSet<Rank>,
    pub payload: Option<Vec<u8>>,
}

impl Codeword {
    pub fn symbolic(ranks: impl IntoIterator<Item = Rank>) -> Self {
        Self {
            ranks: ranks.into_iter().collect(),
            payload: None,
        }
    }
}

/// Codewords of a group; payloads are filled in when `payloads` is given.
pub fn encode(group: &CodeGroup, payloads: Option<&Payloads>) -> Vec<Codeword> {
    group
        .codewords
        .iter()
        .map(|ranks| Codeword {
            ranks: ranks.clone(),
            payload: payloads.map(|p| {
                let mut acc = vec![0u8; p.len()];
                for &r in ranks {
                    xor_into(&mut acc, &p.of(r));
                }
                acc
            }),
        })
        .collect()
}

/// Symbolic rank sets for a group, in transmission order.
pub(crate) fn group_codewords(kind: GroupKind, requests: &[Rank]) -> Vec<BTreeSet<Rank>> {
    match kind {
        GroupKind::Clique | GroupKind::Singleton => vec![requests.iter().copied().collect()],
        GroupKind::Cycle => requests
            .windows(2)
            .map(|w| [w[0], w[1]].into_iter().collect())
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    /// Recovered bytes of the wanted content (payload mode only).
    pub payload: Option<Vec<u8>>,
    /// Contents resolved by peeling, in order; empty for a cache hit.
    pub steps: Vec<Rank>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Undecodable {
    pub want: Rank,
}

/// Peeling decoder.
///
/// Repeatedly scans `received`; a codeword with exactly one content outside
/// `cache` and `decoded` resolves that content. Succeeds once `want` is
/// known, fails when a full pass resolves nothing. Contents resolved along
/// the way are recorded in `decoded` (payload bytes, or empty vectors in
/// symbolic mode). Cached payloads come from `payloads` when given.
pub fn decode(
    cache: &BTreeSet<Rank>,
    decoded: &mut BTreeMap<Rank, Vec<u8>>,
    received: &[Codeword],
    want: Rank,
    payloads: Option<&Payloads>,
) -> Result<Decoded, Undecodable> {
    let bytes_of = |r: Rank, decoded: &BTreeMap<Rank, Vec<u8>>| -> Vec<u8> {
        match decoded.get(&r) {
            Some(b) => b.clone(),
            None => payloads.map(|p| p.of(r)).unwrap_or_default(),
        }
    };
    let known =
        |r: Rank, decoded: &BTreeMap<Rank, Vec<u8>>| cache.contains(&r) || decoded.contains_key(&r);

    if known(want, decoded) {
        let payload = payloads.map(|_| bytes_of(want, decoded));
        return Ok(Decoded {
            payload,
            steps: Vec::new(),
        });
    }
    let mut steps = Vec::new();
    loop {
        let mut progress = false;
        for cw in received {
            let mut unknown = cw.ranks.iter().filter(|&&r| !known(r, decoded));
            let (Some(&x), None) = (unknown.next(), unknown.next()) else {
                continue;
            };
            let bytes = match (&cw.payload, payloads) {
                (Some(coded), Some(_)) => {
                    let mut acc = coded.clone();
                    for &r in cw.ranks.iter().filter(|&&r| r != x) {
                        xor_into(&mut acc, &bytes_of(r, decoded));
                    }
                    acc
                }
                _ => Vec::new(),
            };
            decoded.insert(x, bytes);
            steps.push(x);
            progress = true;
            if x == want {
                let payload = payloads.map(|_| decoded[&want].clone());
                return Ok(Decoded { payload, steps });
            }
        }
        if !progress {
            return Err(Undecodable { want });
        }
    }
}
