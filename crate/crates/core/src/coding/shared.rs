//! Index codes over requesters that may ask for the same content.
//!
//! [`build_code`](super::build_code) works on a dependency graph whose
//! vertices request pairwise distinct contents. A helper's live request pool
//! rarely looks like that: popular contents are wanted by several terminals
//! at once. This module lifts the construction to requester level.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{build_code, CodeGroup, GroupKind, IndexCode, Strategy};
use crate::coding::{disjoint_cycles, greedy_coloring};
use crate::graphs::{DependencyGraph, UnGraph};
use crate::zipf::Rank;

/// How requesters of the same content are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DuplicateHandling {
    /// Every content wanted by two or more requesters is multicast once,
    /// uncoded; only the remaining distinct requests are coded.
    Merge,
    /// Requesters of the same content never conflict, so a clique may hold
    /// several of them. Its codeword XORs the distinct contents, and each
    /// member decodes because it caches every other content in the clique.
    #[default]
    Share,
}

impl fmt::Display for DuplicateHandling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Merge => "merge",
            Self::Share => "share",
        })
    }
}

impl std::str::FromStr for DuplicateHandling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "merge" => Ok(Self::Merge),
            "share" => Ok(Self::Share),
            other => Err(format!(
                "unknown duplicate handling `{other}` (expected merge or share)"
            )),
        }
    }
}

/// Builds an index code whose group members are indices into `requests`.
///
/// `side_info[i]` is what requester `i` holds; no requester may already hold
/// its own request. Several requesters may share a terminal or a content.
pub fn build_requester_code(
    requests: &[Rank],
    side_info: &[&BTreeSet<Rank>],
    strategy: Strategy,
    max_cycle_len: usize,
    duplicates: DuplicateHandling,
) -> IndexCode {
    assert_eq!(
        requests.len(),
        side_info.len(),
        "one side-info set per request"
    );
    match duplicates {
        DuplicateHandling::Merge => {
            let all: Vec<usize> = (0..requests.len()).collect();
            merged_then(requests, side_info, &all, |dep, members| {
                remap(build_code(dep, strategy, max_cycle_len).groups, members)
            })
        }
        DuplicateHandling::Share => shared(requests, side_info, strategy, max_cycle_len),
    }
}

fn shared(
    requests: &[Rank],
    side_info: &[&BTreeSet<Rank>],
    strategy: Strategy,
    max_cycle_len: usize,
) -> IndexCode {
    let n = requests.len();
    let mut groups = Vec::new();
    let mut leftover: Vec<usize> = (0..n).collect();

    if matches!(strategy, Strategy::Coloring | Strategy::ColoringThenCycles) {
        let mut conflicts = UnGraph::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let compatible = requests[i] == requests[j]
                    || (side_info[j].contains(&requests[i]) && side_info[i].contains(&requests[j]));
                if !compatible {
                    conflicts.add_edge(i, j);
                }
            }
        }
        leftover.clear();
        for class in greedy_coloring(&conflicts).classes() {
            let distinct: BTreeSet<Rank> = class.iter().map(|&v| requests[v]).collect();
            if distinct.len() > 1 {
                groups.push(group(GroupKind::Clique, class, requests));
            } else {
                leftover.extend(class);
            }
        }
        leftover.sort_unstable();
    }

    let cycles = strategy != Strategy::Coloring;
    groups.extend(
        merged_then(requests, side_info, &leftover, |dep, members| {
            if !cycles {
                return Vec::new();
            }
            disjoint_cycles(dep.graph(), max_cycle_len, &[])
                .into_iter()
                .map(|cycle| {
                    let ids = cycle.iter().map(|&v| members[v]).collect();
                    group(GroupKind::Cycle, ids, requests)
                })
                .collect()
        })
        .groups,
    );
    IndexCode::from_groups(groups)
}

// Splits `pool` into contents wanted more than once, each multicast plainly
// to all of its requesters, and distinct requests handed to `code` as a
// dependency graph. Distinct requests not covered by `code` go out uncoded.
fn merged_then(
    requests: &[Rank],
    side_info: &[&BTreeSet<Rank>],
    pool: &[usize],
    code: impl FnOnce(&DependencyGraph, &[usize]) -> Vec<CodeGroup>,
) -> IndexCode {
    let mut by_rank: BTreeMap<Rank, Vec<usize>> = BTreeMap::new();
    for &v in pool {
        by_rank.entry(requests[v]).or_default().push(v);
    }
    let mut groups = Vec::new();
    let mut unique = Vec::new();
    for members in by_rank.into_values() {
        if members.len() > 1 {
            groups.push(group(GroupKind::Singleton, members, requests));
        } else {
            unique.push(members[0]);
        }
    }
    unique.sort_unstable();
    let dep = DependencyGraph::new(
        unique.iter().map(|&v| requests[v]).collect(),
        unique.iter().map(|&v| side_info[v].clone()).collect(),
    )
    .expect("requests are distinct after merging");
    let coded = code(&dep, &unique);
    let mut covered = vec![false; requests.len()];
    for g in &coded {
        for &v in &g.members {
            covered[v] = true;
        }
    }
    groups.extend(coded);
    for &v in unique.iter().filter(|&&v| !covered[v]) {
        groups.push(group(GroupKind::Singleton, vec![v], requests));
    }
    IndexCode::from_groups(groups)
}

fn group(kind: GroupKind, members: Vec<usize>, requests: &[Rank]) -> CodeGroup {
    let reqs: Vec<Rank> = members.iter().map(|&v| requests[v]).collect();
    CodeGroup::new(kind, members, &reqs)
}

fn remap(groups: Vec<CodeGroup>, members: &[usize]) -> Vec<CodeGroup> {
    groups
        .into_iter()
        .map(|mut g| {
            for v in &mut g.members {
                *v = members[*v];
            }
            g
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::decode;

    fn sets(raw: &[&[Rank]]) -> Vec<BTreeSet<Rank>> {
        raw.iter().map(|r| r.iter().copied().collect()).collect()
    }

    fn all_decode(code: &IndexCode, requests: &[Rank], side: &[BTreeSet<Rank>]) -> bool {
        code.groups.iter().all(|g| {
            let received = crate::coding::encode(g, None);
            g.members.iter().all(|&v| {
                let mut known = BTreeMap::new();
                decode(&side[v], &mut known, &received, requests[v], None).is_ok()
            })
        })
    }

    fn covers_once(code: &IndexCode, n: usize) -> bool {
        let mut seen = vec![0; n];
        for g in &code.groups {
            for &v in &g.members {
                seen[v] += 1;
            }
        }
        seen.iter().all(|&c| c == 1)
    }

    #[test]
    fn duplicates_join_a_clique_when_sharing() {
        // two terminals want 1 and hold 2; one wants 2 and holds 1
        let requests = [1, 1, 2];
        let side = sets(&[&[2], &[2, 5], &[1]]);
        let refs: Vec<&BTreeSet<Rank>> = side.iter().collect();
        let code = build_requester_code(
            &requests,
            &refs,
            Strategy::Coloring,
            4,
            DuplicateHandling::Share,
        );
        assert_eq!(code.total_length, 1);
        assert_eq!(code.groups[0].kind, GroupKind::Clique);
        assert_eq!(code.groups[0].codewords, vec![[1, 2].into_iter().collect()]);
        assert!(all_decode(&code, &requests, &side));

        let merged = build_requester_code(
            &requests,
            &refs,
            Strategy::Coloring,
            4,
            DuplicateHandling::Merge,
        );
        assert_eq!(merged.total_length, 2);
        assert!(covers_once(&merged, 3));
        assert!(all_decode(&merged, &requests, &side));
    }

    #[test]
    fn distinct_requests_match_build_code() {
        let requests = [3, 1, 4];
        let side = sets(&[&[1, 4], &[3, 4], &[1, 3]]);
        let refs: Vec<&BTreeSet<Rank>> = side.iter().collect();
        let dep = DependencyGraph::new(requests.to_vec(), side.clone()).unwrap();
        for strategy in Strategy::ALL {
            for dup in [DuplicateHandling::Merge, DuplicateHandling::Share] {
                let code = build_requester_code(&requests, &refs, strategy, 4, dup);
                assert_eq!(
                    code.total_length,
                    build_code(&dep, strategy, 4).total_length
                );
            }
        }
    }

    #[test]
    fn leftover_cycles_and_plain_multicasts() {
        // 0 -> 1 -> 2 -> 0 one-way cycle; 3 and 4 both want 9
        let requests = [1, 2, 3, 9, 9];
        let side = sets(&[&[3], &[1], &[2], &[], &[7]]);
        let refs: Vec<&BTreeSet<Rank>> = side.iter().collect();
        let code = build_requester_code(
            &requests,
            &refs,
            Strategy::ColoringThenCycles,
            4,
            DuplicateHandling::Share,
        );
        assert!(covers_once(&code, 5));
        assert!(all_decode(&code, &requests, &side));
        assert_eq!(code.total_length, 3);
        let kinds: BTreeSet<GroupKind> = code.groups.iter().map(|g| g.kind).collect();
        assert_eq!(
            kinds,
            [GroupKind::Cycle, GroupKind::Singleton]
                .into_iter()
                .collect()
        );
    }
}
