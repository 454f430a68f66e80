//! Linear XOR index codes over a dependency graph.
//!
//! A code partitions the requesting vertices into groups:
//!
//! * a clique of mutually side-informed vertices is served by one codeword,
//!   the XOR of every member's request;
//! * a directed cycle `v1 -> .. -> vk` is served by the `k - 1` codewords
//!   `r(v_i) ^ r(v_{i+1})`, saving one transmission;
//! * any other vertex is sent its content uncoded.

mod codec;
mod coloring;
mod cycles;
mod shared;

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, Write};

pub use codec::{decode, encode, xor_into, Codeword, Decoded, Payloads, Undecodable};
pub use coloring::{greedy_coloring, optimal_clique_cover, Coloring, ORACLE_MAX_VERTICES};
pub use cycles::disjoint_cycles;
pub use shared::{build_requester_code, DuplicateHandling};

use crate::graphs::{conflict_graph, DependencyGraph};
use crate::zipf::Rank;

/// Longest cycle searched by default.
pub const DEFAULT_MAX_CYCLE_LEN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKind {
    Clique,
    Cycle,
    Singleton,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Clique => "clique",
            Self::Cycle => "cycle",
            Self::Singleton => "singleton",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeGroup {
    pub kind: GroupKind,
    /// Dependency-graph vertices; for cycles in cycle order.
    pub members: Vec<usize>,
    /// Requested content of each member, aligned with `members`.
    pub requests: Vec<Rank>,
    pub codewords: Vec<BTreeSet<Rank>>,
}

impl CodeGroup {
    pub fn new(kind: GroupKind, members: Vec<usize>, requests: &[Rank]) -> Self {
        assert_eq!(members.len(), requests.len());
        let codewords = codec::group_codewords(kind, requests);
        Self {
            kind,
            members,
            requests: requests.to_vec(),
            codewords,
        }
    }

    fn from_dep(kind: GroupKind, members: Vec<usize>, dep: &DependencyGraph) -> Self {
        let reqs: Vec<Rank> = members.iter().map(|&v| dep.request(v)).collect();
        Self::new(kind, members, &reqs)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexCode {
    pub groups: Vec<CodeGroup>,
    /// Number of codewords `l`.
    pub total_length: usize,
}

impl IndexCode {
    pub fn from_groups(groups: Vec<CodeGroup>) -> Self {
        let total_length = groups.iter().map(|g| g.codewords.len()).sum();
        Self {
            groups,
            total_length,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.groups.iter().map(CodeGroup::len).sum()
    }

    /// Dumps one line per codeword: `group_kind,member_ids,rank_set`, with
    /// list items separated by `;`.
    pub fn write_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(";");
        writeln!(out, "group_kind,member_ids,rank_set")?;
        for g in &self.groups {
            let members = join(&mut g.members.iter().map(|m| m.to_string()));
            for cw in &g.codewords {
                let ranks = join(&mut cw.iter().map(|r| r.to_string()));
                writeln!(out, "{},{members},{ranks}", g.kind)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Colour classes of the conflict graph become cliques.
    Coloring,
    /// Disjoint cycles only.
    Cycles,
    /// Cliques of size two or more from the colouring, then cycles among the
    /// vertices left alone.
    ColoringThenCycles,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Self::Coloring, Self::Cycles, Self::ColoringThenCycles];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Coloring => "coloring",
            Self::Cycles => "cycles",
            Self::ColoringThenCycles => "coloring-then-cycles",
        })
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "coloring" => Ok(Self::Coloring),
            "cycles" => Ok(Self::Cycles),
            "coloring-then-cycles" => Ok(Self::ColoringThenCycles),
            other => Err(format!(
                "unknown strategy `{other}` (expected coloring, cycles or coloring-then-cycles)"
            )),
        }
    }
}

/// Builds an index code covering every vertex of `dep` exactly once.
pub fn build_code(dep: &DependencyGraph, strategy: Strategy, max_cycle_len: usize) -> IndexCode {
    let n = dep.n();
    let mut groups = Vec::new();
    let mut covered = vec![false; n];

    if matches!(strategy, Strategy::Coloring | Strategy::ColoringThenCycles) {
        let classes = greedy_coloring(&conflict_graph(dep)).classes();
        for class in classes {
            if class.len() > 1 || strategy == Strategy::Coloring {
                for &v in &class {
                    covered[v] = true;
                }
                let kind = if class.len() > 1 {
                    GroupKind::Clique
                } else {
                    GroupKind::Singleton
                };
                groups.push(CodeGroup::from_dep(kind, class, dep));
            }
        }
    }
    if matches!(strategy, Strategy::Cycles | Strategy::ColoringThenCycles) {
        let excluded: Vec<usize> = (0..n).filter(|&v| covered[v]).collect();
        for cycle in disjoint_cycles(dep.graph(), max_cycle_len, &excluded) {
            for &v in &cycle {
                covered[v] = true;
            }
            groups.push(CodeGroup::from_dep(GroupKind::Cycle, cycle, dep));
        }
    }
    for v in (0..n).filter(|&v| !covered[v]) {
        groups.push(CodeGroup::from_dep(GroupKind::Singleton, vec![v], dep));
    }
    IndexCode::from_groups(groups)
}

/// Saved transmissions `n - l` relative to uncoded delivery.
pub fn coding_gain(code: &IndexCode, n: usize) -> i64 {
    n as i64 - code.total_length as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Digraph;
    use std::collections::BTreeMap;

    fn fig2_dep() -> DependencyGraph {
        let set = |r: &[Rank]| r.iter().copied().collect::<BTreeSet<_>>();
        DependencyGraph::new(
            vec![3, 1, 4],
            vec![set(&[1, 4]), set(&[3, 4]), set(&[1, 3])],
        )
        .unwrap()
    }

    #[test]
    fn fig2_single_clique() {
        let code = build_code(&fig2_dep(), Strategy::Coloring, DEFAULT_MAX_CYCLE_LEN);
        assert_eq!(code.groups.len(), 1);
        let g = &code.groups[0];
        assert_eq!(g.kind, GroupKind::Clique);
        assert_eq!(g.members, vec![0, 1, 2]);
        assert_eq!(g.codewords, vec![[1, 3, 4].into_iter().collect()]);
        assert_eq!(code.total_length, 1);
        assert_eq!(coding_gain(&code, 3), 2);
    }

    #[test]
    fn no_edges_no_gain() {
        let dep = DependencyGraph::from_digraph(&Digraph::empty(5));
        for s in Strategy::ALL {
            let code = build_code(&dep, s, 4);
            assert_eq!(code.total_length, 5);
            assert!(code.groups.iter().all(|g| g.kind == GroupKind::Singleton));
            assert_eq!(coding_gain(&code, 5), 0);
        }
    }

    #[test]
    fn directed_triangle_saves_one() {
        let dep = DependencyGraph::from_digraph(&Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]));
        let code = build_code(&dep, Strategy::ColoringThenCycles, 4);
        assert_eq!(code.groups.len(), 1);
        assert_eq!(code.groups[0].kind, GroupKind::Cycle);
        assert_eq!(code.total_length, 2);
        assert_eq!(coding_gain(&code, 3), 1);
    }

    #[test]
    fn complete_graph_saves_n_minus_one() {
        let dep = DependencyGraph::from_digraph(&Digraph::complete(9));
        let code = build_code(&dep, Strategy::Coloring, 4);
        assert_eq!(coding_gain(&code, 9), 8);
    }

    #[test]
    fn every_member_decodes() {
        let g = Digraph::from_edges(
            7,
            [
                (0, 1),
                (1, 0),
                (2, 3),
                (3, 4),
                (4, 2),
                (5, 6),
                (1, 2),
                (4, 5),
            ],
        );
        let dep = DependencyGraph::from_digraph(&g);
        for s in Strategy::ALL {
            let code = build_code(&dep, s, 4);
            assert_eq!(code.vertex_count(), 7);
            for group in &code.groups {
                let cws = encode(group, None);
                for (&v, &want) in group.members.iter().zip(&group.requests) {
                    let mut dec = BTreeMap::new();
                    assert!(decode(dep.side_info(v), &mut dec, &cws, want, None).is_ok());
                }
            }
        }
    }

    #[test]
    fn dump_lines() {
        let code = build_code(&fig2_dep(), Strategy::Coloring, 4);
        let mut buf = Vec::new();
        code.write_dump(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "group_kind,member_ids,rank_set\nclique,0;1;2,1;3;4\n"
        );
    }
}
