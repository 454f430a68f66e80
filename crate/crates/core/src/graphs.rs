//! Dependency graphs, conflict graphs and the random graph models behind the
//! disjoint-cycle analysis.
//!
//! [`Digraph`] and [`UnGraph`] are dense bit-matrix graphs: instances here are
//! at most a few thousand vertices and the index-coding heuristics are
//! dominated by adjacency queries.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, BufRead, Write};

use rand::Rng;

use crate::cache::CacheState;
use crate::error::{Error, Result};
use crate::zipf::Rank;

#[derive(Clone, PartialEq, Eq)]
struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize, on: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        if on {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    fn row_count(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    fn row_iter(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries((0..self.n).map(|i| (i, self.row_iter(i).collect::<Vec<_>>())))
            .finish()
    }
}

/// Directed graph without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    adj: BitMatrix,
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        Self {
            adj: BitMatrix::new(n),
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::empty(n);
        for (i, j) in edges {
            g.add_edge(i, j);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.n
    }

    /// Adds `i -> j`; self-loops are ignored.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        if i != j {
            self.adj.set(i, j, true);
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj.get(i, j)
    }

    pub fn is_mutual(&self, i: usize, j: usize) -> bool {
        self.adj.get(i, j) && self.adj.get(j, i)
    }

    /// Out-neighbours in ascending order.
    pub fn out_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj.row_iter(i)
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.adj.row_count(i)
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n()).map(|i| self.out_degree(i)).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |i| self.out_neighbors(i).map(move |j| (i, j)))
    }

    pub fn write_edge_list<W: Write>(&self, out: W) -> io::Result<()> {
        write_edge_list(out, self.n(), "directed", self.edges())
    }
}

/// Undirected simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnGraph {
    adj: BitMatrix,
}

impl UnGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            adj: BitMatrix::new(n),
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::empty(n);
        for (i, j) in edges {
            g.add_edge(i, j);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.n
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        if i != j {
            self.adj.set(i, j, true);
            self.adj.set(j, i, true);
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj.get(i, j)
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj.row_iter(i)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj.row_count(i)
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n()).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    /// Edges with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |i| {
            self.neighbors(i)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    pub fn density(&self) -> f64 {
        let n = self.n();
        if n < 2 {
            return 0.0;
        }
        self.edge_count() as f64 / (n * (n - 1) / 2) as f64
    }

    /// Set complement on the same vertices.
    pub fn complement(&self) -> UnGraph {
        let n = self.n();
        let mut g = UnGraph::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if !self.has_edge(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn write_edge_list<W: Write>(&self, out: W) -> io::Result<()> {
        write_edge_list(out, self.n(), "undirected", self.edges())
    }
}

fn write_edge_list<W: Write>(
    mut out: W,
    n: usize,
    kind: &str,
    edges: impl Iterator<Item = (usize, usize)>,
) -> io::Result<()> {
    writeln!(out, "# n={n} {kind}")?;
    for (i, j) in edges {
        writeln!(out, "{i} {j}")?;
    }
    Ok(())
}

/// A graph read back from the edge-list text format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeList {
    Directed(Digraph),
    Undirected(UnGraph),
}

/// Parses the `# n=<n> directed|undirected` edge-list format.
pub fn read_edge_list<R: BufRead>(input: R) -> io::Result<EdgeList> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad("empty edge list".into()))??;
    let mut parts = header
        .strip_prefix("# n=")
        .ok_or_else(|| bad(format!("bad header `{header}`")))?
        .split_whitespace();
    let n: usize = parts
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad(format!("bad vertex count in `{header}`")))?;
    let directed = match parts.next() {
        Some("directed") => true,
        Some("undirected") => false,
        _ => return Err(bad(format!("bad graph kind in `{header}`"))),
    };
    let mut edges = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next()) {
            (Some(Ok(i)), Some(Ok(j))) if i < n && j < n => edges.push((i, j)),
            _ => return Err(bad(format!("bad edge `{line}`"))),
        }
    }
    Ok(if directed {
        EdgeList::Directed(Digraph::from_edges(n, edges))
    } else {
        EdgeList::Undirected(UnGraph::from_edges(n, edges))
    })
}

/// Directed Erdős–Rényi graph: every ordered pair `(i, j)`, `i != j`, is an
/// edge independently with probability `p`.
pub fn random_directed_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Digraph {
    let p = p.clamp(0.0, 1.0);
    let mut g = Digraph::empty(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Undirected graph keeping `{i, j}` iff both `i -> j` and `j -> i` exist.
pub fn bidirected_core(g: &Digraph) -> UnGraph {
    let n = g.n();
    let mut core = UnGraph::empty(n);
    for i in 0..n {
        for j in g.out_neighbors(i).filter(|&j| j > i) {
            if g.has_edge(j, i) {
                core.add_edge(i, j);
            }
        }
    }
    core
}

/// Index-coding dependency graph over requesting vertices.
///
/// Vertex `i` wants `requests[i]` and holds `side_info[i]`; the edge `i -> j`
/// exists iff `requests[i]` is in `side_info[j]`. Requests must be pairwise
/// distinct (merge duplicate requesters before building).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    graph: Digraph,
    requests: Vec<Rank>,
    side_info: Vec<BTreeSet<Rank>>,
}

impl DependencyGraph {
    pub fn new(requests: Vec<Rank>, side_info: Vec<BTreeSet<Rank>>) -> Result<Self> {
        assert_eq!(
            requests.len(),
            side_info.len(),
            "one side-info set per request"
        );
        let mut seen = BTreeSet::new();
        if let Some(&dup) = requests.iter().find(|&&r| !seen.insert(r)) {
            return Err(Error::DuplicateRequest { rank: dup });
        }
        let n = requests.len();
        let mut graph = Digraph::empty(n);
        for (i, r) in requests.iter().enumerate() {
            for (j, side) in side_info.iter().enumerate() {
                if i != j && side.contains(r) {
                    graph.add_edge(i, j);
                }
            }
        }
        Ok(Self {
            graph,
            requests,
            side_info,
        })
    }

    /// Synthetic instance realising an arbitrary digraph: vertex `i` requests
    /// content `i + 1` and caches exactly the requests of its in-neighbours.
    pub fn from_digraph(g: &Digraph) -> Self {
        let n = g.n();
        let requests: Vec<Rank> = (1..=n as Rank).collect();
        let mut side_info = vec![BTreeSet::new(); n];
        for (i, j) in g.edges() {
            side_info[j].insert(requests[i]);
        }
        Self {
            graph: g.clone(),
            requests,
            side_info,
        }
    }

    pub fn n(&self) -> usize {
        self.requests.len()
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn request(&self, v: usize) -> Rank {
        self.requests[v]
    }

    pub fn requests(&self) -> &[Rank] {
        &self.requests
    }

    pub fn side_info(&self, v: usize) -> &BTreeSet<Rank> {
        &self.side_info[v]
    }
}

/// Dependency graph over terminals with an active request, side information
/// taken from their caches.
pub fn build_dependency_graph(
    requests: &[Rank],
    caches: &[&CacheState],
) -> Result<DependencyGraph> {
    let side = caches
        .iter()
        .map(|c| c.slots().iter().copied().collect())
        .collect();
    DependencyGraph::new(requests.to_vec(), side)
}

/// Conflict graph: `i` and `j` conflict unless each caches the other's request.
pub fn conflict_graph(dep: &DependencyGraph) -> UnGraph {
    bidirected_core(dep.graph()).complement()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cache::CachePolicy;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(r: &[Rank]) -> BTreeSet<Rank> {
        r.iter().copied().collect()
    }

    fn fig2_dep() -> DependencyGraph {
        DependencyGraph::new(
            vec![3, 1, 4],
            vec![set(&[1, 4]), set(&[3, 4]), set(&[1, 3])],
        )
        .unwrap()
    }

    #[test]
    fn fig2_graph_is_complete() {
        let dep = fig2_dep();
        assert_eq!(dep.graph(), &Digraph::complete(3));
        assert_eq!(conflict_graph(&dep).edge_count(), 0);
    }

    #[test]
    fn empty_caches_give_no_edges() {
        let caches: Vec<CacheState> = (0..4)
            .map(|_| CacheState::new(CachePolicy::Lru, 3).unwrap())
            .collect();
        let refs: Vec<&CacheState> = caches.iter().collect();
        let dep = build_dependency_graph(&[1, 2, 3, 4], &refs).unwrap();
        assert_eq!(dep.graph().edge_count(), 0);
        assert_eq!(conflict_graph(&dep), UnGraph::complete(4));
    }

    #[test]
    fn swapped_side_info_is_two_cycle() {
        let mut a = CacheState::new(CachePolicy::Lru, 2).unwrap();
        let mut b = CacheState::new(CachePolicy::Lru, 2).unwrap();
        a.update(2);
        b.update(1);
        let dep = build_dependency_graph(&[1, 2], &[&a, &b]).unwrap();
        assert!(dep.graph().is_mutual(0, 1));
        assert_eq!(dep.graph().edge_count(), 2);
    }

    #[test]
    fn one_way_edge_still_conflicts() {
        let g = Digraph::from_edges(3, [(0, 1)]);
        let dep = DependencyGraph::from_digraph(&g);
        assert_eq!(conflict_graph(&dep), UnGraph::complete(3));
    }

    #[test]
    fn duplicate_requests_rejected() {
        let err = DependencyGraph::new(vec![2, 2], vec![set(&[]), set(&[])]).unwrap_err();
        assert_eq!(err, Error::DuplicateRequest { rank: 2 });
    }

    #[test]
    fn random_digraph_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(random_directed_graph(7, 0.0, &mut rng).edge_count(), 0);
        let full = random_directed_graph(7, 1.0, &mut rng);
        assert_eq!(full.edge_count(), 42);
        assert_eq!(bidirected_core(&full), UnGraph::complete(7));
        assert_eq!(
            bidirected_core(&Digraph::from_edges(2, [(0, 1)])).edge_count(),
            0
        );
    }

    #[test]
    fn random_digraph_edge_mean() {
        let expect = 200.0 * 199.0 * 0.3;
        let total: usize = (0..100)
            .map(|seed| {
                random_directed_graph(200, 0.3, &mut ChaCha8Rng::seed_from_u64(seed)).edge_count()
            })
            .sum();
        let mean = total as f64 / 100.0;
        assert!((mean - expect).abs() / expect < 0.02);
    }

    #[test]
    fn core_density_is_p_squared() {
        let mean: f64 = (0..20)
            .map(|seed| {
                bidirected_core(&random_directed_graph(
                    300,
                    0.3,
                    &mut ChaCha8Rng::seed_from_u64(seed),
                ))
                .density()
            })
            .sum::<f64>()
            / 20.0;
        assert!((mean - 0.09).abs() / 0.09 < 0.05, "density {mean}");
    }

    #[test]
    fn edge_list_format() {
        let g = Digraph::from_edges(3, [(0, 1), (2, 0)]);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "# n=3 directed\n0 1\n2 0\n"
        );
        assert_eq!(read_edge_list(&buf[..]).unwrap(), EdgeList::Directed(g));
        let u = UnGraph::from_edges(3, [(2, 1)]);
        let mut buf = Vec::new();
        u.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# n=3 undirected\n1 2\n");
        assert!(read_edge_list(&b"# n=2 directed\n0 5\n"[..]).is_err());
    }

    proptest! {
        #[test]
        fn dependency_edges_follow_side_info(
            reqs in prop::collection::btree_set(1u32..30, 1..12),
            sides in prop::collection::vec(prop::collection::btree_set(1u32..30, 0..8), 12),
        ) {
            let reqs: Vec<Rank> = reqs.into_iter().collect();
            let side: Vec<BTreeSet<Rank>> = sides.into_iter().take(reqs.len()).collect();
            let dep = DependencyGraph::new(reqs.clone(), side.clone()).unwrap();
            let cg = conflict_graph(&dep);
            let core = bidirected_core(dep.graph());
            for (i, want) in reqs.iter().enumerate() {
                prop_assert!(!dep.graph().has_edge(i, i));
                for (j, held) in side.iter().enumerate() {
                    if i == j { continue; }
                    prop_assert_eq!(dep.graph().has_edge(i, j), held.contains(want));
                    prop_assert_eq!(cg.has_edge(i, j), !core.has_edge(i, j));
                }
            }
        }

        #[test]
        fn edge_list_roundtrip(n in 1usize..40, p in 0.0f64..1.0, seed in any::<u64>()) {
            let g = random_directed_graph(n, p, &mut ChaCha8Rng::seed_from_u64(seed));
            let mut buf = Vec::new();
            g.write_edge_list(&mut buf).unwrap();
            prop_assert_eq!(read_edge_list(&buf[..]).unwrap(), EdgeList::Directed(g));
        }
    }
}
