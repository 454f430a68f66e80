//! Disk-cell geometry, unit-disk D2D connectivity and multihop routing.
//!
//! Node indices run over helpers first (`0..k`) and then terminals
//! (`k..k + n`). Helpers originate traffic but never relay; terminals relay
//! for each other. Shortest-path trees from every helper are computed once at
//! construction, with BFS visiting neighbours in ascending node order so that
//! trees are deterministic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::f64::consts::PI;
use std::io::{self, Write};

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::zipf::Rank;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist_sq(self, other: Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        dx * dx + dy * dy
    }
}

#[derive(Debug, Clone, PartialEq)]
struct HelperRoutes {
    // indexed by terminal id
    hops: Vec<Option<u32>>,
    // indexed by node index; parent in the BFS tree rooted at this helper
    parent: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    cell_radius: f64,
    tx_range: f64,
    helpers: Vec<Point>,
    terminals: Vec<Point>,
    adjacency: Vec<Vec<usize>>,
    routes: Vec<HelperRoutes>,
}

/// Deterministic helper layout for a cell of radius `cell_radius`.
///
/// One helper sits at the centre; two to six helpers are evenly spaced on the
/// ring of radius `cell_radius / 2`. Larger deployments use a sunflower
/// (Vogel spiral) layout, which keeps helper density uniform over the disk.
pub fn helper_layout(k: usize, cell_radius: f64) -> Vec<Point> {
    match k {
        0 => Vec::new(),
        1 => vec![Point::new(0.0, 0.0)],
        2..=6 => {
            let rho = cell_radius / 2.0;
            (0..k)
                .map(|i| {
                    let a = 2.0 * PI * i as f64 / k as f64;
                    Point::new(rho * a.cos(), rho * a.sin())
                })
                .collect()
        }
        _ => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..k)
                .map(|i| {
                    let r = cell_radius * ((i as f64 + 0.5) / k as f64).sqrt();
                    let a = i as f64 * golden;
                    Point::new(r * a.cos(), r * a.sin())
                })
                .collect()
        }
    }
}

/// Uniform point in the disk of radius `radius` (polar method, `r = R sqrt(u)`).
pub fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let a = 2.0 * PI * rng.random::<f64>();
    Point::new(r * a.cos(), r * a.sin())
}

impl Topology {
    /// Builds the unit-disk graph over explicit positions.
    pub fn from_positions(
        cell_radius: f64,
        tx_range: f64,
        helpers: Vec<Point>,
        terminals: Vec<Point>,
    ) -> Result<Self> {
        if !(cell_radius > 0.0) {
            return Err(invalid("cell_radius", "must be positive"));
        }
        if !(tx_range > 0.0) {
            return Err(invalid("tx_range", "must be positive"));
        }
        let limit = cell_radius * cell_radius * (1.0 + 1e-12);
        if let Some(p) = helpers
            .iter()
            .chain(&terminals)
            .find(|p| p.norm_sq() > limit)
        {
            return Err(invalid(
                "positions",
                format!("({}, {}) lies outside the cell", p.x, p.y),
            ));
        }
        let nodes: Vec<Point> = helpers.iter().chain(&terminals).copied().collect();
        let k = helpers.len();
        let range_sq = tx_range * tx_range;
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                // helper-helper links carry no traffic
                if j < k {
                    continue;
                }
                if nodes[i].dist_sq(nodes[j]) <= range_sq {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
        let mut topo = Self {
            cell_radius,
            tx_range,
            helpers,
            terminals,
            adjacency,
            routes: Vec::new(),
        };
        topo.routes = (0..k).map(|h| topo.bfs_from_helper(h)).collect();
        Ok(topo)
    }

    /// `n` terminals uniform in the disk, `k` helpers from [`helper_layout`].
    pub fn generate_cell<R: Rng + ?Sized>(
        n: usize,
        k: usize,
        cell_radius: f64,
        tx_range: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let terminals = (0..n).map(|_| uniform_in_disk(cell_radius, rng)).collect();
        Self::from_positions(
            cell_radius,
            tx_range,
            helper_layout(k, cell_radius),
            terminals,
        )
    }

    pub fn cell_radius(&self) -> f64 {
        self.cell_radius
    }

    pub fn tx_range(&self) -> f64 {
        self.tx_range
    }

    pub fn n_helpers(&self) -> usize {
        self.helpers.len()
    }

    pub fn n_terminals(&self) -> usize {
        self.terminals.len()
    }

    pub fn helpers(&self) -> &[Point] {
        &self.helpers
    }

    pub fn terminals(&self) -> &[Point] {
        &self.terminals
    }

    pub fn helper_node(&self, helper: usize) -> usize {
        helper
    }

    pub fn terminal_node(&self, terminal: usize) -> usize {
        self.helpers.len() + terminal
    }

    /// Terminal id of a node index, `None` for helpers.
    pub fn node_terminal(&self, node: usize) -> Option<usize> {
        node.checked_sub(self.helpers.len())
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Hop count from `helper` to `terminal` along terminal relays.
    pub fn hops(&self, helper: usize, terminal: usize) -> Option<u32> {
        self.routes[helper].hops[terminal]
    }

    fn bfs_from_helper(&self, helper: usize) -> HelperRoutes {
        let k = self.helpers.len();
        let mut hops = vec![None; self.terminals.len()];
        let mut parent = vec![None; self.adjacency.len()];
        let mut queue = VecDeque::new();
        for &v in &self.adjacency[helper] {
            if v >= k {
                hops[v - k] = Some(1);
                parent[v] = Some(helper);
                queue.push_back(v);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = hops[u - k].expect("queued nodes are labelled");
            for &v in &self.adjacency[u] {
                if v >= k && hops[v - k].is_none() {
                    hops[v - k] = Some(du + 1);
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        HelperRoutes { hops, parent }
    }

    /// Per-terminal hop count to the nearest of `sources` (joint BFS);
    /// `None` when no source reaches the terminal.
    pub fn hop_distances(&self, sources: &[usize]) -> Vec<Option<u32>> {
        let k = self.helpers.len();
        let mut hops = vec![None; self.terminals.len()];
        let mut queue = VecDeque::new();
        for &h in sources {
            for &v in &self.adjacency[h] {
                if v >= k && hops[v - k].is_none() {
                    hops[v - k] = Some(1);
                    queue.push_back(v);
                }
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = hops[u - k].expect("queued nodes are labelled");
            for &v in &self.adjacency[u] {
                if v >= k && hops[v - k].is_none() {
                    hops[v - k] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        hops
    }

    /// Fraction of terminals within `max_hops` of some helper.
    pub fn coverage_fraction(&self, max_hops: u32) -> f64 {
        if self.terminals.is_empty() {
            return 0.0;
        }
        let all: Vec<usize> = (0..self.helpers.len()).collect();
        let covered = self
            .hop_distances(&all)
            .iter()
            .filter(|h| h.is_some_and(|h| h <= max_hops))
            .count();
        covered as f64 / self.terminals.len() as f64
    }

    /// Union of the BFS shortest paths from `helper` to every target terminal.
    pub fn multicast_tree(&self, helper: usize, targets: &[usize]) -> Result<MulticastTree> {
        let routes = &self.routes[helper];
        let mut parent = BTreeMap::new();
        for &t in targets {
            let mut node = self.terminal_node(t);
            if routes.parent[node].is_none() {
                return Err(Error::Unreachable {
                    helper,
                    terminal: t,
                });
            }
            while let Some(p) = routes.parent[node] {
                if parent.insert(node, p).is_some() {
                    break;
                }
                node = p;
            }
        }
        let transmitters = parent.values().copied().collect();
        Ok(MulticastTree {
            root: helper,
            parent,
            transmitters,
        })
    }

    /// Transmissions for uncoded unicast: each request costs its hop count.
    pub fn baseline_unicast_cost(&self, helper: usize, requests: &[(usize, Rank)]) -> Result<u64> {
        requests.iter().try_fold(0u64, |acc, &(t, _)| {
            self.hops(helper, t)
                .map(|h| acc + h as u64)
                .ok_or(Error::Unreachable {
                    helper,
                    terminal: t,
                })
        })
    }

    /// Closest helper (by hops, ties to the lower id) that stores the requested
    /// content and reaches the terminal within `max_hops`; `None` is a miss.
    pub fn assign_helpers(
        &self,
        requests: &[(usize, Rank)],
        stores: &[HelperStore],
        max_hops: Option<u32>,
    ) -> Vec<Option<usize>> {
        requests
            .iter()
            .map(|&(t, rank)| {
                (0..self.helpers.len())
                    .filter(|&h| stores.get(h).is_some_and(|s| s.contains(rank)))
                    .filter_map(|h| self.hops(h, t).map(|d| (d, h)))
                    .filter(|&(d, _)| max_hops.is_none_or(|m| d <= m))
                    .min()
                    .map(|(_, h)| h)
            })
            .collect()
    }

    /// Dumps nodes as `node_id,kind,x_m,y_m`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "node_id,kind,x_m,y_m")?;
        for (i, p) in self.helpers.iter().enumerate() {
            writeln!(out, "{i},helper,{:.6},{:.6}", p.x, p.y)?;
        }
        let k = self.helpers.len();
        for (i, p) in self.terminals.iter().enumerate() {
            writeln!(out, "{},ut,{:.6},{:.6}", k + i, p.x, p.y)?;
        }
        Ok(())
    }
}

/// Shortest-path multicast tree from one helper.
///
/// Every node that has at least one child broadcasts once, so the
/// transmission count is the number of distinct parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticastTree {
    pub root: usize,
    /// child node -> parent node
    pub parent: BTreeMap<usize, usize>,
    pub transmitters: BTreeSet<usize>,
}

impl MulticastTree {
    pub fn transmission_count(&self) -> usize {
        self.transmitters.len()
    }
}

/// Contents held by a helper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HelperStore {
    /// The `k` most popular contents (ranks `1..=k`).
    TopK(u32),
    Set(BTreeSet<Rank>),
}

impl HelperStore {
    pub fn contains(&self, rank: Rank) -> bool {
        match self {
            Self::TopK(k) => rank >= 1 && rank <= *k,
            Self::Set(s) => s.contains(&rank),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // H -> N1, N2, N3; N2 -> N4; N4 -> N5, N6 with unit range.
    fn fig2() -> Topology {
        let s3 = 3f64.sqrt() / 2.0;
        let uts = vec![
            Point::new(-0.5, s3),
            Point::new(1.0, 0.0),
            Point::new(-0.5, -s3),
            Point::new(2.0, 0.0),
            Point::new(2.5, s3),
            Point::new(2.5, -s3),
        ];
        Topology::from_positions(3.0, 1.01, vec![Point::new(0.0, 0.0)], uts).unwrap()
    }

    #[test]
    fn fig2_adjacency() {
        let t = fig2();
        assert_eq!(t.edge_count(), 6);
        assert_eq!(t.neighbors(0), &[1, 2, 3]);
        assert_eq!(t.neighbors(t.terminal_node(3)), &[2, 5, 6]);
    }

    #[test]
    fn hop_counts() {
        let t = fig2();
        let d = t.hop_distances(&[0]);
        assert_eq!(
            d,
            vec![Some(1), Some(1), Some(1), Some(2), Some(3), Some(3)]
        );
        let iso = Topology::from_positions(
            10.0,
            1.0,
            vec![Point::new(0.0, 0.0)],
            vec![Point::new(0.5, 0.0), Point::new(9.0, 0.0)],
        )
        .unwrap();
        assert_eq!(iso.hop_distances(&[0]), vec![Some(1), None]);
        assert_eq!(iso.coverage_fraction(0), 0.0);
        assert_eq!(iso.coverage_fraction(5), 0.5);
    }

    #[test]
    fn fig2_tree_needs_three_broadcasts() {
        let t = fig2();
        let tree = t.multicast_tree(0, &[0, 1, 4]).unwrap();
        let expect: BTreeSet<usize> = [0, t.terminal_node(1), t.terminal_node(3)].into();
        assert_eq!(tree.transmitters, expect);
        assert_eq!(tree.transmission_count(), 3);
        assert_eq!(
            t.multicast_tree(0, &[0, 1, 2])
                .unwrap()
                .transmission_count(),
            1
        );
        assert_eq!(t.multicast_tree(0, &[]).unwrap().transmission_count(), 0);
    }

    #[test]
    fn fig2_unicast_costs_five() {
        let t = fig2();
        assert_eq!(
            t.baseline_unicast_cost(0, &[(0, 3), (1, 1), (4, 4)])
                .unwrap(),
            5
        );
        assert_eq!(t.baseline_unicast_cost(0, &[(2, 9)]).unwrap(), 1);
        assert_eq!(t.baseline_unicast_cost(0, &[]).unwrap(), 0);
    }

    #[test]
    fn unreachable_target_is_named() {
        let t = Topology::from_positions(
            10.0,
            1.0,
            vec![Point::new(0.0, 0.0)],
            vec![Point::new(0.5, 0.0), Point::new(9.0, 0.0)],
        )
        .unwrap();
        assert_eq!(
            t.multicast_tree(0, &[0, 1]),
            Err(Error::Unreachable {
                helper: 0,
                terminal: 1
            })
        );
        assert!(t.baseline_unicast_cost(0, &[(1, 1)]).is_err());
    }

    #[test]
    fn assignment_rules() {
        let two = Topology::from_positions(
            5.0,
            1.0,
            vec![Point::new(-1.0, 0.0), Point::new(1.0, 0.0)],
            vec![Point::new(0.0, 0.0), Point::new(0.5, 0.0)],
        )
        .unwrap();
        let all = vec![HelperStore::TopK(10), HelperStore::TopK(10)];
        // terminal 0 is one hop from both helpers.
        assert_eq!(two.assign_helpers(&[(0, 3)], &all, None), vec![Some(0)]);
        assert_eq!(two.assign_helpers(&[(1, 3)], &all, None), vec![Some(1)]);
        assert_eq!(two.assign_helpers(&[(0, 11)], &all, None), vec![None]);
        let split = vec![HelperStore::Set([7].into()), HelperStore::TopK(3)];
        assert_eq!(two.assign_helpers(&[(1, 7)], &split, None), vec![Some(0)]);
        assert_eq!(two.assign_helpers(&[(1, 7)], &split, Some(1)), vec![None]);
    }

    #[test]
    fn single_helper_at_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = Topology::generate_cell(1, 1, 400.0, 100.0, &mut rng).unwrap();
        assert_eq!(t.helpers(), &[Point::new(0.0, 0.0)]);
        assert!(t.terminals()[0].norm_sq() <= 400.0 * 400.0);
    }

    #[test]
    fn generation_is_deterministic() {
        let make = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            Topology::generate_cell(1000, 4, 400.0, 100.0, &mut rng).unwrap()
        };
        assert_eq!(make(), make());
    }

    #[test]
    fn mean_radius_matches_uniform_disk() {
        let mut total = 0.0;
        let seeds = 50;
        for seed in 0..seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = Topology::generate_cell(1000, 4, 400.0, 100.0, &mut rng).unwrap();
            total += t
                .terminals()
                .iter()
                .map(|p| p.norm_sq().sqrt())
                .sum::<f64>()
                / 1000.0;
        }
        let mean = total / seeds as f64;
        assert!((mean - 800.0 / 3.0).abs() < 5.0, "mean radius {mean}");
    }

    #[test]
    fn ring_layout_radius() {
        for k in 2..=6 {
            for p in helper_layout(k, 400.0) {
                assert!((p.norm_sq().sqrt() - 200.0).abs() < 1e-9);
            }
        }
        assert_eq!(helper_layout(27, 400.0).len(), 27);
        assert!(helper_layout(27, 400.0)
            .iter()
            .all(|p| p.norm_sq() <= 160_000.0));
    }

    #[test]
    fn csv_dump() {
        let mut buf = Vec::new();
        fig2().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "node_id,kind,x_m,y_m");
        assert_eq!(lines[1], "0,helper,0.000000,0.000000");
        assert_eq!(lines[3], "2,ut,1.000000,0.000000");
        assert_eq!(lines.len(), 8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn routing_invariants(seed in 0u64..1000, n in 20usize..120, k in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = Topology::generate_cell(n, k, 300.0, 80.0, &mut rng).unwrap();
            // joint BFS equals min over per-helper BFS
            let all: Vec<usize> = (0..k).collect();
            let joint = t.hop_distances(&all);
            for (term, &d) in joint.iter().enumerate() {
                let best = (0..k).filter_map(|h| t.hops(h, term)).min();
                prop_assert_eq!(d, best);
            }
            let mut prev = 0.0;
            for hops in 0..8 {
                let c = t.coverage_fraction(hops);
                prop_assert!(c >= prev);
                prev = c;
            }
            let reach: Vec<usize> = (0..n).filter(|&x| t.hops(0, x).is_some()).collect();
            let targets: Vec<usize> = reach.iter().copied().step_by(3).collect();
            let tree = t.multicast_tree(0, &targets).unwrap();
            let reqs: Vec<(usize, Rank)> = targets.iter().map(|&x| (x, 1)).collect();
            prop_assert!(tree.transmission_count() as u64 <= t.baseline_unicast_cost(0, &reqs).unwrap());
            // each transmitter's hop count plus its subtree depth stays on a shortest path
            for (&child, &par) in &tree.parent {
                let hc = t.node_terminal(child).and_then(|c| t.hops(0, c)).unwrap();
                let hp = t.node_terminal(par).map_or(Some(0), |p| t.hops(0, p)).unwrap();
                prop_assert_eq!(hc, hp + 1);
            }
        }
    }
}
