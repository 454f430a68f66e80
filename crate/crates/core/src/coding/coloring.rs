use crate::error::{Error, Result};
use crate::graphs::{bidirected_core, DependencyGraph, UnGraph};

/// Proper vertex colouring; colours are `0..count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub count: usize,
}

impl Coloring {
    /// Vertices of each colour class, ascending, indexed by colour.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.count];
        for (v, &c) in self.colors.iter().enumerate() {
            classes[c].push(v);
        }
        classes
    }

    pub fn is_proper(&self, g: &UnGraph) -> bool {
        g.edges().all(|(i, j)| self.colors[i] != self.colors[j])
    }
}

/// Welsh–Powell greedy colouring: vertices by descending degree (ties to
/// the lower id), each taking the smallest colour unused by its neighbours.
pub fn greedy_coloring(g: &UnGraph) -> Coloring {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    let degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    order.sort_by(|&a, &b| degree[b].cmp(&degree[a]).then(a.cmp(&b)));

    const NONE: usize = usize::MAX;
    let mut colors = vec![NONE; n];
    let mut count = 0;
    let mut taken = Vec::new();
    for &v in &order {
        taken.clear();
        taken.resize(count + 1, false);
        for u in g.neighbors(v) {
            if colors[u] != NONE {
                taken[colors[u]] = true;
            }
        }
        let c = taken.iter().position(|&t| !t).unwrap_or(count);
        colors[v] = c;
        count = count.max(c + 1);
    }
    Coloring { colors, count }
}

/// Largest instance accepted by [`optimal_clique_cover`].
pub const ORACLE_MAX_VERTICES: usize = 10;

/// Minimum number of cliques of the bidirected core covering every vertex,
/// i.e. the chromatic number of the conflict graph. Exhaustive subset DP.
pub fn optimal_clique_cover(dep: &DependencyGraph) -> Result<usize> {
    let n = dep.n();
    if n > ORACLE_MAX_VERTICES {
        return Err(Error::OracleTooLarge {
            n,
            max: ORACLE_MAX_VERTICES,
        });
    }
    let core = bidirected_core(dep.graph());
    let full = (1usize << n) - 1;
    let mut nbr = vec![0usize; n];
    for (i, j) in core.edges() {
        nbr[i] |= 1 << j;
        nbr[j] |= 1 << i;
    }
    let mut is_clique = vec![false; full + 1];
    is_clique[0] = true;
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        is_clique[mask] = is_clique[rest] && rest & !nbr[low] == 0;
    }
    let mut best = vec![usize::MAX; full + 1];
    best[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        // every submask of `rest`, extended by the lowest vertex
        let mut sub = rest;
        loop {
            let part = sub | low;
            if is_clique[part] {
                best[mask] = best[mask].min(best[mask ^ part] + 1);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    Ok(best[full])
}
