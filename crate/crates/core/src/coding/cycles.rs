use crate::graphs::Digraph;

/// Greedy vertex-disjoint directed cycles.
///
/// Lengths are tried in increasing order `2..=max_len`. Within a length,
/// candidate cycles are enumerated with their smallest vertex first and
/// the remaining vertices in ascending order; a cycle is kept iff it avoids
/// every vertex already used or `excluded`. Each cycle is returned as
/// `[v1, .., vk]` with edges `v1 -> v2 -> .. -> vk -> v1`.
pub fn disjoint_cycles(g: &Digraph, max_len: usize, excluded: &[usize]) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut used = vec![false; n];
    for &v in excluded {
        used[v] = true;
    }
    let mut found = Vec::new();
    let mut path = Vec::with_capacity(max_len);
    for len in 2..=max_len.max(2) {
        for start in 0..n {
            if used[start] {
                continue;
            }
            path.clear();
            path.push(start);
            if extend(g, &used, &mut path, len) {
                for &v in &path {
                    used[v] = true;
                }
                found.push(path.clone());
            }
        }
    }
    found
}

// Depth-first search for a simple cycle of exactly `len` vertices through
// `path[0]`, using only unused vertices larger than `path[0]`.
fn extend(g: &Digraph, used: &[bool], path: &mut Vec<usize>, len: usize) -> bool {
    let start = path[0];
    let last = *path.last().expect("path starts non-empty");
    if path.len() == len {
        return g.has_edge(last, start);
    }
    for next in g.out_neighbors(last) {
        if next <= start || used[next] || path.contains(&next) {
            continue;
        }
        path.push(next);
        if extend(g, used, path, len) {
            return true;
        }
        path.pop();
    }
    false
}
