//! Six terminals around one helper: three of them want `M3`, `M1` and `M4`
//! and each caches the other two requests, so a single XOR serves all three.
//!
//! ```text
//!   N1          N5
//!     \        /
//!      H - N2 - N4
//!     /        \
//!   N3          N6
//! ```
//!
//! Unit-spaced links: `H` reaches `N1`, `N2`, `N3`; `N2` relays to `N4`,
//! which relays to `N5` and `N6`.

use super::{run_delivery_round, Request, RoundResult, SimConfig};
use crate::cache::{CachePolicy, CacheState};
use crate::coding::{Payloads, Strategy};
use crate::error::Result;
use crate::graphs::{build_dependency_graph, DependencyGraph};
use crate::topology::{Point, Topology};

pub const NAMES: [&str; 6] = ["N1", "N2", "N3", "N4", "N5", "N6"];

pub fn config() -> SimConfig {
    SimConfig {
        n: 6,
        m: 6,
        delta: 2,
        policy: CachePolicy::Lru,
        k_helpers: 1,
        cell_radius_m: 3.0,
        tx_range_m: 1.01,
        max_hops: None,
        helper_top_k: 6,
        strategy: Strategy::Coloring,
        payload_len: Payloads::DEFAULT_LEN,
        ..SimConfig::default()
    }
}

pub fn topology() -> Topology {
    let h = 3f64.sqrt() / 2.0;
    let terminals = vec![
        Point::new(-0.5, h),
        Point::new(1.0, 0.0),
        Point::new(-0.5, -h),
        Point::new(2.0, 0.0),
        Point::new(2.5, h),
        Point::new(2.5, -h),
    ];
    Topology::from_positions(3.0, 1.01, vec![Point::new(0.0, 0.0)], terminals)
        .expect("fixed layout is valid")
}

/// `N1`, `N2` and `N5` ask for `M3`, `M1` and `M4`.
pub fn requests() -> Vec<Request> {
    vec![Request::new(0, 3), Request::new(1, 1), Request::new(4, 4)]
}

/// `N1` holds `{M1, M4}`, `N2` holds `{M3, M4}`, `N5` holds `{M1, M3}`;
/// the idle terminals hold nothing.
pub fn caches() -> Vec<CacheState> {
    let held: [&[u32]; 6] = [&[1, 4], &[3, 4], &[], &[], &[1, 3], &[]];
    held.iter()
        .map(|ranks| {
            let mut c = CacheState::new(CachePolicy::Lru, 2).expect("positive capacity");
            for &r in *ranks {
                c.update(r);
            }
            c
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct WorkedExample {
    pub dependency: DependencyGraph,
    pub coded: RoundResult,
    pub uncoded: RoundResult,
}

/// Serves the three requests once with index coding and once by plain
/// unicast, from identical starting caches.
pub fn run() -> Result<WorkedExample> {
    let topo = topology();
    let reqs = requests();
    let start = caches();
    let requesting: Vec<&CacheState> = reqs.iter().map(|r| &start[r.terminal]).collect();
    let ranks: Vec<u32> = reqs.iter().map(|r| r.rank).collect();
    let dependency = build_dependency_graph(&ranks, &requesting)?;

    let cfg = config();
    let payloads = Payloads::new(cfg.payload_len, cfg.seed);
    let coded = run_delivery_round(&cfg, &topo, &mut start.clone(), &reqs, Some(&payloads))?;
    let plain = SimConfig {
        coded: false,
        ..cfg
    };
    let uncoded = run_delivery_round(&plain, &topo, &mut start.clone(), &reqs, Some(&payloads))?;
    Ok(WorkedExample {
        dependency,
        coded,
        uncoded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::GroupKind;

    #[test]
    fn three_versus_five() {
        let ex = run().unwrap();
        assert_eq!(ex.dependency.graph().edge_count(), 6);
        assert_eq!(ex.coded.transmissions, 3);
        assert_eq!(ex.coded.satisfied, 3);
        assert_eq!(ex.uncoded.transmissions, 5);
        assert_eq!(ex.coded.baseline_transmissions, 5);

        let d = &ex.coded.deliveries[0];
        assert_eq!(d.kind, GroupKind::Clique);
        assert_eq!(d.codewords, vec![[1, 3, 4].into_iter().collect()]);
        let tree = d.tree.as_ref().unwrap();
        // H, N2 and N4 broadcast
        assert_eq!(tree.transmitters, [0, 2, 4].into_iter().collect());
        let recovered: Vec<(usize, u32, usize)> = d
            .traces
            .iter()
            .map(|t| (t.terminal, t.want, t.steps.len()))
            .collect();
        assert_eq!(recovered, vec![(0, 3, 1), (1, 1, 1), (4, 4, 1)]);
    }
}
