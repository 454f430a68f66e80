//! Text walk-through of the six-terminal worked example.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use mcast_core::sim::worked_example::{self, NAMES};
use mcast_core::Result;

fn node(topo_helpers: usize, idx: usize) -> String {
    if idx < topo_helpers {
        "H".to_string()
    } else {
        NAMES[idx - topo_helpers].to_string()
    }
}

fn contents<'a>(ranks: impl IntoIterator<Item = &'a u32>) -> String {
    let names: Vec<String> = ranks.into_iter().map(|r| format!("M{r}")).collect();
    names.join(", ")
}

fn xor<'a>(ranks: impl IntoIterator<Item = &'a u32>) -> String {
    let names: Vec<String> = ranks.into_iter().map(|r| format!("M{r}")).collect();
    names.join(" ^ ")
}

/// Runs the example and returns the report. Fails only if a decode check
/// fails.
pub fn demo() -> Result<String> {
    let topo = worked_example::topology();
    let ex = worked_example::run()?;
    let k = topo.n_helpers();
    let mut out = String::new();

    let _ = writeln!(out, "Worked example: helper H serving six terminals");
    let _ = writeln!(out, "\nLinks (range {} m):", topo.tx_range());
    for i in 0..k + topo.n_terminals() {
        let nbrs: Vec<String> = topo
            .neighbors(i)
            .iter()
            .filter(|&&j| j > i)
            .map(|&j| node(k, j))
            .collect();
        if !nbrs.is_empty() {
            let _ = writeln!(out, "  {} -- {}", node(k, i), nbrs.join(", "));
        }
    }

    let dep = &ex.dependency;
    let requests = worked_example::requests();
    let _ = writeln!(out, "\nRequests:");
    for (v, r) in requests.iter().enumerate() {
        let _ = writeln!(
            out,
            "  {} wants M{} and caches {{{}}}",
            NAMES[r.terminal],
            r.rank,
            contents(dep.side_info(v))
        );
    }
    let _ = writeln!(
        out,
        "\nDependency graph (i -> j when j caches what i wants):"
    );
    for (i, j) in dep.graph().edges() {
        let _ = writeln!(
            out,
            "  {} -> {}",
            NAMES[requests[i].terminal], NAMES[requests[j].terminal]
        );
    }

    for d in &ex.coded.deliveries {
        let members: Vec<&str> = d.requests.iter().map(|r| NAMES[r.terminal]).collect();
        let _ = writeln!(out, "\nIndex code: {} {{{}}}", d.kind, members.join(", "));
        for cw in &d.codewords {
            let _ = writeln!(out, "  codeword {{{}}} = {}", contents(cw), xor(cw));
        }
        if let Some(tree) = &d.tree {
            let _ = writeln!(out, "Multicast tree:");
            for (&child, &parent) in &tree.parent {
                let _ = writeln!(out, "  {} -> {}", node(k, parent), node(k, child));
            }
            let tx: Vec<String> = tree.transmitters.iter().map(|&t| node(k, t)).collect();
            let _ = writeln!(out, "  broadcasters: {}", tx.join(", "));
        }
        let _ = writeln!(out, "Decoding:");
        for t in &d.traces {
            let received = d
                .codewords
                .iter()
                .find(|cw| cw.contains(&t.want))
                .expect("a codeword carries the request");
            let used: BTreeSet<u32> = received.iter().copied().filter(|&r| r != t.want).collect();
            let _ = writeln!(
                out,
                "  {} recovers M{}: ({}) ^ {} = M{}  [payload verified]",
                NAMES[t.terminal],
                t.want,
                xor(received),
                xor(&used),
                t.want
            );
        }
    }

    let _ = writeln!(out, "\ncoded: {} transmissions", ex.coded.transmissions);
    let legs: Vec<String> = ex
        .uncoded
        .deliveries
        .iter()
        .map(|d| {
            let r = d.requests[0];
            format!(
                "M{} to {} over {} hop(s)",
                r.rank, NAMES[r.terminal], d.transmissions
            )
        })
        .collect();
    let _ = writeln!(
        out,
        "uncoded: {} transmissions ({})",
        ex.uncoded.transmissions,
        legs.join(", ")
    );
    Ok(out)
}
