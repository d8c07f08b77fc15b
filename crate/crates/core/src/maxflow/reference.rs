//! Shortest-augmenting-path (Edmonds-Karp) max-flow on a plain edge list.

use std::collections::VecDeque;

use super::FlowNetwork;

/// Maximum s-t flow value. Slow but simple; used as a test oracle.
pub fn reference_max_flow(net: &FlowNetwork) -> i64 {
    // edge 2k is arc k, edge 2k+1 its reverse
    let mut to = Vec::with_capacity(net.arcs.len() * 2);
    let mut residual = Vec::with_capacity(net.arcs.len() * 2);
    let mut adjacency = vec![Vec::new(); net.node_count];
    for a in &net.arcs {
        adjacency[a.from].push(to.len());
        to.push(a.to);
        residual.push(a.capacity);
        adjacency[a.to].push(to.len());
        to.push(a.from);
        residual.push(0);
    }

    let mut total = 0i64;
    let mut via = vec![usize::MAX; net.node_count];
    loop {
        via.fill(usize::MAX);
        let mut seen = vec![false; net.node_count];
        seen[net.source] = true;
        let mut queue = VecDeque::from([net.source]);
        while let Some(v) = queue.pop_front() {
            if v == net.sink {
                break;
            }
            for &e in &adjacency[v] {
                let w = to[e];
                if residual[e] > 0 && !seen[w] {
                    seen[w] = true;
                    via[w] = e;
                    queue.push_back(w);
                }
            }
        }
        if !seen[net.sink] {
            return total;
        }
        let mut bottleneck = i64::MAX;
        let mut v = net.sink;
        while v != net.source {
            let e = via[v];
            bottleneck = bottleneck.min(residual[e]);
            v = to[e ^ 1];
        }
        let mut v = net.sink;
        while v != net.source {
            let e = via[v];
            residual[e] -= bottleneck;
            residual[e ^ 1] += bottleneck;
            v = to[e ^ 1];
        }
        total += bottleneck;
    }
}
