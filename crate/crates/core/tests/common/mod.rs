//! Test oracles shared by the integration suites.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use raycut::graph::{CostGrid, SegGraph};
use raycut::maxflow::{CutResult, FlowNetwork};
use raycut::template::SphereTemplate;

/// Exhaustive search over all smoothness-feasible boundary assignments.
/// Returns the minimum total cost and every assignment attaining it.
pub fn enumerate_optimum(
    costs: &CostGrid,
    tmpl: &SphereTemplate,
    delta_r: usize,
) -> (f64, Vec<Vec<usize>>) {
    let rays = costs.rays();
    let samples = costs.samples();
    let mut best = (f64::INFINITY, Vec::new());
    let mut current = vec![0usize; rays];
    fn walk(
        r: usize,
        current: &mut Vec<usize>,
        costs: &CostGrid,
        tmpl: &SphereTemplate,
        delta_r: usize,
        samples: usize,
        best: &mut (f64, Vec<Vec<usize>>),
    ) {
        if r == current.len() {
            let cost = costs.surface_cost(current);
            if cost < best.0 {
                *best = (cost, vec![current.clone()]);
            } else if cost == best.0 {
                best.1.push(current.clone());
            }
            return;
        }
        for b in 0..samples {
            let feasible = tmpl.neighbors()[r]
                .iter()
                .filter(|&&n| n < r)
                .all(|&n| current[n].abs_diff(b) <= delta_r);
            if feasible {
                current[r] = b;
                walk(r + 1, current, costs, tmpl, delta_r, samples, best);
            }
        }
    }
    walk(0, &mut current, costs, tmpl, delta_r, samples, &mut best);
    best
}

/// Integer-valued random costs (exactly representable after scaling).
pub fn random_integer_costs(rng: &mut ChaCha8Rng, rays: usize, samples: usize) -> CostGrid {
    let values = (0..rays * samples).map(|_| rng.random_range(0..1000) as f64).collect();
    CostGrid::new(0.0, rays, samples, values).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Counts violations of the cut invariants: prefix per ray, neighbour
/// smoothness, and infinite arcs leaving the source side.
pub fn feasibility_violations(graph: &SegGraph, tmpl: &SphereTemplate, cut: &CutResult) -> usize {
    let mut violations = 0;
    let z = graph.samples;
    for r in 0..graph.rays {
        let b = cut.boundary[r];
        for k in 0..z {
            if cut.source_side[graph.node(r, k)] != (k <= b) {
                violations += 1;
            }
        }
        for &n in &tmpl.neighbors()[r] {
            if cut.boundary[n].abs_diff(b) > graph.delta_r {
                violations += 1;
            }
        }
    }
    for a in &graph.network.arcs {
        if a.capacity == graph.inf_cap && cut.source_side[a.from] && !cut.source_side[a.to] {
            violations += 1;
        }
    }
    violations
}

/// Random directed network with integer capacities in 0..=100.
pub fn random_network(rng: &mut ChaCha8Rng, max_nodes: usize) -> FlowNetwork {
    let n = rng.random_range(2..=max_nodes);
    let density = rng.random_range(1.0..6.0);
    let m = (n as f64 * density) as usize;
    let source = rng.random_range(0..n);
    let mut sink = rng.random_range(0..n);
    while sink == source {
        sink = rng.random_range(0..n);
    }
    let mut net = FlowNetwork::new(n, source, sink);
    for _ in 0..m {
        let from = rng.random_range(0..n);
        let to = rng.random_range(0..n);
        net.add_arc(from, to, rng.random_range(0..=100));
    }
    net
}
