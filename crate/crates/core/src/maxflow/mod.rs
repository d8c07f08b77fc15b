//! Minimum s-t cut on generic directed networks with integer capacities.
//!
//! [`max_flow_bk`] is the production solver (Boykov-Kolmogorov search-tree
//! reuse). [`reference_max_flow`] is an independent shortest-augmenting-path
//! solver kept for cross-checking.

mod bk;
mod dimacs;
mod reference;

pub use bk::max_flow_bk;
pub use dimacs::{parse_dimacs, write_dimacs};
pub use reference::reference_max_flow;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: i64,
}

/// A directed network with distinguished source and sink nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    pub node_count: usize,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub fn new(node_count: usize, source: usize, sink: usize) -> Self {
        assert!(source < node_count && sink < node_count && source != sink);
        FlowNetwork { node_count, source, sink, arcs: Vec::new() }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, capacity: i64) {
        debug_assert!(from < self.node_count && to < self.node_count);
        debug_assert!(capacity >= 0);
        self.arcs.push(Arc { from, to, capacity });
    }

    /// Total capacity of arcs leaving `side` (from a `true` node to a `false` node).
    pub fn cut_capacity(&self, side: &[bool]) -> i64 {
        self.arcs
            .iter()
            .filter(|a| side[a.from] && !side[a.to])
            .map(|a| a.capacity)
            .sum()
    }
}

/// Outcome of a max-flow solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxFlow {
    pub value: i64,
    /// Nodes reachable from the source in the final residual network.
    pub source_side: Vec<bool>,
    /// Flow on each input arc, in input order.
    pub arc_flows: Vec<i64>,
}

/// Per-ray boundary extracted from a seg-graph cut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutResult {
    pub flow_value: i64,
    #[serde(skip)]
    pub source_side: Vec<bool>,
    pub boundary: Vec<usize>,
}

/// Reads per-ray boundary indices out of a node partition laid out as
/// `id(r, z) = r * samples + z`. Each ray's source-side nodes must form a
/// nonempty prefix.
pub fn extract_boundary(source_side: &[bool], rays: usize, samples: usize) -> Result<Vec<usize>> {
    (0..rays)
        .map(|r| {
            let column = &source_side[r * samples..(r + 1) * samples];
            let len = column.iter().take_while(|&&s| s).count();
            if len == 0 || column[len..].iter().any(|&s| s) {
                Err(Error::MalformedCut { ray: r })
            } else {
                Ok(len - 1)
            }
        })
        .collect()
}
