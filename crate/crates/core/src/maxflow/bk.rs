//! Boykov-Kolmogorov augmenting-path max-flow.
//!
//! Two search trees grow from the source and the sink and are kept between
//! augmentations; saturated tree edges turn nodes into orphans that are
//! re-attached (adoption) or released. Active and orphan queues are FIFO, and
//! adjacency follows input arc order, so results are reproducible.

use std::collections::VecDeque;

use super::{FlowNetwork, MaxFlow};

const NONE: u32 = u32::MAX;
const ROOT: u32 = u32::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tree {
    Free,
    Source,
    Sink,
}

/// Paired residual edges in compressed adjacency form.
struct Residual {
    first: Vec<usize>,
    head: Vec<u32>,
    cap: Vec<i64>,
    sister: Vec<u32>,
    /// Forward edge of each input arc, `NONE` for dropped self loops.
    arc_edge: Vec<u32>,
}

impl Residual {
    fn build(net: &FlowNetwork) -> Self {
        let n = net.node_count;
        let mut degree = vec![0usize; n + 1];
        for a in &net.arcs {
            if a.from != a.to {
                degree[a.from] += 1;
                degree[a.to] += 1;
            }
        }
        let mut first = vec![0usize; n + 1];
        for v in 0..n {
            first[v + 1] = first[v] + degree[v];
        }
        let m = first[n];
        assert!(m < NONE as usize - 1, "too many arcs for 32-bit edge ids");
        let mut cursor = first.clone();
        let mut head = vec![0u32; m];
        let mut cap = vec![0i64; m];
        let mut sister = vec![0u32; m];
        let mut arc_edge = Vec::with_capacity(net.arcs.len());
        for a in &net.arcs {
            if a.from == a.to {
                arc_edge.push(NONE);
                continue;
            }
            let fwd = cursor[a.from];
            cursor[a.from] += 1;
            let rev = cursor[a.to];
            cursor[a.to] += 1;
            head[fwd] = a.to as u32;
            cap[fwd] = a.capacity;
            head[rev] = a.from as u32;
            sister[fwd] = rev as u32;
            sister[rev] = fwd as u32;
            arc_edge.push(fwd as u32);
        }
        Residual { first, head, cap, sister, arc_edge }
    }

    #[inline]
    fn edges(&self, v: usize) -> std::ops::Range<usize> {
        self.first[v]..self.first[v + 1]
    }
}

struct Solver {
    g: Residual,
    tree: Vec<Tree>,
    /// Edge from a node towards its tree parent (stored in the node's own
    /// adjacency), `ROOT` for the terminals, `NONE` for free nodes and orphans.
    parent: Vec<u32>,
    timestamp: Vec<u64>,
    dist: Vec<u32>,
    time: u64,
    active: VecDeque<u32>,
    queued: Vec<bool>,
    orphans: VecDeque<u32>,
}

/// Computes a maximum s-t flow with the Boykov-Kolmogorov algorithm.
pub fn max_flow_bk(net: &FlowNetwork) -> MaxFlow {
    let n = net.node_count;
    let mut solver = Solver {
        g: Residual::build(net),
        tree: vec![Tree::Free; n],
        parent: vec![NONE; n],
        timestamp: vec![0; n],
        dist: vec![0; n],
        time: 0,
        active: VecDeque::new(),
        queued: vec![false; n],
        orphans: VecDeque::new(),
    };
    solver.tree[net.source] = Tree::Source;
    solver.parent[net.source] = ROOT;
    solver.tree[net.sink] = Tree::Sink;
    solver.parent[net.sink] = ROOT;
    solver.activate(net.source);
    solver.activate(net.sink);
    solver.run();
    solver.finish(net)
}

impl Solver {
    fn activate(&mut self, v: usize) {
        if !self.queued[v] {
            self.queued[v] = true;
            self.active.push_back(v as u32);
        }
    }

    fn next_active(&mut self) -> Option<usize> {
        while let Some(v) = self.active.pop_front() {
            let v = v as usize;
            self.queued[v] = false;
            if self.tree[v] != Tree::Free {
                return Some(v);
            }
        }
        None
    }

    fn run(&mut self) {
        let mut current: Option<usize> = None;
        loop {
            let p = match current.filter(|&p| self.tree[p] != Tree::Free) {
                Some(p) => p,
                None => match self.next_active() {
                    Some(p) => p,
                    None => break,
                },
            };
            match self.grow(p) {
                Some((s_end, t_end, mid)) => {
                    current = Some(p);
                    self.time += 1;
                    self.augment(s_end, t_end, mid);
                    self.adopt_orphans();
                }
                None => current = None,
            }
        }
    }

    /// Expands the tree of `p` by one layer. Returns the first path found as
    /// `(source-tree end, sink-tree end, connecting edge)`.
    fn grow(&mut self, p: usize) -> Option<(usize, usize, usize)> {
        let side = self.tree[p];
        for e in self.g.edges(p) {
            let q = self.g.head[e] as usize;
            let sister = self.g.sister[e] as usize;
            match side {
                Tree::Source => {
                    if self.g.cap[e] == 0 {
                        continue;
                    }
                    match self.tree[q] {
                        Tree::Free => self.attach(q, sister, p, Tree::Source),
                        Tree::Sink => return Some((p, q, e)),
                        Tree::Source => {}
                    }
                }
                Tree::Sink => {
                    if self.g.cap[sister] == 0 {
                        continue;
                    }
                    match self.tree[q] {
                        Tree::Free => self.attach(q, sister, p, Tree::Sink),
                        Tree::Source => return Some((q, p, sister)),
                        Tree::Sink => {}
                    }
                }
                Tree::Free => unreachable!("free nodes are never grown"),
            }
        }
        None
    }

    fn attach(&mut self, q: usize, parent_edge: usize, p: usize, side: Tree) {
        self.tree[q] = side;
        self.parent[q] = parent_edge as u32;
        self.timestamp[q] = self.timestamp[p];
        self.dist[q] = self.dist[p] + 1;
        self.activate(q);
    }

    fn augment(&mut self, s_end: usize, t_end: usize, mid: usize) {
        let g = &self.g;
        let mut flow = g.cap[mid];
        let mut v = s_end;
        while self.parent[v] != ROOT {
            let e = self.parent[v] as usize;
            flow = flow.min(g.cap[g.sister[e] as usize]);
            v = g.head[e] as usize;
        }
        let mut v = t_end;
        while self.parent[v] != ROOT {
            let e = self.parent[v] as usize;
            flow = flow.min(g.cap[e]);
            v = g.head[e] as usize;
        }
        debug_assert!(flow > 0);

        let g = &mut self.g;
        g.cap[mid] -= flow;
        g.cap[g.sister[mid] as usize] += flow;

        let mut v = s_end;
        while self.parent[v] != ROOT {
            let e = self.parent[v] as usize;
            let down = g.sister[e] as usize;
            g.cap[down] -= flow;
            g.cap[e] += flow;
            let up = g.head[e] as usize;
            if g.cap[down] == 0 {
                self.parent[v] = NONE;
                self.orphans.push_back(v as u32);
            }
            v = up;
        }
        let mut v = t_end;
        while self.parent[v] != ROOT {
            let e = self.parent[v] as usize;
            g.cap[e] -= flow;
            g.cap[g.sister[e] as usize] += flow;
            let up = g.head[e] as usize;
            if g.cap[e] == 0 {
                self.parent[v] = NONE;
                self.orphans.push_back(v as u32);
            }
            v = up;
        }
    }

    /// Distance from `start` to its tree root, or `None` if the chain hits an
    /// orphan. Marks the traversed nodes with the current timestamp.
    fn origin_distance(&mut self, start: usize) -> Option<u32> {
        let mut j = start;
        let mut d = 0u32;
        loop {
            if self.timestamp[j] == self.time {
                d += self.dist[j];
                break;
            }
            match self.parent[j] {
                ROOT => {
                    self.timestamp[j] = self.time;
                    self.dist[j] = 0;
                    break;
                }
                NONE => return None,
                e => {
                    d += 1;
                    j = self.g.head[e as usize] as usize;
                }
            }
        }
        let mut j = start;
        let mut dd = d;
        while self.timestamp[j] != self.time {
            self.timestamp[j] = self.time;
            self.dist[j] = dd;
            dd -= 1;
            j = self.g.head[self.parent[j] as usize] as usize;
        }
        Some(d)
    }

    fn adopt_orphans(&mut self) {
        while let Some(p) = self.orphans.pop_front() {
            self.adopt(p as usize);
        }
    }

    fn adopt(&mut self, p: usize) {
        let side = self.tree[p];
        let mut best: Option<(usize, u32)> = None;
        for e in self.g.edges(p) {
            let q = self.g.head[e] as usize;
            if self.tree[q] != side {
                continue;
            }
            // residual capacity from the candidate parent towards p
            let residual = match side {
                Tree::Source => self.g.cap[self.g.sister[e] as usize],
                _ => self.g.cap[e],
            };
            if residual == 0 {
                continue;
            }
            if let Some(d) = self.origin_distance(q) {
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((e, d));
                }
            }
        }

        if let Some((e, d)) = best {
            self.parent[p] = e as u32;
            self.timestamp[p] = self.time;
            self.dist[p] = d + 1;
            return;
        }

        for e in self.g.edges(p) {
            let q = self.g.head[e] as usize;
            if self.tree[q] != side {
                continue;
            }
            let residual = match side {
                Tree::Source => self.g.cap[self.g.sister[e] as usize],
                _ => self.g.cap[e],
            };
            if residual > 0 {
                self.activate(q);
            }
            let pq = self.parent[q];
            if pq != NONE && pq != ROOT && self.g.head[pq as usize] as usize == p {
                self.parent[q] = NONE;
                self.orphans.push_back(q as u32);
            }
        }
        self.tree[p] = Tree::Free;
    }

    fn finish(self, net: &FlowNetwork) -> MaxFlow {
        let g = &self.g;
        let arc_flows: Vec<i64> = net
            .arcs
            .iter()
            .zip(&g.arc_edge)
            .map(|(a, &e)| if e == NONE { 0 } else { a.capacity - g.cap[e as usize] })
            .collect();
        let value = net
            .arcs
            .iter()
            .zip(&arc_flows)
            .map(|(a, &f)| {
                if a.from == net.source {
                    f
                } else if a.to == net.source {
                    -f
                } else {
                    0
                }
            })
            .sum();

        let mut source_side = vec![false; net.node_count];
        let mut queue = VecDeque::from([net.source]);
        source_side[net.source] = true;
        while let Some(v) = queue.pop_front() {
            for e in g.edges(v) {
                let q = g.head[e] as usize;
                if g.cap[e] > 0 && !source_side[q] {
                    source_side[q] = true;
                    queue.push_back(q);
                }
            }
        }
        MaxFlow { value, source_side, arc_flows }
    }
}
