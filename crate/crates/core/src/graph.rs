//! Construction of the s-t network whose minimum cut is the optimal
//! star-shaped surface around the seed.
//!
//! Node `id(r, z) = r * samples + z`; the source is `rays * samples` and the
//! sink `rays * samples + 1`. Arcs are emitted in a fixed order: intra-ray
//! arcs, inter-ray arcs, terminal arcs, then base forcing arcs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maxflow::{self, CutResult, FlowNetwork};
use crate::template::{RayGrid, SphereTemplate};
use crate::volume::Volume;

/// Fixed-point factor applied to real-valued capacities.
pub const CAPACITY_SCALE: f64 = (1u64 << 20) as f64;

/// Largest admissible `(1 + sum |w|) * scale`; leaves headroom for residual
/// capacities of infinite arcs in `i64`.
const CAPACITY_LIMIT: f64 = (1u64 << 61) as f64;

/// Per-node costs on the ray grid; the optimal surface minimises the sum of
/// the costs of its boundary nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CostGrid {
    mu: f64,
    rays: usize,
    samples: usize,
    values: Vec<f64>,
}

impl CostGrid {
    pub fn new(mu: f64, rays: usize, samples: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rays * samples {
            return Err(Error::InvalidParameter(format!(
                "cost grid has {} values, expected {rays} x {samples}",
                values.len()
            )));
        }
        if values.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidParameter("costs must be finite and >= 0".into()));
        }
        Ok(CostGrid { mu, rays, samples, values })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn rays(&self) -> usize {
        self.rays
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, r: usize, z: usize) -> f64 {
        self.values[r * self.samples + z]
    }

    pub fn ray(&self, r: usize) -> &[f64] {
        &self.values[r * self.samples..(r + 1) * self.samples]
    }

    /// Sum of boundary costs for a per-ray boundary assignment.
    pub fn surface_cost(&self, boundary: &[usize]) -> f64 {
        boundary.iter().enumerate().map(|(r, &b)| self.get(r, b)).sum()
    }
}

/// Mean intensity over a `window^3` voxel neighbourhood of the seed,
/// clipped to the volume.
pub fn estimate_mean(vol: &Volume, seed: [usize; 3], window: usize) -> Result<f64> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "mean window must be odd and >= 1, got {window}"
        )));
    }
    let dims = vol.dims();
    if (0..3).any(|a| seed[a] >= dims[a]) {
        return Err(Error::SeedOutsideVolume);
    }
    let half = window / 2;
    let range = |a: usize| seed[a].saturating_sub(half)..=(seed[a] + half).min(dims[a] - 1);
    let mut sum = 0.0;
    let mut count = 0usize;
    for k in range(2) {
        for j in range(1) {
            for i in range(0) {
                sum += vol.get(i, j, k);
                count += 1;
            }
        }
    }
    Ok(sum / count as f64)
}

/// `c[r][z] = |I(r, z) - mu|`.
pub fn compute_costs(rays: &RayGrid, mu: f64) -> CostGrid {
    CostGrid {
        mu,
        rays: rays.rays(),
        samples: rays.samples(),
        values: rays.intensities().iter().map(|&v| (v - mu).abs()).collect(),
    }
}

/// Converts deviation costs into cumulative region costs: placing the
/// boundary of ray `r` at `b` costs `sum_{z <= b} (c[r][z] - threshold)`,
/// shifted per ray so the minimum is zero. Nodes deviating less than
/// `threshold` from the reference intensity pull the boundary outward.
pub fn region_costs(costs: &CostGrid, threshold: f64) -> CostGrid {
    let mut values = Vec::with_capacity(costs.values.len());
    for r in 0..costs.rays {
        let start = values.len();
        let mut acc = 0.0;
        for &c in costs.ray(r) {
            acc += c - threshold;
            values.push(acc);
        }
        let min = values[start..].iter().cloned().fold(f64::INFINITY, f64::min);
        for v in &mut values[start..] {
            *v -= min;
        }
    }
    CostGrid { mu: costs.mu, rays: costs.rays, samples: costs.samples, values }
}

/// Otsu's threshold over a set of values (256-bin histogram).
pub fn otsu_threshold(values: &[f64]) -> f64 {
    const BINS: usize = 256;
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if values.is_empty() || hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        return if values.is_empty() { 0.0 } else { lo };
    }
    let width = (hi - lo) / BINS as f64;
    let mut hist = [0u64; BINS];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(BINS - 1);
        hist[b] += 1;
    }
    let total = values.len() as f64;
    let centers: Vec<f64> = (0..BINS).map(|b| lo + (b as f64 + 0.5) * width).collect();
    let sum_all: f64 = hist.iter().zip(&centers).map(|(&h, &c)| h as f64 * c).sum();

    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut weight_below = 0.0;
    let mut sum_below = 0.0;
    for b in 0..BINS - 1 {
        weight_below += hist[b] as f64;
        sum_below += hist[b] as f64 * centers[b];
        let weight_above = total - weight_below;
        if weight_below == 0.0 || weight_above == 0.0 {
            continue;
        }
        let mean_below = sum_below / weight_below;
        let mean_above = (sum_all - sum_below) / weight_above;
        let between = weight_below * weight_above * (mean_below - mean_above).powi(2);
        if between > best.0 {
            best = (between, b);
        }
    }
    lo + (best.1 + 1) as f64 * width
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArcCounts {
    pub intra_ray: usize,
    pub inter_ray: usize,
    pub terminal: usize,
    pub base: usize,
}

/// The segmentation flow network plus the bookkeeping needed to interpret
/// its cut.
#[derive(Debug, Clone, PartialEq)]
pub struct SegGraph {
    pub network: FlowNetwork,
    pub rays: usize,
    pub samples: usize,
    pub delta_r: usize,
    /// Finite stand-in for infinite capacity, in scaled units.
    pub inf_cap: i64,
    /// Fixed-point factor used for this graph's capacities.
    pub scale: f64,
    /// Unscaled terminal weights `w`, ray-major.
    pub weights: Vec<f64>,
    pub counts: ArcCounts,
}

impl SegGraph {
    #[inline]
    pub fn node(&self, r: usize, z: usize) -> usize {
        r * self.samples + z
    }

    pub fn source(&self) -> usize {
        self.network.source
    }

    pub fn sink(&self) -> usize {
        self.network.sink
    }

    /// Solves the min cut and extracts the per-ray boundary.
    pub fn solve(&self) -> Result<CutResult> {
        let flow = maxflow::max_flow_bk(&self.network);
        let boundary = maxflow::extract_boundary(&flow.source_side, self.rays, self.samples)?;
        Ok(CutResult { flow_value: flow.value, source_side: flow.source_side, boundary })
    }
}

/// Terminal weights: `w(r, 0) = c[r][0]`, `w(r, z) = c[r][z] - c[r][z-1]`.
pub fn terminal_weights(costs: &CostGrid) -> Vec<f64> {
    let mut w = Vec::with_capacity(costs.values.len());
    for r in 0..costs.rays {
        let ray = costs.ray(r);
        w.push(ray[0]);
        w.extend(ray.windows(2).map(|p| p[1] - p[0]));
    }
    w
}

pub fn build_graph(costs: &CostGrid, tmpl: &SphereTemplate, delta_r: usize) -> SegGraph {
    let rays = costs.rays;
    let samples = costs.samples;
    assert_eq!(rays, tmpl.ray_count(), "cost grid and template disagree on ray count");

    let weights = terminal_weights(costs);
    let total: f64 = 1.0 + weights.iter().map(|w| w.abs()).sum::<f64>();
    let mut scale = CAPACITY_SCALE;
    while total * scale > CAPACITY_LIMIT {
        scale /= 2.0;
    }
    let scaled: Vec<i64> = weights.iter().map(|w| (w.abs() * scale).round() as i64).collect();
    let inf_cap = scale as i64 + scaled.iter().sum::<i64>();

    let node_count = rays * samples + 2;
    let source = rays * samples;
    let sink = source + 1;
    let id = |r: usize, z: usize| r * samples + z;
    let mut net = FlowNetwork::new(node_count, source, sink);

    for r in 0..rays {
        for z in 1..samples {
            net.add_arc(id(r, z), id(r, z - 1), inf_cap);
        }
    }
    let intra_ray = net.arcs.len();

    for (r, neighbors) in tmpl.neighbors().iter().enumerate() {
        for &n in neighbors {
            for z in 0..samples {
                net.add_arc(id(r, z), id(n, z.saturating_sub(delta_r)), inf_cap);
            }
        }
    }
    let inter_ray = net.arcs.len() - intra_ray;

    for r in 0..rays {
        for z in 0..samples {
            let k = id(r, z);
            if weights[k] < 0.0 {
                net.add_arc(source, k, scaled[k]);
            } else {
                net.add_arc(k, sink, scaled[k]);
            }
        }
    }
    let terminal = rays * samples;

    for r in 0..rays {
        net.add_arc(source, id(r, 0), inf_cap);
    }

    SegGraph {
        network: net,
        rays,
        samples,
        delta_r,
        inf_cap,
        scale,
        weights,
        counts: ArcCounts { intra_ray, inter_ray, terminal, base: rays },
    }
}
