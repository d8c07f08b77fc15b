//! End-to-end segmentation from a seed: ray sampling, graph construction,
//! min cut, mesh extraction and voxelization, with per-phase timings.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::graph::{self, CostGrid};
use crate::maxflow::CutResult;
use crate::surface::{self, SegMesh};
use crate::template::{self, RayGrid, SphereTemplate};
use crate::volume::{MaskVolume, Volume};

/// How ray samples are turned into boundary costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum CostModel {
    /// Boundary cost is the node's deviation `|I - mu|` itself.
    Deviation,
    /// Boundary cost accumulates `|I - mu| - threshold` along the ray, so the
    /// surface encloses nodes resembling the seed region. Without an explicit
    /// threshold, Otsu's threshold of all deviations is used.
    #[default]
    Region,
    RegionThreshold { threshold: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegParams {
    pub subdiv: u32,
    pub samples: usize,
    pub max_radius_mm: f64,
    pub delta_r: usize,
    pub mean_window: usize,
    pub cost: CostModel,
}

impl Default for SegParams {
    fn default() -> Self {
        SegParams {
            subdiv: 3,
            samples: 60,
            max_radius_mm: 50.0,
            delta_r: 1,
            mean_window: 3,
            cost: CostModel::Region,
        }
    }
}

impl SegParams {
    pub fn validate(&self) -> Result<()> {
        if self.subdiv > template::MAX_SUBDIV {
            return Err(Error::SubdivTooLarge(self.subdiv));
        }
        if self.samples < 2 {
            return Err(Error::InvalidParameter("samples must be >= 2".into()));
        }
        if !(self.max_radius_mm.is_finite() && self.max_radius_mm > 0.0) {
            return Err(Error::InvalidParameter("radius must be > 0".into()));
        }
        if self.mean_window == 0 || self.mean_window.is_multiple_of(2) {
            return Err(Error::InvalidParameter("mean window must be odd and >= 1".into()));
        }
        if let CostModel::RegionThreshold { threshold } = self.cost {
            if !threshold.is_finite() {
                return Err(Error::InvalidParameter("threshold must be finite".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Seed {
    Voxel([usize; 3]),
    World(Vec3),
}

/// Wall-clock milliseconds per phase.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub rays: f64,
    pub graph: f64,
    pub mincut: f64,
    pub voxelize: f64,
    pub total: f64,
}

#[derive(Debug, Clone)]
pub struct Segmentation {
    pub params: SegParams,
    pub seed_mm: Vec3,
    pub seed_voxel: [usize; 3],
    pub mu: f64,
    /// Threshold used by the region cost model, if any.
    pub threshold: Option<f64>,
    pub rays: RayGrid,
    pub cut: CutResult,
    pub mesh: SegMesh,
    pub mask: MaskVolume,
    pub timings: PhaseTimings,
}

impl Segmentation {
    pub fn boundary_range(&self) -> (usize, usize) {
        let b = &self.cut.boundary;
        (*b.iter().min().unwrap(), *b.iter().max().unwrap())
    }

    pub fn volume_mm3(&self) -> f64 {
        self.mask.volume_mm3()
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Resolves a seed to `(world position, nearest voxel)`.
pub fn resolve_seed(vol: &Volume, seed: Seed) -> Result<(Vec3, [usize; 3])> {
    let g = vol.geometry();
    match seed {
        Seed::Voxel(v) => {
            if (0..3).any(|a| v[a] >= g.dims[a]) {
                return Err(Error::SeedOutsideVolume);
            }
            Ok((g.voxel_center(v), v))
        }
        Seed::World(p) => {
            let v = g.nearest_voxel(p).ok_or(Error::SeedOutsideVolume)?;
            Ok((p, v))
        }
    }
}

/// Boundary costs fed to the graph, and the region threshold if one was used.
pub fn boundary_costs(rays: &RayGrid, mu: f64, model: CostModel) -> (CostGrid, Option<f64>) {
    let deviation = graph::compute_costs(rays, mu);
    match model {
        CostModel::Deviation => (deviation, None),
        CostModel::Region => {
            let t = graph::otsu_threshold(deviation.values());
            (graph::region_costs(&deviation, t), Some(t))
        }
        CostModel::RegionThreshold { threshold } => {
            (graph::region_costs(&deviation, threshold), Some(threshold))
        }
    }
}

/// Runs the full pipeline, building the template on the fly.
pub fn segment(vol: &Volume, seed: Seed, params: &SegParams) -> Result<Segmentation> {
    params.validate()?;
    let tmpl = template::build_icosphere(params.subdiv)?;
    segment_with_template(vol, seed, params, &tmpl)
}

/// Runs the full pipeline with a prebuilt template matching `params.subdiv`.
pub fn segment_with_template(
    vol: &Volume,
    seed: Seed,
    params: &SegParams,
    tmpl: &SphereTemplate,
) -> Result<Segmentation> {
    params.validate()?;
    let start = Instant::now();
    let (seed_mm, seed_voxel) = resolve_seed(vol, seed)?;

    let t = Instant::now();
    let rays = template::sample_rays(vol, seed_mm, tmpl, params.samples, params.max_radius_mm)?;
    let mu = graph::estimate_mean(vol, seed_voxel, params.mean_window)?;
    let (costs, threshold) = boundary_costs(&rays, mu, params.cost);
    let rays_ms = ms(t);

    let t = Instant::now();
    let seg_graph = graph::build_graph(&costs, tmpl, params.delta_r);
    let graph_ms = ms(t);

    let t = Instant::now();
    let cut = seg_graph.solve()?;
    let mincut_ms = ms(t);

    let t = Instant::now();
    let mesh = surface::extract_mesh(&cut.boundary, &rays, tmpl);
    let mask = surface::voxelize(&mesh, vol.geometry())?;
    let voxelize_ms = ms(t);

    let timings = PhaseTimings {
        rays: rays_ms,
        graph: graph_ms,
        mincut: mincut_ms,
        voxelize: voxelize_ms,
        total: ms(start),
    };
    Ok(Segmentation {
        params: *params,
        seed_mm,
        seed_voxel,
        mu,
        threshold,
        rays,
        cut,
        mesh,
        mask,
        timings,
    })
}
