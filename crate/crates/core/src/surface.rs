//! Segmentation surface: triangle mesh from per-ray boundaries, its
//! voxelization onto the image lattice, and OBJ export.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::{self, Vec3};
use crate::template::{RayGrid, SphereTemplate};
use crate::volume::{Geometry, MaskVolume};

/// Ray-origin offset for the parity test, in voxel units (y and z differ so
/// the shifted line avoids mesh edges and vertices).
const SHIFT_Y: f64 = 1e-6;
const SHIFT_Z: f64 = 1.37e-6;

const DEGENERATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SegMesh {
    pub seed: Vec3,
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
}

/// Places vertex `r` at the boundary node of ray `r` and copies the template
/// triangulation.
pub fn extract_mesh(boundary: &[usize], rays: &RayGrid, tmpl: &SphereTemplate) -> SegMesh {
    assert_eq!(boundary.len(), rays.rays());
    SegMesh {
        seed: rays.seed(),
        vertices: boundary.iter().enumerate().map(|(r, &b)| rays.position(r, b)).collect(),
        triangles: tmpl.triangles().to_vec(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanDirection {
    PositiveX,
    NegativeX,
}

/// Marks every voxel whose centre lies inside the closed mesh. The seed
/// voxel is always set.
pub fn voxelize(mesh: &SegMesh, geometry: &Geometry) -> Result<MaskVolume> {
    voxelize_along(mesh, geometry, ScanDirection::PositiveX)
}

/// Parity voxelization scanning each x-row in the given direction.
pub fn voxelize_along(
    mesh: &SegMesh,
    geometry: &Geometry,
    direction: ScanDirection,
) -> Result<MaskVolume> {
    let [nx, ny, nz] = geometry.dims;
    let mut crossings: Vec<Vec<f64>> = vec![Vec::new(); ny * nz];

    for (t, &[a, b, c]) in mesh.triangles.iter().enumerate() {
        let (pa, pb, pc) = (mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]);
        let e1 = geom::sub(pb, pa);
        let e2 = geom::sub(pc, pa);
        let longest = geom::dot(e1, e1).max(geom::dot(e2, e2)).max({
            let e3 = geom::sub(pc, pb);
            geom::dot(e3, e3)
        });
        if longest == 0.0 || geom::norm(geom::cross(e1, e2)) <= DEGENERATE_TOLERANCE * longest {
            return Err(Error::DegenerateMesh { triangle: t });
        }

        // work in continuous index space; rows sit at integer (j, k)
        let ia = geometry.world_to_index(pa);
        let ib = geometry.world_to_index(pb);
        let ic = geometry.world_to_index(pc);
        let y_lo = ia[1].min(ib[1]).min(ic[1]) - SHIFT_Y;
        let y_hi = ia[1].max(ib[1]).max(ic[1]) - SHIFT_Y;
        let z_lo = ia[2].min(ib[2]).min(ic[2]) - SHIFT_Z;
        let z_hi = ia[2].max(ib[2]).max(ic[2]) - SHIFT_Z;
        let j0 = y_lo.ceil().max(0.0);
        let j1 = y_hi.floor().min(ny as f64 - 1.0);
        let k0 = z_lo.ceil().max(0.0);
        let k1 = z_hi.floor().min(nz as f64 - 1.0);
        if j0 > j1 || k0 > k1 {
            continue;
        }
        for k in k0 as usize..=k1 as usize {
            let pz = k as f64 + SHIFT_Z;
            for j in j0 as usize..=j1 as usize {
                let py = j as f64 + SHIFT_Y;
                // signed areas of the sub-triangles opposite each vertex
                let wa = edge(ib, ic, py, pz);
                let wb = edge(ic, ia, py, pz);
                let wc = edge(ia, ib, py, pz);
                let inside = (wa > 0.0 && wb > 0.0 && wc > 0.0) || (wa < 0.0 && wb < 0.0 && wc < 0.0);
                if inside {
                    let x = (wa * ia[0] + wb * ib[0] + wc * ic[0]) / (wa + wb + wc);
                    crossings[j + ny * k].push(x);
                }
            }
        }
    }

    let mut mask = MaskVolume::zeros(*geometry);
    for k in 0..nz {
        for j in 0..ny {
            let row = &mut crossings[j + ny * k];
            if row.is_empty() {
                continue;
            }
            row.sort_by(f64::total_cmp);
            for i in 0..nx {
                let x = i as f64;
                let count = match direction {
                    ScanDirection::PositiveX => row.len() - row.partition_point(|&c| c <= x),
                    ScanDirection::NegativeX => row.partition_point(|&c| c < x),
                };
                if count % 2 == 1 {
                    mask.set(i, j, k, true);
                }
            }
        }
    }
    if let Some([i, j, k]) = geometry.nearest_voxel(mesh.seed) {
        mask.set(i, j, k, true);
    }
    Ok(mask)
}

#[inline]
fn edge(p: Vec3, q: Vec3, y: f64, z: f64) -> f64 {
    (q[1] - p[1]) * (z - p[2]) - (q[2] - p[2]) * (y - p[1])
}

/// Wavefront OBJ text: `v` lines followed by 1-based `f` lines.
pub fn mesh_to_obj(mesh: &SegMesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {:.10e} {:.10e} {:.10e}", v[0], v[1], v[2]);
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}

pub fn export_obj(mesh: &SegMesh, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, mesh_to_obj(mesh))?;
    Ok(())
}
