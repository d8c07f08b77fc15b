//! Spherical ray template: a subdivided icosahedron whose vertices give the
//! ray directions, and the radial sampling of the image along those rays.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::geom::{self, Vec3};
use crate::volume::Volume;

/// Upper bound on icosphere subdivision (40962 rays).
pub const MAX_SUBDIV: u32 = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereTemplate {
    directions: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    neighbors: Vec<Vec<usize>>,
}

impl SphereTemplate {
    pub fn ray_count(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    /// Triangles with outward (counter-clockwise seen from outside) winding.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Sorted neighbours of each ray (rays sharing a triangle with it).
    pub fn neighbors(&self) -> &[Vec<usize>] {
        &self.neighbors
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Builds the icosahedron subdivided `subdiv` times, projected to the unit
/// sphere: `10 * 4^subdiv + 2` vertices and `20 * 4^subdiv` triangles.
pub fn build_icosphere(subdiv: u32) -> Result<SphereTemplate> {
    if subdiv > MAX_SUBDIV {
        return Err(Error::SubdivTooLarge(subdiv));
    }
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ]
    .into_iter()
    .map(geom::normalize)
    .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdiv {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vec3>| {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let m = geom::normalize(geom::scale(geom::add(verts[a], verts[b]), 0.5));
                verts.push(m);
                verts.len() - 1
            })
        };
        for &[a, b, c] in &triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }

    let mut adjacency = vec![BTreeSet::new(); vertices.len()];
    for &[a, b, c] in &triangles {
        for (u, v) in [(a, b), (b, c), (c, a)] {
            adjacency[u].insert(v);
            adjacency[v].insert(u);
        }
    }
    let neighbors = adjacency.into_iter().map(|s| s.into_iter().collect()).collect();

    Ok(SphereTemplate { directions: vertices, triangles, neighbors })
}

/// Samples taken along every template ray from the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RayGrid {
    seed: Vec3,
    rays: usize,
    samples: usize,
    delta_mm: f64,
    positions: Vec<Vec3>,
    intensities: Vec<f64>,
}

impl RayGrid {
    pub fn seed(&self) -> Vec3 {
        self.seed
    }

    pub fn rays(&self) -> usize {
        self.rays
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Radial distance between consecutive samples.
    pub fn delta_mm(&self) -> f64 {
        self.delta_mm
    }

    pub fn radius(&self, z: usize) -> f64 {
        (z + 1) as f64 * self.delta_mm
    }

    #[inline]
    pub fn position(&self, r: usize, z: usize) -> Vec3 {
        self.positions[r * self.samples + z]
    }

    #[inline]
    pub fn intensity(&self, r: usize, z: usize) -> f64 {
        self.intensities[r * self.samples + z]
    }

    /// Ray-major (`r * samples + z`) intensities.
    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }
}

/// Samples `samples` points on every ray at radii `(z + 1) * max_radius_mm /
/// samples`, interpolating the volume trilinearly.
pub fn sample_rays(
    vol: &Volume,
    seed: Vec3,
    tmpl: &SphereTemplate,
    samples: usize,
    max_radius_mm: f64,
) -> Result<RayGrid> {
    if samples < 2 {
        return Err(Error::InvalidParameter(format!("samples must be >= 2, got {samples}")));
    }
    if !(max_radius_mm.is_finite() && max_radius_mm > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "max radius must be > 0, got {max_radius_mm}"
        )));
    }
    if !vol.geometry().contains_point(seed) {
        return Err(Error::SeedOutsideVolume);
    }
    let delta_mm = max_radius_mm / samples as f64;
    let rays = tmpl.ray_count();
    let mut positions = Vec::with_capacity(rays * samples);
    let mut intensities = Vec::with_capacity(rays * samples);
    for &dir in tmpl.directions() {
        for z in 0..samples {
            let p = geom::add(seed, geom::scale(dir, (z + 1) as f64 * delta_mm));
            positions.push(p);
            intensities.push(vol.sample_trilinear(p));
        }
    }
    Ok(RayGrid { seed, rays, samples, delta_mm, positions, intensities })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::{Geometry, ScalarKind};

    fn closed_form(subdiv: u32) -> (usize, usize) {
        let p = 4usize.pow(subdiv);
        (10 * p + 2, 20 * p)
    }

    #[test]
    fn counts_match_closed_form() {
        for subdiv in 0..=4 {
            let t = build_icosphere(subdiv).unwrap();
            let (v, f) = closed_form(subdiv);
            assert_eq!(t.ray_count(), v);
            assert_eq!(t.triangles().len(), f);
            assert_eq!(t.edge_count(), 3 * f / 2);
            assert_eq!(v as i64 - t.edge_count() as i64 + f as i64, 2);
        }
        let t = build_icosphere(3).unwrap();
        assert_eq!((t.ray_count(), t.triangles().len(), t.edge_count()), (642, 1280, 1920));
    }

    #[test]
    fn subdiv_guard() {
        assert!(matches!(build_icosphere(7), Err(Error::SubdivTooLarge(7))));
    }

    #[test]
    fn unit_norm_and_outward_winding() {
        for subdiv in 0..=3 {
            let t = build_icosphere(subdiv).unwrap();
            for d in t.directions() {
                assert!((geom::norm(*d) - 1.0).abs() < 1e-12);
            }
            for &[a, b, c] in t.triangles() {
                let d = t.directions();
                let n = geom::cross(geom::sub(d[b], d[a]), geom::sub(d[c], d[a]));
                let centroid = geom::add(geom::add(d[a], d[b]), d[c]);
                assert!(geom::dot(n, centroid) > 0.0);
            }
        }
    }

    #[test]
    fn every_edge_shared_by_two_triangles() {
        for subdiv in 0..=3 {
            let t = build_icosphere(subdiv).unwrap();
            let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
            for &[a, b, c] in t.triangles() {
                for e in [(a, b), (b, c), (c, a)] {
                    *directed.entry(e).or_default() += 1;
                }
            }
            for (&(a, b), &n) in &directed {
                assert_eq!(n, 1, "directed edge used twice");
                assert_eq!(directed.get(&(b, a)), Some(&1), "edge without twin");
            }
        }
    }

    #[test]
    fn neighbor_degrees_and_symmetry() {
        let t = build_icosphere(0).unwrap();
        assert!(t.neighbors().iter().all(|n| n.len() == 5));
        for subdiv in 1..=3 {
            let t = build_icosphere(subdiv).unwrap();
            let fives = t.neighbors().iter().filter(|n| n.len() == 5).count();
            assert_eq!(fives, 12);
            assert!(t.neighbors().iter().all(|n| n.len() == 5 || n.len() == 6));
            for (r, ns) in t.neighbors().iter().enumerate() {
                assert!(!ns.contains(&r));
                assert!(ns.windows(2).all(|w| w[0] < w[1]));
                for &n in ns {
                    assert!(t.neighbors()[n].contains(&r));
                }
            }
        }
    }

    fn uniform(value: f64) -> Volume {
        let g = Geometry::new([20, 20, 20], [1.0; 3], [0.0; 3]).unwrap();
        Volume::new(g, vec![value; g.len()], ScalarKind::Float64).unwrap()
    }

    #[test]
    fn uniform_volume_samples_constant() {
        let t = build_icosphere(1).unwrap();
        let rays = sample_rays(&uniform(100.0), [3.0, 12.0, 7.5], &t, 8, 30.0).unwrap();
        assert!(rays.intensities().iter().all(|&v| v == 100.0));
    }

    #[test]
    fn radial_step_arithmetic() {
        let t = build_icosphere(0).unwrap();
        let rays = sample_rays(&uniform(1.0), [10.0; 3], &t, 2, 10.0).unwrap();
        assert_eq!(rays.delta_mm(), 5.0);
        for r in 0..rays.rays() {
            for (z, expected) in [(0, 5.0), (1, 10.0)] {
                let d = geom::norm(geom::sub(rays.position(r, z), [10.0; 3]));
                assert!((d - expected).abs() < 1e-12);
                assert!((rays.radius(z) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn seed_and_parameter_checks() {
        let t = build_icosphere(0).unwrap();
        let v = uniform(1.0);
        assert!(matches!(
            sample_rays(&v, [-1.0, 5.0, 5.0], &t, 4, 10.0),
            Err(Error::SeedOutsideVolume)
        ));
        assert!(matches!(
            sample_rays(&v, [5.0; 3], &t, 1, 10.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            sample_rays(&v, [5.0; 3], &t, 4, 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn spherically_symmetric_field_is_ray_independent() {
        // Step phantom of radius 10 mm at the seed: every interpolation stencil
        // (corners within sqrt(3) mm) lies fully inside for r < 8.2 and fully
        // outside for r > 11.8, so rays must agree exactly there.
        let g = Geometry::new([61, 61, 61], [1.0; 3], [-30.0; 3]).unwrap();
        let data = (0..g.len())
            .map(|i| {
                let p = g.voxel_center(g.voxel_of(i));
                if geom::norm(p) <= 10.0 { 200.0 } else { 50.0 }
            })
            .collect();
        let v = Volume::new(g, data, ScalarKind::Float64).unwrap();
        let t = build_icosphere(2).unwrap();
        let rays = sample_rays(&v, [0.0; 3], &t, 20, 20.0).unwrap();
        // well inside and well outside the step every ray agrees exactly
        for r in 0..rays.rays() {
            for z in 0..7 {
                assert!((rays.intensity(r, z) - 200.0).abs() < 1e-9);
            }
            for z in 12..20 {
                assert!((rays.intensity(r, z) - 50.0).abs() < 1e-9);
            }
            for z in 7..12 {
                let v = rays.intensity(r, z);
                assert!((50.0..=200.0).contains(&v));
            }
        }
    }
}
