//! Volumetric images, binary masks and continuous-space sampling.
//!
//! Voxel data is stored x-fastest: the linear index of voxel `(i, j, k)` is
//! `i + nx * (j + ny * k)`. World coordinates are in millimetres and relate to
//! continuous voxel indices by `p = origin + index * spacing` (axis aligned).

mod nrrd;

pub use nrrd::{read_nrrd, read_nrrd_bytes, write_nrrd, write_nrrd_mask};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;

/// On-disk scalar type of a volume. Data is always held as `f64` in memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Uint8,
    Int16,
    Uint16,
    Int32,
    Float32,
    Float64,
}

impl ScalarKind {
    pub fn byte_size(self) -> usize {
        match self {
            ScalarKind::Uint8 => 1,
            ScalarKind::Int16 | ScalarKind::Uint16 => 2,
            ScalarKind::Int32 | ScalarKind::Float32 => 4,
            ScalarKind::Float64 => 8,
        }
    }

    /// Canonical NRRD type name.
    pub fn nrrd_name(self) -> &'static str {
        match self {
            ScalarKind::Uint8 => "uchar",
            ScalarKind::Int16 => "short",
            ScalarKind::Uint16 => "ushort",
            ScalarKind::Int32 => "int",
            ScalarKind::Float32 => "float",
            ScalarKind::Float64 => "double",
        }
    }
}

/// Lattice geometry shared by a volume and every mask derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub dims: [usize; 3],
    pub spacing: Vec3,
    pub origin: Vec3,
}

impl Geometry {
    pub fn new(dims: [usize; 3], spacing: Vec3, origin: Vec3) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidVolume(format!("dims must be >= 1, got {dims:?}")));
        }
        if spacing.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(Error::InvalidVolume(format!(
                "spacing must be finite and > 0, got {spacing:?}"
            )));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidVolume(format!("origin must be finite, got {origin:?}")));
        }
        dims[0]
            .checked_mul(dims[1])
            .and_then(|n| n.checked_mul(dims[2]))
            .ok_or_else(|| Error::InvalidVolume("voxel count overflows".into()))?;
        Ok(Geometry { dims, spacing, origin })
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn linear_index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    /// Inverse of [`Geometry::linear_index`].
    #[inline]
    pub fn voxel_of(&self, idx: usize) -> [usize; 3] {
        let [nx, ny, _] = self.dims;
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    pub fn world_to_index(&self, p: Vec3) -> Vec3 {
        std::array::from_fn(|a| (p[a] - self.origin[a]) / self.spacing[a])
    }

    pub fn index_to_world(&self, idx: Vec3) -> Vec3 {
        std::array::from_fn(|a| self.origin[a] + idx[a] * self.spacing[a])
    }

    pub fn voxel_center(&self, v: [usize; 3]) -> Vec3 {
        self.index_to_world([v[0] as f64, v[1] as f64, v[2] as f64])
    }

    pub fn voxel_volume_mm3(&self) -> f64 {
        self.spacing[0] * self.spacing[1] * self.spacing[2]
    }

    pub fn contains_voxel(&self, v: [i64; 3]) -> bool {
        (0..3).all(|a| v[a] >= 0 && (v[a] as usize) < self.dims[a])
    }

    /// True when `p` lies strictly inside the union of voxel cells, i.e. its
    /// continuous index is in `(-0.5, n - 0.5)` on every axis.
    pub fn contains_point(&self, p: Vec3) -> bool {
        let idx = self.world_to_index(p);
        (0..3).all(|a| idx[a] > -0.5 && idx[a] < self.dims[a] as f64 - 0.5)
    }

    /// Nearest voxel to a world point, or `None` if the point is outside.
    pub fn nearest_voxel(&self, p: Vec3) -> Option<[usize; 3]> {
        if !self.contains_point(p) {
            return None;
        }
        let idx = self.world_to_index(p);
        Some(std::array::from_fn(|a| {
            (idx[a].round().max(0.0) as usize).min(self.dims[a] - 1)
        }))
    }
}

/// A scalar image on an axis-aligned lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    geometry: Geometry,
    data: Vec<f64>,
    scalar_kind: ScalarKind,
}

impl Volume {
    pub fn new(geometry: Geometry, data: Vec<f64>, scalar_kind: ScalarKind) -> Result<Self> {
        if data.len() != geometry.len() {
            return Err(Error::InvalidVolume(format!(
                "data length {} does not match dims {:?}",
                data.len(),
                geometry.dims
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidVolume(format!(
                "non-finite intensity at voxel {:?}",
                geometry.voxel_of(pos)
            )));
        }
        Ok(Volume { geometry, data, scalar_kind })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn dims(&self) -> [usize; 3] {
        self.geometry.dims
    }

    pub fn spacing(&self) -> Vec3 {
        self.geometry.spacing
    }

    pub fn origin(&self) -> Vec3 {
        self.geometry.origin
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn scalar_kind(&self) -> ScalarKind {
        self.scalar_kind
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.geometry.linear_index(i, j, k)]
    }

    pub fn world_to_index(&self, p: Vec3) -> Vec3 {
        self.geometry.world_to_index(p)
    }

    pub fn index_to_world(&self, idx: Vec3) -> Vec3 {
        self.geometry.index_to_world(idx)
    }

    pub fn voxel_volume_mm3(&self) -> f64 {
        self.geometry.voxel_volume_mm3()
    }

    /// `(min, max)` over all voxels.
    pub fn intensity_range(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Trilinear interpolation at a world point. Coordinates outside the
    /// lattice hull are clamped to it, so far-away points take the value of
    /// the nearest border voxel.
    pub fn sample_trilinear(&self, p: Vec3) -> f64 {
        let idx = self.world_to_index(p);
        let dims = self.geometry.dims;
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        let mut t = [0.0f64; 3];
        for a in 0..3 {
            let max = (dims[a] - 1) as f64;
            let x = idx[a].clamp(0.0, max);
            let f = x.floor();
            lo[a] = f as usize;
            hi[a] = (lo[a] + 1).min(dims[a] - 1);
            t[a] = x - f;
        }
        let v = |i: usize, j: usize, k: usize| self.get(i, j, k);
        let lerp = |a: f64, b: f64, w: f64| a + (b - a) * w;

        let c00 = lerp(v(lo[0], lo[1], lo[2]), v(hi[0], lo[1], lo[2]), t[0]);
        let c10 = lerp(v(lo[0], hi[1], lo[2]), v(hi[0], hi[1], lo[2]), t[0]);
        let c01 = lerp(v(lo[0], lo[1], hi[2]), v(hi[0], lo[1], hi[2]), t[0]);
        let c11 = lerp(v(lo[0], hi[1], hi[2]), v(hi[0], hi[1], hi[2]), t[0]);
        let c0 = lerp(c00, c10, t[1]);
        let c1 = lerp(c01, c11, t[1]);
        lerp(c0, c1, t[2])
    }
}

/// Binary mask aligned with the volume it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskVolume {
    geometry: Geometry,
    data: Vec<u8>,
}

impl MaskVolume {
    pub fn zeros(geometry: Geometry) -> Self {
        MaskVolume { data: vec![0; geometry.len()], geometry }
    }

    pub fn from_data(geometry: Geometry, data: Vec<u8>) -> Result<Self> {
        if data.len() != geometry.len() {
            return Err(Error::InvalidVolume(format!(
                "mask length {} does not match dims {:?}",
                data.len(),
                geometry.dims
            )));
        }
        if data.iter().any(|&v| v > 1) {
            return Err(Error::InvalidVolume("mask values must be 0 or 1".into()));
        }
        Ok(MaskVolume { geometry, data })
    }

    /// Binarizes a volume: any nonzero voxel becomes 1.
    pub fn from_volume(vol: &Volume) -> Self {
        MaskVolume {
            geometry: *vol.geometry(),
            data: vol.data().iter().map(|&v| u8::from(v != 0.0)).collect(),
        }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn dims(&self) -> [usize; 3] {
        self.geometry.dims
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        self.data[self.geometry.linear_index(i, j, k)] != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: bool) {
        let idx = self.geometry.linear_index(i, j, k);
        self.data[idx] = u8::from(value);
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    pub fn volume_mm3(&self) -> f64 {
        self.count() as f64 * self.geometry.voxel_volume_mm3()
    }
}
