//! Synthetic test volumes with analytic ground truth.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::volume::{Geometry, MaskVolume, ScalarKind, Volume};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Ellipsoid { center: Vec3, semi_axes: Vec3 },
}

impl Shape {
    pub fn sphere(center: Vec3, radius: f64) -> Self {
        Shape::Ellipsoid { center, semi_axes: [radius; 3] }
    }

    pub fn contains(&self, p: Vec3) -> bool {
        match *self {
            Shape::Ellipsoid { center, semi_axes } => {
                (0..3).map(|a| ((p[a] - center[a]) / semi_axes[a]).powi(2)).sum::<f64>() <= 1.0
            }
        }
    }

    /// `(4/3) pi abc`.
    pub fn analytic_volume_mm3(&self) -> f64 {
        match *self {
            Shape::Ellipsoid { semi_axes: [a, b, c], .. } => 4.0 / 3.0 * std::f64::consts::PI * a * b * c,
        }
    }

    pub fn center(&self) -> Vec3 {
        match *self {
            Shape::Ellipsoid { center, .. } => center,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub geometry: Geometry,
    pub shape: Shape,
    pub inside: f64,
    pub outside: f64,
    /// Standard deviation of additive Gaussian noise.
    pub noise_sigma: f64,
    pub rng_seed: u64,
}

impl PhantomSpec {
    /// `n^3` voxels of `spacing` mm with the shape centred on voxel `n/2`.
    pub fn centered(n: usize, spacing: f64, semi_axes: Vec3) -> Result<Self> {
        let geometry = Geometry::new([n; 3], [spacing; 3], [0.0; 3])?;
        let c = (n / 2) as f64 * spacing;
        Ok(PhantomSpec {
            geometry,
            shape: Shape::Ellipsoid { center: [c; 3], semi_axes },
            inside: 200.0,
            outside: 50.0,
            noise_sigma: 0.0,
            rng_seed: 0,
        })
    }

    /// Image with `inside`/`outside` intensities at voxel centres, plus
    /// seeded Gaussian noise. Stored as float32.
    pub fn generate(&self) -> Result<Volume> {
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise sigma {}", self.noise_sigma)));
        }
        let g = self.geometry;
        let noise = Normal::new(0.0, self.noise_sigma)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        let data = (0..g.len())
            .map(|idx| {
                let base = if self.shape.contains(g.voxel_center(g.voxel_of(idx))) {
                    self.inside
                } else {
                    self.outside
                };
                let v = if self.noise_sigma > 0.0 { base + noise.sample(&mut rng) } else { base };
                // match the float32 storage so the in-memory phantom equals its file
                v as f32 as f64
            })
            .collect();
        Volume::new(g, data, ScalarKind::Float32)
    }

    /// Ground-truth mask: voxel centres inside the shape.
    pub fn truth(&self) -> MaskVolume {
        let g = self.geometry;
        let data = (0..g.len())
            .map(|idx| u8::from(self.shape.contains(g.voxel_center(g.voxel_of(idx)))))
            .collect();
        MaskVolume::from_data(g, data).expect("length matches geometry")
    }
}
