//! Interactive seeded segmentation of roughly convex 3D structures.
//!
//! Rays are cast from a seed point through the vertices of a subdivided
//! icosahedron and sampled radially. The samples become the nodes of a
//! directed graph whose minimum s-t cut is the optimal closed set: a
//! star-shaped surface around the seed whose neighbouring rays differ by at
//! most `delta_r` samples. The surface is voxelized into a mask aligned with
//! the input image and can be scored against a reference with the Dice
//! coefficient.

pub mod contour;
pub mod error;
pub mod eval;
pub mod geom;
pub mod graph;
pub mod maxflow;
pub mod phantom;
pub mod pipeline;
pub mod surface;
pub mod template;
pub mod volume;

pub use error::{Error, Result};
pub use pipeline::{segment, CostModel, SegParams, Seed, Segmentation};
