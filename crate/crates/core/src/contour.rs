//! Axis-aligned slices of volumes and masks, and marching-squares contours
//! of mask slices.
//!
//! A slice along `z` at index `k` is `nx` pixels wide and `ny` high with
//! pixel `(u, v) = (i, j)`; along `y` it is `(i, k)`; along `x` it is `(j, k)`.

use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::MaskVolume;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::InvalidParameter(format!("unknown axis `{other}`"))),
        }
    }
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// `(width, height)` of a slice through a volume of `dims`.
    pub fn slice_size(self, dims: [usize; 3]) -> (usize, usize) {
        match self {
            Axis::X => (dims[1], dims[2]),
            Axis::Y => (dims[0], dims[2]),
            Axis::Z => (dims[0], dims[1]),
        }
    }

    /// Voxel at pixel `(u, v)` of slice `index`.
    pub fn voxel(self, index: usize, u: usize, v: usize) -> [usize; 3] {
        match self {
            Axis::X => [index, u, v],
            Axis::Y => [u, index, v],
            Axis::Z => [u, v, index],
        }
    }
}

pub type Polyline = Vec<[f64; 2]>;

/// Closed contours (first point not repeated) separating set from unset
/// pixels in one slice of `mask`, in pixel coordinates. Points lie midway
/// between pixel centres; diagonal-only contacts are kept apart.
pub fn slice_contours(mask: &MaskVolume, axis: Axis, index: usize) -> Result<Vec<Polyline>> {
    let dims = mask.dims();
    if index >= dims[axis.index()] {
        return Err(Error::InvalidParameter(format!(
            "slice index {index} out of range for axis {axis:?}"
        )));
    }
    let (w, h) = axis.slice_size(dims);
    let value = |u: i64, v: i64| -> bool {
        if u < 0 || v < 0 || u >= w as i64 || v >= h as i64 {
            return false;
        }
        let [i, j, k] = axis.voxel(index, u as usize, v as usize);
        mask.get(i, j, k)
    };

    // segments between edge midpoints, in doubled integer coordinates
    let mut segments: Vec<[(i64, i64); 2]> = Vec::new();
    for v in -1..h as i64 {
        for u in -1..w as i64 {
            let case = (u8::from(value(u, v)) << 3)
                | (u8::from(value(u + 1, v)) << 2)
                | (u8::from(value(u + 1, v + 1)) << 1)
                | u8::from(value(u, v + 1));
            let top = (2 * u + 1, 2 * v);
            let right = (2 * u + 2, 2 * v + 1);
            let bottom = (2 * u + 1, 2 * v + 2);
            let left = (2 * u, 2 * v + 1);
            let mut push = |a, b| segments.push([a, b]);
            match case {
                0 | 15 => {}
                1 | 14 => push(left, bottom),
                2 | 13 => push(bottom, right),
                3 | 12 => push(left, right),
                4 | 11 => push(top, right),
                6 | 9 => push(top, bottom),
                7 | 8 => push(top, left),
                5 => {
                    push(top, right);
                    push(left, bottom);
                }
                10 => {
                    push(top, left);
                    push(bottom, right);
                }
                _ => unreachable!(),
            }
        }
    }

    let mut incident: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (s, seg) in segments.iter().enumerate() {
        for p in seg {
            incident.entry(*p).or_default().push(s);
        }
    }

    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let origin = segments[start][0];
        let mut points = vec![origin];
        let mut current = start;
        let mut at = segments[start][1];
        while at != origin {
            points.push(at);
            let next = incident[&at]
                .iter()
                .copied()
                .find(|&s| s != current && !used[s])
                .expect("marching-squares contours are closed");
            used[next] = true;
            let [a, b] = segments[next];
            at = if a == at { b } else { a };
            current = next;
        }
        lines.push(points.into_iter().map(|(x, y)| [x as f64 / 2.0, y as f64 / 2.0]).collect());
    }
    Ok(lines)
}
