//! Sample spatial depth and its incremental accumulator.
//!
//! The spatial depth of `z` with respect to `x_1..x_n` is one minus the norm of
//! the average unit vector pointing from the sample to `z`. Sample points that
//! coincide exactly with `z` contribute no direction and are skipped, so the
//! average runs over the `n'` non-coincident points only.

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// A depth value together with the number of sample points that contributed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthValue {
    pub depth: f64,
    pub effective_n: usize,
}

impl DepthValue {
    /// True when every sample point coincided with the query (depth reported as 1).
    pub fn is_degenerate(&self) -> bool {
        self.effective_n == 0
    }
}

/// Spatial depth of `z` with respect to every point of `x`.
pub fn spatial_depth(z: &[f64], x: &Dataset) -> Result<DepthValue> {
    if x.is_empty() {
        return Err(Error::EmptyDataset);
    }
    x.check_dim(z)?;
    Ok(spatial_depth_of(z, x.points()))
}

/// Spatial depth of `z` with respect to an arbitrary collection of points of
/// the same dimension.
pub fn spatial_depth_of<'a, I>(z: &[f64], points: I) -> DepthValue
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut acc = UnitVectorAccumulator::new(z.len());
    for p in points {
        acc.accumulate(z, p);
    }
    acc.value()
}

/// Running sum of unit vectors `(z - x) / |z - x|` for a fixed query `z`.
///
/// The depth over the accumulated points can be read at any time, which lets a
/// neighborhood grow one point at a time without recomputing the sum.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVectorAccumulator {
    running_sum: Vec<f64>,
    count: usize,
}

impl UnitVectorAccumulator {
    pub fn new(dim: usize) -> Self {
        Self {
            running_sum: vec![0.0; dim],
            count: 0,
        }
    }

    /// Adds the unit vector from `x` to `z`. Returns `false` (and adds nothing)
    /// when `x == z` exactly.
    #[inline]
    pub fn accumulate(&mut self, z: &[f64], x: &[f64]) -> bool {
        debug_assert_eq!(z.len(), x.len());
        let norm_sq: f64 = z.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        if norm_sq == 0.0 {
            return false;
        }
        let inv = 1.0 / norm_sq.sqrt();
        for ((s, a), b) in self.running_sum.iter_mut().zip(z).zip(x) {
            *s += (a - b) * inv;
        }
        self.count += 1;
        true
    }

    pub fn running_sum(&self) -> &[f64] {
        &self.running_sum
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// `1 - |sum| / count`, clamped to `[0, 1]`; 1 when nothing was accumulated.
    pub fn depth(&self) -> f64 {
        depth_from_sum(&self.running_sum, self.count)
    }

    pub fn value(&self) -> DepthValue {
        DepthValue {
            depth: self.depth(),
            effective_n: self.count,
        }
    }
}

#[inline]
pub(crate) fn depth_from_sum(sum: &[f64], count: usize) -> f64 {
    if count == 0 {
        return 1.0;
    }
    let norm = sum.iter().map(|s| s * s).sum::<f64>().sqrt();
    (1.0 - norm / count as f64).clamp(0.0, 1.0)
}
