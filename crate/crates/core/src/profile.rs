//! Sample β-local depth profiles and integrated local depth.

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::depth::UnitVectorAccumulator;
use crate::error::{Error, Result};
use crate::locality::{LevelWeights, LocalityGrid, WeightSpec};
use crate::reflection::{ReflectedDepthRow, Reflector};

/// Local depth of one point at every grid level.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthProfile {
    pub point_id: Option<u64>,
    /// `ld[l]` is the spatial depth of the point within its neighborhood of
    /// `n0 + l` points.
    pub ld: Vec<f64>,
    /// `ild_curve[l]` is the uniformly weighted integrated depth up to level `l`,
    /// i.e. the mean of `ld[..=l]`.
    pub ild_curve: Vec<f64>,
    /// Largest jump between adjacent levels.
    pub delta: f64,
    /// Largest gap between any two levels.
    pub delta_dagger: f64,
}

impl DepthProfile {
    /// Builds a profile (and its derived curve and jump statistics) from raw level values.
    pub fn from_levels(point_id: Option<u64>, ld: Vec<f64>) -> Self {
        let mut ild_curve = Vec::with_capacity(ld.len());
        // running-mean update keeps a constant profile exactly constant
        let mut mean = 0.0;
        for (l, v) in ld.iter().enumerate() {
            mean += (v - mean) / (l + 1) as f64;
            ild_curve.push(mean);
        }
        let delta = ld
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        let (lo, hi) = ld
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let delta_dagger = if ld.is_empty() { 0.0 } else { hi - lo };
        Self {
            point_id,
            ld,
            ild_curve,
            delta,
            delta_dagger,
        }
    }

    pub fn levels(&self) -> usize {
        self.ld.len()
    }

    /// Local depth at the grid level containing `beta`.
    pub fn ld_at(&self, grid: &LocalityGrid, beta: f64) -> f64 {
        self.ld[grid.level_index(beta)]
    }

    /// Weighted sum of the profile.
    pub fn sild(&self, weights: &LevelWeights) -> Result<f64> {
        if weights.len() != self.ld.len() {
            return Err(Error::WeightLength {
                expected: self.ld.len(),
                found: weights.len(),
            });
        }
        let s: f64 = self
            .ld
            .iter()
            .zip(weights.as_slice())
            .map(|(l, w)| l * w)
            .sum();
        Ok(s.clamp(0.0, 1.0))
    }
}

/// Local depth values of `z` along a precomputed reflected row of `x`.
///
/// The neighborhood grows one point per level in row order, so the depth at
/// every level comes from a single running unit-vector sum.
pub fn levels_from_row(z: &[f64], x: &Dataset, row: &ReflectedDepthRow, grid: &LocalityGrid) -> Vec<f64> {
    let mut acc = UnitVectorAccumulator::new(x.dim());
    let mut ld = Vec::with_capacity(grid.len());
    let n0 = grid.min_points();
    for (r, &q) in row.order().iter().enumerate() {
        acc.accumulate(z, x.point(q));
        if r + 1 >= n0 {
            ld.push(acc.depth());
        }
    }
    ld
}

fn check_grid(x: &Dataset, grid: &LocalityGrid) -> Result<()> {
    if grid.sample_size() != x.len() {
        return Err(Error::InvalidGrid {
            n: x.len(),
            n0: grid.min_points(),
        });
    }
    Ok(())
}

/// β-local depth profile of `z` with respect to `x` over `grid`.
pub fn ld_profile(z: &[f64], x: &Dataset, grid: &LocalityGrid) -> Result<DepthProfile> {
    check_grid(x, grid)?;
    let row = Reflector::new(x)?.row(z)?;
    Ok(DepthProfile::from_levels(
        None,
        levels_from_row(z, x, &row, grid),
    ))
}

/// Profile of sample point `i` using a shared reflector.
pub fn ld_profile_at(reflector: &Reflector<'_>, i: usize, grid: &LocalityGrid) -> Result<DepthProfile> {
    let x = reflector.data();
    check_grid(x, grid)?;
    let row = reflector.row_at(i);
    Ok(DepthProfile::from_levels(
        Some(x.id(i)),
        levels_from_row(x.point(i), x, &row, grid),
    ))
}

/// Profiles of every sample point, computed in parallel, in sample order.
pub fn sample_profiles(x: &Dataset, grid: &LocalityGrid) -> Result<Vec<DepthProfile>> {
    check_grid(x, grid)?;
    let reflector = Reflector::new(x)?;
    (0..x.len())
        .into_par_iter()
        .map(|i| ld_profile_at(&reflector, i, grid))
        .collect()
}

/// Sample integrated local depth of `z` under `weights`, using the default
/// minimum neighborhood size.
pub fn sild(z: &[f64], x: &Dataset, weights: &WeightSpec) -> Result<f64> {
    let grid = LocalityGrid::with_default_min(x.len())?;
    let w = weights.resolve(&grid)?;
    ld_profile(z, x, &grid)?.sild(&w)
}

/// Bounds relating the integrated curve's adjacent jumps to the profile's
/// jump statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingDiagnostics {
    pub delta: f64,
    pub delta_dagger: f64,
    pub max_ild_jump: f64,
    /// `(|ILD_i - ILD_{i-1}|, delta_dagger / i)` for 1-based levels `i >= 2`.
    pub per_level: Vec<(f64, f64)>,
    /// `max_ild_jump <= delta / 2`.
    pub adjacent_bound_holds: bool,
    /// `|ILD_i - ILD_{i-1}| <= delta_dagger / i` at every level.
    pub per_level_bound_holds: bool,
}

impl SmoothingDiagnostics {
    pub fn holds(&self) -> bool {
        self.adjacent_bound_holds && self.per_level_bound_holds
    }
}

/// Rounding slack for the bound comparisons.
const BOUND_SLACK: f64 = 8.0 * f64::EPSILON;

pub fn smoothing_diagnostics(profile: &DepthProfile) -> SmoothingDiagnostics {
    let curve = &profile.ild_curve;
    let per_level: Vec<(f64, f64)> = curve
        .windows(2)
        .enumerate()
        .map(|(l, w)| ((w[1] - w[0]).abs(), profile.delta_dagger / (l + 2) as f64))
        .collect();
    let max_ild_jump = per_level.iter().map(|p| p.0).fold(0.0, f64::max);
    SmoothingDiagnostics {
        delta: profile.delta,
        delta_dagger: profile.delta_dagger,
        max_ild_jump,
        adjacent_bound_holds: max_ild_jump <= profile.delta / 2.0 + BOUND_SLACK,
        per_level_bound_holds: per_level.iter().all(|&(j, b)| j <= b + BOUND_SLACK),
        per_level,
    }
}
