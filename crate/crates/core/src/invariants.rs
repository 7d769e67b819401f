//! Randomized checks of the structural properties of local depth and the PILD
//! matrix, shared by the CLI and the test suites.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::Dataset;
use crate::error::Result;
use crate::locality::{LocalityGrid, WeightSpec, DEFAULT_MIN_POINTS};
use crate::pild::PildBasis;
use crate::profile::{ld_profile_at, smoothing_diagnostics};
use crate::reflection::Reflector;
use crate::simdata::replicate_rng;

/// `x -> scale * R x + shift` with `R` orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityTransform {
    dim: usize,
    rotation: Vec<f64>,
    scale: f64,
    shift: Vec<f64>,
}

impl SimilarityTransform {
    /// Orthogonal part from Gram-Schmidt on a Gaussian matrix, scale in
    /// `[0.1, 10]` (log-uniform), shift in `[-10, 10]^d`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(dim);
        while q.len() < dim {
            let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
            for u in &q {
                let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                for (a, b) in v.iter_mut().zip(u) {
                    *a -= dot * b;
                }
            }
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-6 {
                q.push(v.into_iter().map(|a| a / norm).collect());
            }
        }
        Self {
            dim,
            rotation: q.concat(),
            scale: 10f64.powf(rng.random_range(-1.0..1.0)),
            shift: (0..dim).map(|_| rng.random_range(-10.0..10.0)).collect(),
        }
    }

    pub fn apply_point(&self, p: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|r| {
                let row = &self.rotation[r * self.dim..(r + 1) * self.dim];
                self.scale * row.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() + self.shift[r]
            })
            .collect()
    }

    /// Transformed copy keeping ids and labels.
    pub fn apply(&self, x: &Dataset) -> Result<Dataset> {
        x.map_points(|p| self.apply_point(p))
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Largest `|row sum - integrated depth|` over points.
pub fn row_sum_deviation(x: &Dataset, weights: &WeightSpec) -> Result<f64> {
    let basis = PildBasis::with_default_min(x)?;
    let p = basis.matrix(weights)?;
    let sild = basis.sild(&weights.resolve(basis.grid())?)?;
    Ok(p.row_sums()
        .iter()
        .zip(&sild)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Number of sample points whose profile breaks a smoothing bound.
pub fn smoothing_violations(x: &Dataset) -> Result<usize> {
    let grid = LocalityGrid::with_default_min(x.len())?;
    let reflector = Reflector::new(x)?;
    let mut bad = 0;
    for i in 0..x.len() {
        if !smoothing_diagnostics(&ld_profile_at(&reflector, i, &grid)?).holds() {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Largest entrywise change of the matrix under `t`.
pub fn transform_deviation(x: &Dataset, weights: &WeightSpec, t: &SimilarityTransform) -> Result<f64> {
    let a = PildBasis::with_default_min(x)?.matrix(weights)?;
    let b = PildBasis::with_default_min(&t.apply(x)?)?.matrix(weights)?;
    Ok(a.entries().max_abs_diff(b.entries()))
}

/// Diagonal maximality, monotonicity along the depth order, and vanishing
/// outside the largest weighted neighborhood, each checked exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureCheck {
    pub diagonal_max: bool,
    pub monotone: bool,
    pub vanishing: bool,
}

impl StructureCheck {
    pub fn all(&self) -> bool {
        self.diagonal_max && self.monotone && self.vanishing
    }
}

pub fn structure_check(x: &Dataset, upper: f64) -> Result<StructureCheck> {
    let n = x.len();
    let spec = WeightSpec::up_to(upper);
    let basis = PildBasis::with_default_min(x)?;
    let p = basis.matrix(&spec)?;
    let e = p.entries();
    // outermost level carrying weight; below n0 the weights clamp to n0
    let grid = basis.grid();
    let last = spec.resolve(grid)?.last_positive().expect("weights sum to one");
    let support = grid.neighborhood_size(last);
    let reflector = Reflector::new(x)?;
    let mut out = StructureCheck {
        diagonal_max: true,
        monotone: true,
        vanishing: true,
    };
    for i in 0..n {
        let row = reflector.row_at(i);
        let entries = e.row(i);
        out.diagonal_max &= entries.iter().all(|&v| v <= entries[i]);
        let depths = row.depths();
        for j1 in 0..n {
            for j2 in 0..n {
                if depths[j1] > depths[j2] && entries[j1] < entries[j2] {
                    out.monotone = false;
                }
            }
        }
        for w in row.order().windows(2) {
            out.monotone &= entries[w[0]] >= entries[w[1]];
        }
        let hood = row.top_ids(support);
        for j in 0..n {
            if !hood.contains(&x.id(j)) {
                out.vanishing &= entries[j] == 0.0;
            }
        }
    }
    Ok(out)
}

fn random_dataset(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Result<Dataset> {
    let coords = (0..n * d).map(|_| StandardNormal.sample(rng)).collect();
    Dataset::new(d, coords)
}

/// Runs every check on random Gaussian data of size `n` in 2 dimensions.
pub fn run_suite(seed: u64, n: usize) -> Result<Vec<Check>> {
    let mut rng = replicate_rng(seed, 0);
    let x = random_dataset(&mut rng, n.max(DEFAULT_MIN_POINTS), 2)?;
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for w in [WeightSpec::full(), WeightSpec::up_to(0.25), WeightSpec::Point { at: 0.5 }] {
        worst = worst.max(row_sum_deviation(&x, &w)?);
    }
    checks.push(Check {
        name: "row-sum",
        passed: worst <= 1e-10,
        detail: format!("max deviation {worst:.3e}"),
    });

    let bad = smoothing_violations(&x)?;
    checks.push(Check {
        name: "smoothing-bounds",
        passed: bad == 0,
        detail: format!("{bad} of {} profiles violate a bound", x.len()),
    });

    let mut worst = 0.0f64;
    for _ in 0..3 {
        let t = SimilarityTransform::random(&mut rng, 2);
        worst = worst.max(transform_deviation(&x, &WeightSpec::up_to(0.5), &t)?);
    }
    checks.push(Check {
        name: "similarity-invariance",
        passed: worst <= 1e-9,
        detail: format!("max entry change {worst:.3e}"),
    });

    let s = structure_check(&x, 0.3)?;
    for (name, ok) in [
        ("diagonal-max", s.diagonal_max),
        ("depth-monotone", s.monotone),
        ("vanishing-outside", s.vanishing),
    ] {
        checks.push(Check {
            name,
            passed: ok,
            detail: String::new(),
        });
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn transform_preserves_distance_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = SimilarityTransform::random(&mut rng, 3);
        let a = [1.0, 2.0, 3.0];
        let b = [-1.0, 0.5, 2.0];
        let c = [0.0, 0.0, 0.0];
        let d = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        let (ta, tb, tc) = (t.apply_point(&a), t.apply_point(&b), t.apply_point(&c));
        assert!((d(&ta, &tb) / d(&ta, &tc) - d(&a, &b) / d(&a, &c)).abs() < 1e-12);
        assert!((d(&ta, &tb) / d(&a, &b) - t.scale).abs() < 1e-12);
    }

    #[test]
    fn suite_passes() {
        for c in run_suite(7, 60).unwrap() {
            assert!(c.passed, "{c:?}");
        }
    }
}
