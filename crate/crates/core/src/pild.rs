//! The PILD contribution matrix, its column centrality, and the derived
//! symmetric similarity.
//!
//! Entry `(i, j)` is the share of point `i`'s integrated local depth that comes
//! from point `j`. At each level the local depth of `x_i` is spread evenly over
//! the members of its neighborhood, then levels are combined with the weights.
//! Since neighborhoods are prefixes of `x_i`'s reflected order, entry `(i, j)`
//! only depends on the rank of `j` in that order.

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::locality::{LevelWeights, LocalityGrid, WeightSpec, DEFAULT_MIN_POINTS};
use crate::matrix::Matrix;
use crate::profile::{levels_from_row, DepthProfile};
use crate::reflection::Reflector;

/// Weight-independent part of the matrix: every row's neighborhood ranks and
/// local depth profile.
///
/// Building the basis dominates the cost; assembling a matrix from it for any
/// weighting is `O(n²)`.
#[derive(Debug, Clone)]
pub struct PildBasis {
    grid: LocalityGrid,
    ids: Vec<u64>,
    /// `ranks[i * n + j]` is the 0-based position of `j` in row `i`'s order.
    ranks: Vec<u32>,
    /// `ld[(i, l)]` is point `i`'s local depth at level `l`.
    ld: Matrix,
}

impl PildBasis {
    pub fn build(x: &Dataset, min_points: usize) -> Result<Self> {
        let n = x.len();
        let grid = LocalityGrid::new(n, min_points)?;
        let reflector = Reflector::new(x)?;
        let rows: Vec<(Vec<u32>, Vec<f64>)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let row = reflector.row_at(i);
                let mut ranks = vec![0u32; n];
                for (r, &q) in row.order().iter().enumerate() {
                    ranks[q] = r as u32;
                }
                let ld = levels_from_row(x.point(i), x, &row, &grid);
                (ranks, ld)
            })
            .collect();
        let mut ranks = Vec::with_capacity(n * n);
        let mut ld = Vec::with_capacity(n * grid.len());
        for (r, l) in rows {
            ranks.extend(r);
            ld.extend(l);
        }
        Ok(Self {
            ld: Matrix::from_vec(n, grid.len(), ld),
            grid,
            ids: x.ids().to_vec(),
            ranks,
        })
    }

    pub fn with_default_min(x: &Dataset) -> Result<Self> {
        Self::build(x, DEFAULT_MIN_POINTS)
    }

    pub fn grid(&self) -> &LocalityGrid {
        &self.grid
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Rank of `j` in row `i`'s neighborhood order (0 = the point itself).
    pub fn rank(&self, i: usize, j: usize) -> usize {
        self.ranks[i * self.len() + j] as usize
    }

    pub fn ranks_of(&self, i: usize) -> &[u32] {
        let n = self.len();
        &self.ranks[i * n..(i + 1) * n]
    }

    /// Local depth values of point `i` at each level.
    pub fn levels(&self, i: usize) -> &[f64] {
        self.ld.row(i)
    }

    pub fn profile(&self, i: usize) -> DepthProfile {
        DepthProfile::from_levels(Some(self.ids[i]), self.ld.row(i).to_vec())
    }

    /// Integrated local depth of every point under `weights`.
    pub fn sild(&self, weights: &LevelWeights) -> Result<Vec<f64>> {
        (0..self.len()).map(|i| self.profile(i).sild(weights)).collect()
    }

    /// Entry value by rank for row `i`: `out[r]` is the contribution of the
    /// point at rank `r`.
    fn row_by_rank(&self, i: usize, w: &[f64]) -> Vec<f64> {
        let b = self.grid.len();
        let n0 = self.grid.min_points();
        let ld = self.ld.row(i);
        // suffix[l] = sum over levels l' >= l of LD * w / k
        let mut suffix = vec![0.0; b + 1];
        for l in (0..b).rev() {
            let k = self.grid.neighborhood_size(l) as f64;
            suffix[l] = suffix[l + 1] + ld[l] * w[l] / k;
        }
        // rank r belongs to every level whose neighborhood has more than r points
        (0..self.len())
            .map(|r| suffix[(r + 1).saturating_sub(n0)])
            .collect()
    }

    /// Contributions to point `i`'s integrated depth, indexed by point.
    pub fn row_contributions(&self, i: usize, weights: &LevelWeights) -> Result<Vec<f64>> {
        self.check_weights(weights)?;
        let by_rank = self.row_by_rank(i, weights.as_slice());
        Ok(self.ranks_of(i).iter().map(|&r| by_rank[r as usize]).collect())
    }

    fn check_weights(&self, weights: &LevelWeights) -> Result<()> {
        if weights.len() != self.grid.len() {
            return Err(Error::WeightLength {
                expected: self.grid.len(),
                found: weights.len(),
            });
        }
        Ok(())
    }

    pub fn matrix(&self, weights: &WeightSpec) -> Result<PildMatrix> {
        let w = weights.resolve(&self.grid)?;
        let n = self.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| self.row_contributions(i, &w))
            .collect::<Result<_>>()?;
        Ok(PildMatrix {
            entries: Matrix::from_rows(rows),
            ids: self.ids.clone(),
            weights: weights.clone(),
            grid: self.grid,
        })
    }

    /// Membership indicator at the level containing `beta`: entry `(i, j)` is
    /// 1 when `x_j` is in `x_i`'s neighborhood.
    pub fn indicator(&self, beta: f64) -> Matrix {
        let k = self.grid.neighborhood_size(self.grid.level_index(beta));
        let n = self.len();
        let data = self
            .ranks
            .iter()
            .map(|&r| if (r as usize) < k { 1.0 } else { 0.0 })
            .collect();
        Matrix::from_vec(n, n, data)
    }
}

/// Dense PILD matrix with the ids and weighting it was built from.
#[derive(Debug, Clone)]
pub struct PildMatrix {
    entries: Matrix,
    ids: Vec<u64>,
    weights: WeightSpec,
    grid: LocalityGrid,
}

impl PildMatrix {
    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn weights(&self) -> &WeightSpec {
        &self.weights
    }

    pub fn grid(&self) -> &LocalityGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Row sums; each equals that point's integrated local depth.
    pub fn row_sums(&self) -> Vec<f64> {
        self.entries.row_sums()
    }
}

pub fn pild_matrix(x: &Dataset, weights: &WeightSpec) -> Result<PildMatrix> {
    PildBasis::with_default_min(x)?.matrix(weights)
}

/// Column sums of the matrix; larger means more locally central.
pub fn column_centrality(p: &PildMatrix) -> Vec<f64> {
    p.entries.col_sums()
}

/// Symmetric similarity with entries in `[0, 1]` and unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    entries: Matrix,
    ids: Vec<u64>,
}

impl SimilarityMatrix {
    /// Symmetrizes an arbitrary `[0, 1]`-valued square matrix by elementwise
    /// min and sets the diagonal to 1.
    pub fn min_symmetrized(m: &Matrix, ids: &[u64]) -> Result<Self> {
        let n = m.rows();
        if m.cols() != n || ids.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.cols().min(ids.len()),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::SimilarityOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = 1.0;
            for j in (i + 1)..n {
                let v = m[(i, j)].min(m[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Ok(Self {
            entries: out,
            ids: ids.to_vec(),
        })
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Divides each row by its diagonal entry, then min-symmetrizes.
pub fn pild_similarity(p: &PildMatrix) -> Result<SimilarityMatrix> {
    let n = p.len();
    let mut scaled = Matrix::zeros(n, n);
    for i in 0..n {
        let diag = p.entries[(i, i)];
        if diag <= 0.0 {
            return Err(Error::ZeroDiagonal { id: p.ids[i] });
        }
        for (out, v) in scaled.row_mut(i).iter_mut().zip(p.entries.row(i)) {
            // the diagonal is the row max, so the ratio only exceeds 1 by rounding
            *out = (v / diag).min(1.0);
        }
    }
    SimilarityMatrix::min_symmetrized(&scaled, &p.ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depth::spatial_depth;
    use crate::profile::ld_profile;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_dataset(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Dataset {
        let coords = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
        Dataset::new(d, coords).unwrap()
    }

    #[test]
    fn global_weights_give_constant_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let x = random_dataset(&mut rng, 15, 2);
        let p = pild_matrix(&x, &WeightSpec::Point { at: 1.0 }).unwrap();
        let mut total = 0.0;
        for i in 0..15 {
            let gd = spatial_depth(x.point(i), &x).unwrap().depth;
            total += gd;
            for j in 0..15 {
                assert!((p.entries()[(i, j)] - gd / 15.0).abs() <= 1e-15);
            }
        }
        for c in column_centrality(&p) {
            assert!((c - total / 15.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn rows_sum_to_integrated_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random_dataset(&mut rng, 50, 2);
        let grid = LocalityGrid::with_default_min(50).unwrap();
        for spec in [WeightSpec::full(), WeightSpec::up_to(0.3), WeightSpec::Point { at: 0.5 }] {
            let p = pild_matrix(&x, &spec).unwrap();
            let w = spec.resolve(&grid).unwrap();
            for (i, s) in p.row_sums().iter().enumerate() {
                let sild = ld_profile(x.point(i), &x, &grid).unwrap().sild(&w).unwrap();
                assert!((s - sild).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn structural_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let x = random_dataset(&mut rng, 30, 3);
        let basis = PildBasis::with_default_min(&x).unwrap();
        let reflector = Reflector::new(&x).unwrap();
        let upper = 0.4;
        let p = basis.matrix(&WeightSpec::up_to(upper)).unwrap();
        let k = crate::locality::neighborhood_size(30, upper);
        for i in 0..30 {
            let row = reflector.row_at(i);
            let e = p.entries().row(i);
            for j in 0..30 {
                assert!(e[i] >= e[j]);
                assert!(e[j] >= 0.0);
                if basis.rank(i, j) >= k {
                    assert_eq!(e[j], 0.0);
                }
                for j2 in 0..30 {
                    if row.depths()[j] >= row.depths()[j2] && basis.rank(i, j) < basis.rank(i, j2) {
                        assert!(e[j] >= e[j2]);
                    }
                }
            }
        }
    }

    #[test]
    fn isolated_point_has_least_centrality() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut rows: Vec<[f64; 2]> = (0..9)
            .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect();
        rows.push([40.0, 40.0]);
        let x = Dataset::from_rows(&rows).unwrap();
        let c = column_centrality(&pild_matrix(&x, &WeightSpec::full()).unwrap());
        let min = c.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(c[9], min);
        assert!(c[..9].iter().all(|&v| v > c[9]));
    }

    #[test]
    fn similarity_is_symmetric_with_unit_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let x = random_dataset(&mut rng, 20, 2);
        let s = pild_similarity(&pild_matrix(&x, &WeightSpec::up_to(0.5)).unwrap()).unwrap();
        let e = s.entries();
        for i in 0..20 {
            assert_eq!(e[(i, i)], 1.0);
            for j in 0..20 {
                assert_eq!(e[(i, j)], e[(j, i)]);
                assert!((0.0..=1.0).contains(&e[(i, j)]));
            }
        }
    }

    #[test]
    fn symmetric_square_similarity_by_hand() {
        // n = 4, one level per extra point: levels k = 3, 4 with weight 1/2 each.
        // Opposite corners share every neighborhood only at k = 4.
        let x = Dataset::from_rows(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]).unwrap();
        let basis = PildBasis::with_default_min(&x).unwrap();
        let p = basis.matrix(&WeightSpec::full()).unwrap();
        for i in 0..4 {
            let ld = basis.levels(i);
            let r = basis.ranks_of(i);
            for j in 0..4 {
                let mut expect = 0.0;
                for (l, k) in [3usize, 4].into_iter().enumerate() {
                    if (r[j] as usize) < k {
                        expect += ld[l] * 0.5 / k as f64;
                    }
                }
                assert!((p.entries()[(i, j)] - expect).abs() <= 1e-15);
            }
        }
        // full similarity exactly when each lies in every neighborhood of the other
        let s = pild_similarity(&p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let shared = basis.rank(i, j) < 3 && basis.rank(j, i) < 3;
                assert_eq!(s.entries()[(i, j)] == 1.0, shared, "({i}, {j})");
            }
        }
    }

    #[test]
    fn zero_diagonal_is_reported() {
        let x = Dataset::from_rows(&[[0.0], [1.0], [2.0], [3.0]]).unwrap();
        let basis = PildBasis::with_default_min(&x).unwrap();
        let p = basis.matrix(&WeightSpec::Point { at: 0.75 }).unwrap();
        // an end point of a line has zero depth in its 3-point neighborhood
        assert_eq!(p.entries()[(0, 0)], 0.0);
        assert!(matches!(pild_similarity(&p), Err(Error::ZeroDiagonal { id: 0 })));
    }

    #[test]
    fn out_of_range_similarity_rejected() {
        let m = Matrix::from_rows(vec![vec![1.0, 1.5], vec![0.2, 1.0]]);
        assert!(matches!(
            SimilarityMatrix::min_symmetrized(&m, &[0, 1]),
            Err(Error::SimilarityOutOfRange { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn indicator_counts_match_neighborhood_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let x = random_dataset(&mut rng, 12, 2);
        let basis = PildBasis::with_default_min(&x).unwrap();
        let ind = basis.indicator(0.5);
        for s in ind.row_sums() {
            assert_eq!(s, 6.0);
        }
    }
}
