//! Outlier scoring by depth, PILD centrality, and LOF over Euclidean or
//! depth-based dissimilarities, with precision at a known contamination rate.

mod lof;

pub use lof::{lof_scores, DENSITY_EPS};

use rayon::prelude::*;

use crate::dataset::{squared_distance, Dataset};
use crate::depth::spatial_depth;
use crate::error::{Error, Result};
use crate::locality::{WeightSpec, DEFAULT_MIN_POINTS};
use crate::matrix::Matrix;
use crate::pild::{column_centrality, pild_similarity, PildBasis, SimilarityMatrix};
use crate::reflection::reflected_similarity_matrix;

/// Depth-based outlier scores; a lower score is more outlying for every variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DepthMethod {
    Global,
    Local { beta: f64 },
    /// Uniform weights from the first level up to `upper`.
    Integrated { upper: f64 },
    /// Column sums of the PILD matrix under uniform weights up to `upper`.
    PildColumnSum { upper: f64 },
}

/// Shares the PILD basis (neighborhood ranks and profiles) across methods.
#[derive(Debug)]
pub struct DepthScorer<'a> {
    data: &'a Dataset,
    basis: Option<PildBasis>,
}

impl<'a> DepthScorer<'a> {
    pub fn new(data: &'a Dataset) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(Self { data, basis: None })
    }

    fn basis(&mut self) -> Result<&PildBasis> {
        if self.basis.is_none() {
            self.basis = Some(PildBasis::build(self.data, DEFAULT_MIN_POINTS)?);
        }
        Ok(self.basis.as_ref().expect("just built"))
    }

    fn global(&self) -> Result<Vec<f64>> {
        let x = self.data;
        (0..x.len())
            .into_par_iter()
            .map(|i| spatial_depth(x.point(i), x).map(|d| d.depth))
            .collect()
    }

    pub fn scores(&mut self, method: DepthMethod) -> Result<Vec<f64>> {
        match method {
            DepthMethod::Global => self.global(),
            DepthMethod::Local { beta } => {
                check_locality(beta)?;
                let grid = crate::locality::LocalityGrid::with_default_min(self.data.len())?;
                let l = grid.level_index(beta);
                if l + 1 == grid.len() {
                    // the last level is the whole sample
                    return self.global();
                }
                let basis = self.basis()?;
                Ok((0..basis.len()).map(|i| basis.levels(i)[l]).collect())
            }
            DepthMethod::Integrated { upper } => {
                check_locality(upper)?;
                let basis = self.basis()?;
                let w = WeightSpec::up_to(upper).resolve(basis.grid())?;
                basis.sild(&w)
            }
            DepthMethod::PildColumnSum { upper } => {
                check_locality(upper)?;
                let p = self.basis()?.matrix(&WeightSpec::up_to(upper))?;
                Ok(column_centrality(&p))
            }
        }
    }
}

fn check_locality(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("locality must be in (0, 1], got {beta}")));
    }
    Ok(())
}

pub fn depth_scores(x: &Dataset, method: DepthMethod) -> Result<Vec<f64>> {
    DepthScorer::new(x)?.scores(method)
}

/// Symmetric, non-negative matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    entries: Matrix,
    ids: Vec<u64>,
}

impl DissimilarityMatrix {
    pub fn new(entries: Matrix, ids: Vec<u64>) -> Result<Self> {
        let n = entries.rows();
        if entries.cols() != n || ids.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.cols().min(ids.len()),
            });
        }
        for i in 0..n {
            if entries[(i, i)] != 0.0 {
                return Err(Error::InvalidParameter(format!("nonzero diagonal at row {i}")));
            }
            for j in 0..n {
                let v = entries[(i, j)];
                if v.is_nan() || v < 0.0 || v != entries[(j, i)] {
                    return Err(Error::InvalidParameter(format!(
                        "dissimilarity must be symmetric and non-negative, entry ({i}, {j}) = {v}"
                    )));
                }
            }
        }
        Ok(Self { entries, ids })
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

pub fn euclidean_dissimilarity(x: &Dataset) -> DissimilarityMatrix {
    let n = x.len();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = squared_distance(x.point(i), x.point(j)).sqrt();
            m[(i, j)] = d;
            m[(j, i)] = d;
        }
    }
    DissimilarityMatrix {
        entries: m,
        ids: x.ids().to_vec(),
    }
}

/// `1 - s` with a zero diagonal.
pub fn depth_dissimilarity(s: &SimilarityMatrix) -> DissimilarityMatrix {
    let n = s.len();
    let e = s.entries();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m[(i, j)] = 1.0 - e[(i, j)];
            }
        }
    }
    DissimilarityMatrix {
        entries: m,
        ids: s.ids().to_vec(),
    }
}

/// Reflected-depth similarity, min-symmetrized.
pub fn reflected_depth_similarity(x: &Dataset) -> Result<SimilarityMatrix> {
    SimilarityMatrix::min_symmetrized(&reflected_similarity_matrix(x)?, x.ids())
}

/// Which end of a score vector is outlying.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LowIsOutlying,
    HighIsOutlying,
}

/// Indices of the `m` most outlying scores; ties go to the smaller id.
pub fn flag_most_outlying(scores: &[f64], ids: &[u64], direction: Direction, m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let by_score = match direction {
            Direction::LowIsOutlying => scores[a].total_cmp(&scores[b]),
            Direction::HighIsOutlying => scores[b].total_cmp(&scores[a]),
        };
        by_score.then(ids[a].cmp(&ids[b]))
    });
    order.truncate(m);
    order
}

/// Fraction of true outliers among the flagged points, flagging as many points
/// as there are true outliers.
pub fn precision_at_known_rate(scores: &[f64], ids: &[u64], direction: Direction, truth: &[bool]) -> Result<f64> {
    let m = truth.iter().filter(|&&t| t).count();
    if m == 0 {
        return Err(Error::NoOutliers);
    }
    let hits = flag_most_outlying(scores, ids, direction, m)
        .into_iter()
        .filter(|&i| truth[i])
        .count();
    Ok(hits as f64 / m as f64)
}

/// Number of points to flag for contamination `rate`.
pub fn flag_count(rate: f64, n: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidParameter(format!("rate must be in [0, 1], got {rate}")));
    }
    Ok((rate * n as f64).round() as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierReport {
    pub ids: Vec<u64>,
    pub scores: Vec<f64>,
    pub direction: Direction,
    /// Indices of flagged points, most outlying first.
    pub flagged: Vec<usize>,
    pub precision: Option<f64>,
}

impl OutlierReport {
    /// Flags `m` points; with ground truth, precision is measured against it.
    pub fn new(ids: &[u64], scores: Vec<f64>, direction: Direction, m: usize, truth: Option<&[bool]>) -> Self {
        let flagged = flag_most_outlying(&scores, ids, direction, m);
        let precision = truth.and_then(|t| {
            if m == 0 {
                return None;
            }
            Some(flagged.iter().filter(|&&i| t[i]).count() as f64 / m as f64)
        });
        Self {
            ids: ids.to_vec(),
            scores,
            direction,
            flagged,
            precision,
        }
    }

    pub fn is_flagged(&self) -> Vec<bool> {
        let mut out = vec![false; self.ids.len()];
        for &i in &self.flagged {
            out[i] = true;
        }
        out
    }
}

/// Dissimilarity choices for LOF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dissimilarity {
    Euclidean,
    ReflectedDepth,
    /// PILD similarity under uniform weights up to `upper`.
    Pild { upper: f64 },
}

pub fn dissimilarity(x: &Dataset, kind: Dissimilarity) -> Result<DissimilarityMatrix> {
    match kind {
        Dissimilarity::Euclidean => Ok(euclidean_dissimilarity(x)),
        Dissimilarity::ReflectedDepth => Ok(depth_dissimilarity(&reflected_depth_similarity(x)?)),
        Dissimilarity::Pild { upper } => {
            check_locality(upper)?;
            let p = PildBasis::build(x, DEFAULT_MIN_POINTS)?.matrix(&WeightSpec::up_to(upper))?;
            Ok(depth_dissimilarity(&pild_similarity(&p)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn blob_with_isolated(seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<[f64; 2]> = (0..19)
            .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect();
        rows.push([7.0, -6.0]);
        Dataset::from_rows(&rows).unwrap()
    }

    #[test]
    fn local_depth_at_one_is_global_depth() {
        let x = blob_with_isolated(1);
        let gd = depth_scores(&x, DepthMethod::Global).unwrap();
        let ld = depth_scores(&x, DepthMethod::Local { beta: 1.0 }).unwrap();
        assert_eq!(gd, ld);
    }

    #[test]
    fn isolated_point_scores_lowest() {
        let x = blob_with_isolated(2);
        let mut scorer = DepthScorer::new(&x).unwrap();
        for m in [
            DepthMethod::Global,
            DepthMethod::Local { beta: 0.5 },
            DepthMethod::Integrated { upper: 0.5 },
            DepthMethod::PildColumnSum { upper: 0.5 },
        ] {
            let s = scorer.scores(m).unwrap();
            let low = flag_most_outlying(&s, x.ids(), Direction::LowIsOutlying, 1);
            assert_eq!(low, vec![19], "{m:?}");
        }
    }

    #[test]
    fn dissimilarity_basics() {
        let x = Dataset::from_rows(&[[0.0, 0.0], [0.0, 0.0], [1.0, 2.0], [3.0, -1.0], [2.0, 2.0]]).unwrap();
        let e = euclidean_dissimilarity(&x);
        assert_eq!(e.entries()[(0, 1)], 0.0);
        assert!((e.entries()[(0, 2)] - 5f64.sqrt()).abs() < 1e-15);
        let s = dissimilarity(&x, Dissimilarity::ReflectedDepth).unwrap();
        assert!(DissimilarityMatrix::new(s.entries().clone(), s.ids().to_vec()).is_ok());
    }

    #[test]
    fn outside_neighborhood_is_fully_dissimilar() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Dataset::new(2, (0..40).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let upper = 0.3;
        let basis = PildBasis::build(&x, DEFAULT_MIN_POINTS).unwrap();
        let d = dissimilarity(&x, Dissimilarity::Pild { upper }).unwrap();
        let k = crate::locality::neighborhood_size(20, upper);
        for i in 0..20 {
            for j in 0..20 {
                if basis.rank(i, j) >= k {
                    assert_eq!(d.entries()[(i, j)], 1.0);
                }
            }
        }
    }

    #[test]
    fn precision_protocol() {
        let scores = [0.9, 0.1, 0.8, 0.2, 0.7];
        let ids = [0, 1, 2, 3, 4];
        let truth = [false, true, false, true, false];
        assert_eq!(precision_at_known_rate(&scores, &ids, Direction::LowIsOutlying, &truth).unwrap(), 1.0);
        assert_eq!(precision_at_known_rate(&scores, &ids, Direction::HighIsOutlying, &truth).unwrap(), 0.0);
        assert!(matches!(
            precision_at_known_rate(&scores, &ids, Direction::LowIsOutlying, &[false; 5]),
            Err(Error::NoOutliers)
        ));
        let tied = [1.0, 1.0, 1.0];
        assert_eq!(flag_most_outlying(&tied, &[5, 2, 9], Direction::HighIsOutlying, 2), vec![1, 0]);
    }

    #[test]
    fn random_scores_have_base_rate_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ids: Vec<u64> = (0..100).collect();
        let truth: Vec<bool> = (0..100).map(|i| i < 10).collect();
        let mut total = 0.0;
        for _ in 0..1000 {
            let s: Vec<f64> = (0..100).map(|_| rng.random()).collect();
            total += precision_at_known_rate(&s, &ids, Direction::HighIsOutlying, &truth).unwrap();
        }
        assert!((total / 1000.0 - 0.1).abs() <= 0.02);
    }

    #[test]
    fn precision_invariant_to_monotone_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ids: Vec<u64> = (0..50).collect();
        let truth: Vec<bool> = (0..50).map(|i| i % 7 == 0).collect();
        let s: Vec<f64> = (0..50).map(|_| rng.random()).collect();
        let t: Vec<f64> = s.iter().map(|v| (3.0 * v).exp() - 2.0).collect();
        assert_eq!(
            precision_at_known_rate(&s, &ids, Direction::LowIsOutlying, &truth).unwrap(),
            precision_at_known_rate(&t, &ids, Direction::LowIsOutlying, &truth).unwrap()
        );
    }

    #[test]
    fn report_counts() {
        assert_eq!(flag_count(0.2, 500).unwrap(), 100);
        let r = OutlierReport::new(&[3, 4, 5], vec![0.5, 0.1, 0.3], Direction::LowIsOutlying, 1, Some(&[false, true, false]));
        assert_eq!(r.flagged, vec![1]);
        assert_eq!(r.precision, Some(1.0));
        assert_eq!(r.is_flagged(), vec![false, true, false]);
    }
}
