//! Depth with respect to reflection datasets and β-neighborhoods.
//!
//! For a center `z`, the reflection dataset is `X ∪ {2z - x_i}`; `z` is its
//! depth median. The spatial depth of a sample point `x_q` in that set splits
//! into a direct part `Σ_i u(x_q - x_i)`, which does not depend on `z`, and a
//! reflected part `Σ_i u(x_q + x_i - 2z)`, which is symmetric in `(q, i)`.
//! [`Reflector`] caches the direct part once per dataset and evaluates each row
//! from the reflected part alone, visiting every unordered pair once.
//!
//! Coincidences are skipped as in [`crate::depth`]: `x_q == x_i` exactly for
//! the direct part, and `(x_q - z) + (x_i - z) == 0` exactly for the reflected
//! part. Both parts accumulate their terms in ascending `i`, so the row entry of
//! a center that belongs to the sample is exactly 1.

use std::cmp::Ordering;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::dataset::{squared_distance, Dataset};
use crate::depth::depth_from_sum;
use crate::error::{Error, Result};
use crate::locality::neighborhood_size;
use crate::matrix::Matrix;

/// Depths of every sample point with respect to the reflection dataset of one center.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectedDepthRow {
    center_id: Option<u64>,
    depths: Vec<f64>,
    order: Vec<usize>,
    ids: Vec<u64>,
}

impl ReflectedDepthRow {
    /// Id of the center when it is a sample point.
    pub fn center_id(&self) -> Option<u64> {
        self.center_id
    }

    /// `depths[q] = D(x_q | X_Rz)`, indexed by sample position.
    pub fn depths(&self) -> &[f64] {
        &self.depths
    }

    /// Sample positions sorted deepest first; ties go to the point nearer the
    /// center, then to the smaller id.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.depths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depths.is_empty()
    }

    /// `rank[q]` is the 0-based position of sample point `q` in [`Self::order`].
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.order.len()];
        for (r, &q) in self.order.iter().enumerate() {
            rank[q] = r;
        }
        rank
    }

    /// Ids of the `k` deepest points.
    pub fn top_ids(&self, k: usize) -> Vec<u64> {
        self.order[..k.min(self.order.len())]
            .iter()
            .map(|&q| self.ids[q])
            .collect()
    }
}

/// The `ceil(n * beta)` sample points deepest with respect to a center's reflection set.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    pub center_id: Option<u64>,
    pub beta: f64,
    /// Member ids in rank order.
    pub member_ids: Vec<u64>,
}

pub fn beta_neighborhood(row: &ReflectedDepthRow, beta: f64) -> Result<Neighborhood> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "locality level {beta} outside (0, 1]"
        )));
    }
    let k = neighborhood_size(row.len(), beta);
    Ok(Neighborhood {
        center_id: row.center_id,
        beta,
        member_ids: row.top_ids(k),
    })
}

/// Per-dataset state for evaluating reflected depth rows.
#[derive(Debug)]
pub struct Reflector<'a> {
    data: &'a Dataset,
    direct_sum: Vec<f64>,
    direct_count: Vec<u32>,
}

impl<'a> Reflector<'a> {
    pub fn new(data: &'a Dataset) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let n = data.len();
        let d = data.dim();
        let mut direct_sum = vec![0.0; n * d];
        let mut direct_count = vec![0u32; n];
        let mut unit = vec![0.0; d];
        for q in 0..n {
            let xq = data.point(q);
            for i in (q + 1)..n {
                let xi = data.point(i);
                let mut norm_sq = 0.0;
                for k in 0..d {
                    let diff = xq[k] - xi[k];
                    unit[k] = diff;
                    norm_sq += diff * diff;
                }
                if norm_sq == 0.0 {
                    continue;
                }
                let inv = 1.0 / norm_sq.sqrt();
                for k in 0..d {
                    let u = unit[k] * inv;
                    direct_sum[q * d + k] += u;
                    direct_sum[i * d + k] -= u;
                }
                direct_count[q] += 1;
                direct_count[i] += 1;
            }
        }
        Ok(Self {
            data,
            direct_sum,
            direct_count,
        })
    }

    pub fn data(&self) -> &'a Dataset {
        self.data
    }

    /// Row for an arbitrary center `z` (not necessarily a sample point).
    pub fn row(&self, z: &[f64]) -> Result<ReflectedDepthRow> {
        self.data.check_dim(z)?;
        Ok(self.build_row(z, None, None))
    }

    /// Row centered at sample point `i`.
    pub fn row_at(&self, i: usize) -> ReflectedDepthRow {
        self.build_row(self.data.point(i), Some(self.data.id(i)), Some(i))
    }

    fn build_row(&self, z: &[f64], center_id: Option<u64>, center: Option<usize>) -> ReflectedDepthRow {
        let data = self.data;
        let n = data.len();
        let d = data.dim();
        let mut centered = Vec::with_capacity(n * d);
        for p in data.points() {
            centered.extend(p.iter().zip(z).map(|(a, b)| a - b));
        }
        let mut sum = vec![0.0; n * d];
        let mut count = vec![0u32; n];
        let mut unit = vec![0.0; d];
        for q in 0..n {
            let cq = &centered[q * d..(q + 1) * d];
            for i in q..n {
                let ci = &centered[i * d..(i + 1) * d];
                let mut norm_sq = 0.0;
                for k in 0..d {
                    let s = cq[k] + ci[k];
                    unit[k] = s;
                    norm_sq += s * s;
                }
                if norm_sq == 0.0 {
                    continue;
                }
                let inv = 1.0 / norm_sq.sqrt();
                for k in 0..d {
                    sum[q * d + k] += unit[k] * inv;
                }
                count[q] += 1;
                if i != q {
                    for k in 0..d {
                        sum[i * d + k] += unit[k] * inv;
                    }
                    count[i] += 1;
                }
            }
        }
        let mut depths = Vec::with_capacity(n);
        let mut total = vec![0.0; d];
        for q in 0..n {
            for k in 0..d {
                total[k] = self.direct_sum[q * d + k] + sum[q * d + k];
            }
            let m = (self.direct_count[q] + count[q]) as usize;
            depths.push(depth_from_sum(&total, m));
        }
        let dist: Vec<f64> = data.points().map(|p| squared_distance(p, z)).collect();
        let ids = data.ids();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_unstable_by(|&a, &b| rank_cmp(&depths, &dist, ids, a, b));
        // an in-sample center leads its own row; anything ahead of it is an
        // exact duplicate of it, so the profile is unaffected
        if let Some(c) = center {
            let pos = order.iter().position(|&q| q == c).expect("center in row");
            order[..=pos].rotate_right(1);
        }
        ReflectedDepthRow {
            center_id,
            depths,
            order,
            ids: ids.to_vec(),
        }
    }
}

/// Reflected depth row of `z` against `x`.
pub fn reflected_depth_row(z: &[f64], x: &Dataset) -> Result<ReflectedDepthRow> {
    Reflector::new(x)?.row(z)
}

/// Lazily computed, cached rows centered at each sample point.
#[derive(Debug)]
pub struct RowCache<'a> {
    reflector: Reflector<'a>,
    rows: Vec<OnceLock<ReflectedDepthRow>>,
}

impl<'a> RowCache<'a> {
    pub fn new(data: &'a Dataset) -> Result<Self> {
        let reflector = Reflector::new(data)?;
        let rows = (0..data.len()).map(|_| OnceLock::new()).collect();
        Ok(Self { reflector, rows })
    }

    pub fn reflector(&self) -> &Reflector<'a> {
        &self.reflector
    }

    pub fn row(&self, i: usize) -> &ReflectedDepthRow {
        self.rows[i].get_or_init(|| self.reflector.row_at(i))
    }

    /// Computes every missing row in parallel.
    pub fn fill(&self) {
        (0..self.rows.len()).into_par_iter().for_each(|i| {
            self.row(i);
        });
    }

    pub fn into_rows(self) -> Vec<ReflectedDepthRow> {
        self.fill();
        self.rows
            .into_iter()
            .map(|c| c.into_inner().expect("row filled"))
            .collect()
    }
}

/// `S[i][j] = D(x_j | X_{R x_i})`, with unit diagonal. Not symmetric in general.
pub fn reflected_similarity_matrix(x: &Dataset) -> Result<Matrix> {
    if x.len() < 2 {
        return Err(Error::InvalidParameter(
            "similarity matrix needs at least two points".into(),
        ));
    }
    let n = x.len();
    let cache = RowCache::new(x)?;
    let rows = cache.into_rows();
    let mut s = Matrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        s.row_mut(i).copy_from_slice(row.depths());
    }
    Ok(s)
}

/// Compares two positions in the order used for neighborhoods.
pub(crate) fn rank_cmp(depths: &[f64], dist: &[f64], ids: &[u64], a: usize, b: usize) -> Ordering {
    depths[b]
        .total_cmp(&depths[a])
        .then_with(|| dist[a].total_cmp(&dist[b]))
        .then_with(|| ids[a].cmp(&ids[b]))
}
