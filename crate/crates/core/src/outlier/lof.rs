//! Local outlier factor over a precomputed dissimilarity matrix.

use rayon::prelude::*;

use super::DissimilarityMatrix;
use crate::error::{Error, Result};

/// Added to the mean reachability distance so that coincident neighborhoods
/// have finite density; such neighborhoods then score exactly 1.
pub const DENSITY_EPS: f64 = 1e-10;

/// Neighborhood of one point: members (ties at the k-distance included) and
/// the k-distance itself.
#[derive(Debug, Clone)]
struct KNeighborhood {
    members: Vec<usize>,
    k_distance: f64,
}

fn k_neighborhood(d: &DissimilarityMatrix, p: usize, k: usize) -> KNeighborhood {
    let row = d.entries().row(p);
    let mut others: Vec<usize> = (0..row.len()).filter(|&o| o != p).collect();
    others.sort_unstable_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
    let k_distance = row[others[k - 1]];
    let end = others.partition_point(|&o| row[o] <= k_distance);
    others.truncate(end);
    KNeighborhood {
        members: others,
        k_distance,
    }
}

/// LOF score of every point; larger is more outlying. Requires `1 <= k <= n - 1`.
pub fn lof_scores(d: &DissimilarityMatrix, k: usize) -> Result<Vec<f64>> {
    let n = d.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "LOF neighbor count must be in 1..={}, got {k}",
            n.saturating_sub(1)
        )));
    }
    let hoods: Vec<KNeighborhood> = (0..n)
        .into_par_iter()
        .map(|p| k_neighborhood(d, p, k))
        .collect();
    let e = d.entries();
    let lrd: Vec<f64> = (0..n)
        .map(|p| {
            let h = &hoods[p];
            let reach: f64 = h
                .members
                .iter()
                .map(|&o| e[(p, o)].max(hoods[o].k_distance))
                .sum();
            1.0 / (reach / h.members.len() as f64 + DENSITY_EPS)
        })
        .collect();
    Ok((0..n)
        .map(|p| {
            let h = &hoods[p];
            let ratio: f64 = h.members.iter().map(|&o| lrd[o]).sum();
            ratio / h.members.len() as f64 / lrd[p]
        })
        .collect())
}
