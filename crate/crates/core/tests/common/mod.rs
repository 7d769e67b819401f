//! Brute-force reference implementations. They share no code with the crate:
//! reflection sets are materialized, every neighborhood is rebuilt from
//! scratch per level, and LOF is evaluated straight from its definition.
#![allow(dead_code)]

use std::cmp::Ordering;

use localdepth::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform data on `[-1, 1]^d`.
pub fn uniform_data(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Dataset {
    let coords = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    Dataset::new(d, coords).unwrap()
}

pub fn points(x: &Dataset) -> Vec<Vec<f64>> {
    x.points().map(<[f64]>::to_vec).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// `1 - |mean of u(z - y)|` over the `y` that differ from `z`; 1 when none do.
pub fn spatial_depth(z: &[f64], sample: &[Vec<f64>]) -> f64 {
    let d = z.len();
    let mut sum = vec![0.0; d];
    let mut m = 0usize;
    for y in sample {
        let r = dist(z, y);
        if r == 0.0 {
            continue;
        }
        for k in 0..d {
            sum[k] += (z[k] - y[k]) / r;
        }
        m += 1;
    }
    if m == 0 {
        return 1.0;
    }
    1.0 - sum.iter().map(|s| (s / m as f64).powi(2)).sum::<f64>().sqrt()
}

/// `X` followed by `2z - X`.
pub fn reflection_set(z: &[f64], sample: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = sample.to_vec();
    out.extend(sample.iter().map(|x| x.iter().zip(z).map(|(a, c)| 2.0 * c - a).collect()));
    out
}

/// Sample indices sorted by depth in the reflection set (descending), then by
/// distance to `z`, then by id; `center` is forced to the front.
pub fn neighborhood_order(z: &[f64], x: &Dataset, center: Option<usize>) -> Vec<usize> {
    let pts = points(x);
    let refl = reflection_set(z, &pts);
    let depth: Vec<f64> = pts.iter().map(|p| spatial_depth(p, &refl)).collect();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| {
        if Some(a) == center {
            return Ordering::Less;
        }
        if Some(b) == center {
            return Ordering::Greater;
        }
        depth[b]
            .partial_cmp(&depth[a])
            .unwrap()
            .then(dist(&pts[a], z).partial_cmp(&dist(&pts[b], z)).unwrap())
            .then(x.id(a).cmp(&x.id(b)))
    });
    order
}

/// Member ids of the `k` deepest points.
pub fn neighborhood_ids(z: &[f64], x: &Dataset, center: Option<usize>, k: usize) -> Vec<u64> {
    neighborhood_order(z, x, center)[..k].iter().map(|&i| x.id(i)).collect()
}

/// LD of `z` at sizes `n0..=n`, each neighborhood rebuilt independently.
pub fn ld_levels(z: &[f64], x: &Dataset, center: Option<usize>, n0: usize) -> Vec<f64> {
    let pts = points(x);
    (n0..=x.len())
        .map(|k| {
            let order = neighborhood_order(z, x, center);
            let hood: Vec<Vec<f64>> = order[..k].iter().map(|&i| pts[i].clone()).collect();
            spatial_depth(z, &hood)
        })
        .collect()
}

/// Uniform weights on sizes `n0..=upper_size`, as a vector over all levels.
pub fn uniform_weights(n: usize, n0: usize, upper_size: usize) -> Vec<f64> {
    let count = (upper_size - n0 + 1) as f64;
    (n0..=n).map(|k| if k <= upper_size { 1.0 / count } else { 0.0 }).collect()
}

pub fn weighted_sum(levels: &[f64], w: &[f64]) -> f64 {
    levels.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// Entry `(i, j)`: sum over levels of `w * LD / size` for levels whose
/// neighborhood of `x_i` contains `x_j`.
pub fn pild_matrix(x: &Dataset, n0: usize, w: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let pts = points(x);
    (0..n)
        .map(|i| {
            let z = &pts[i];
            let levels = ld_levels(z, x, Some(i), n0);
            let mut row = vec![0.0; n];
            for (l, k) in (n0..=n).enumerate() {
                let hood = &neighborhood_order(z, x, Some(i))[..k];
                for &j in hood {
                    row[j] += w[l] * levels[l] / k as f64;
                }
            }
            row
        })
        .collect()
}

/// Textbook LOF over a full dissimilarity matrix.
pub fn lof(d: &[Vec<f64>], k: usize) -> Vec<f64> {
    let n = d.len();
    let k_dist: Vec<f64> = (0..n)
        .map(|p| {
            let mut others: Vec<f64> = (0..n).filter(|&o| o != p).map(|o| d[p][o]).collect();
            others.sort_by(|a, b| a.partial_cmp(b).unwrap());
            others[k - 1]
        })
        .collect();
    let hood = |p: usize| -> Vec<usize> { (0..n).filter(|&o| o != p && d[p][o] <= k_dist[p]).collect() };
    let lrd: Vec<f64> = (0..n)
        .map(|p| {
            let h = hood(p);
            let mean = h.iter().map(|&o| d[p][o].max(k_dist[o])).sum::<f64>() / h.len() as f64;
            1.0 / (mean + 1e-10)
        })
        .collect();
    (0..n)
        .map(|p| {
            let h = hood(p);
            h.iter().map(|&o| lrd[o] / lrd[p]).sum::<f64>() / h.len() as f64
        })
        .collect()
}

pub fn euclidean(x: &Dataset) -> Vec<Vec<f64>> {
    let pts = points(x);
    pts.iter().map(|a| pts.iter().map(|b| dist(a, b)).collect()).collect()
}

/// Kendall's tau-a from all ordered pairs.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += ((a[i] - a[j]).signum() * (b[i] - b[j]).signum()) * f64::from(a[i] != a[j] && b[i] != b[j]);
            }
        }
    }
    s / (n * (n - 1)) as f64
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}
