//! Point sets in R^d with stable ids and optional group labels.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// An ordered set of `n` points in R^d, stored row-major.
///
/// Ids are stable integer identifiers used for output and tie-breaking; they
/// default to `0..n`. Labels, when present, are group indices in `1..=G`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    coords: Vec<f64>,
    ids: Vec<u64>,
    labels: Option<Vec<usize>>,
}

impl Dataset {
    /// Builds a dataset from row-major coordinates with ids `0..n`.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        let n = coords.len() / dim;
        Self::with_ids(dim, coords, (0..n as u64).collect())
    }

    pub fn with_ids(dim: usize, coords: Vec<f64>, ids: Vec<u64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if coords.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if coords.len() != ids.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: ids.len() * dim,
                found: coords.len(),
            });
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: pos / dim });
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for &id in &ids {
            if !seen.insert(id) {
                return Err(Error::DuplicateId(id));
            }
        }
        Ok(Self {
            dim,
            coords,
            ids,
            labels: None,
        })
    }

    /// Builds a dataset from one vector per point.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyDataset)?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    /// Attaches group labels (`1..=G`, one per point).
    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::InvalidLabels(format!(
                "{} labels for {} points",
                labels.len(),
                self.len()
            )));
        }
        if labels.contains(&0) {
            return Err(Error::InvalidLabels("group indices start at 1".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> u64 {
        self.ids[i]
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Rows at `indices`, keeping their ids and labels.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Dataset {
            dim: self.dim,
            coords,
            ids: indices.iter().map(|&i| self.ids[i]).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
        }
    }

    /// Appends `other` below `self` and renumbers ids `0..n+m`. Labels are dropped.
    pub fn stack(&self, other: &Dataset) -> Result<Dataset> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Dataset::new(self.dim, coords)
    }

    /// Applies `f` to every point, keeping ids and labels.
    pub fn map_points<F>(&self, mut f: F) -> Result<Dataset>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        let mut coords = Vec::with_capacity(self.coords.len());
        for p in self.points() {
            let q = f(p);
            if q.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: q.len(),
                });
            }
            coords.extend(q);
        }
        let mut out = Dataset::with_ids(self.dim, coords, self.ids.clone())?;
        out.labels = self.labels.clone();
        Ok(out)
    }

    pub(crate) fn check_dim(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: z.len(),
            });
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
