//! Depth-based classifiers: max-depth, max local depth, max integrated local
//! depth, depth-based nearest neighbors, and average PILD contribution.

mod cv;

pub use cv::{cross_validate, default_k_grid, default_locality_grid, evaluate, CvReport};

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::depth::spatial_depth;
use crate::error::{Error, Result};
use crate::locality::{LocalityGrid, WeightSpec, DEFAULT_MIN_POINTS};
use crate::pild::PildBasis;
use crate::profile::{levels_from_row, DepthProfile};
use crate::reflection::Reflector;

/// Training data split into groups `1..=G`.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    data: Dataset,
    groups: Vec<Dataset>,
}

impl LabeledDataset {
    /// Requires labels covering every group `1..=G` with `G >= 2`.
    pub fn new(data: Dataset) -> Result<Self> {
        let labels = data
            .labels()
            .ok_or_else(|| Error::InvalidLabels("training data has no labels".into()))?;
        let g = *labels.iter().max().expect("non-empty dataset");
        if g < 2 {
            return Err(Error::InvalidLabels(format!("need at least 2 groups, found {g}")));
        }
        let mut members = vec![Vec::new(); g];
        for (i, &l) in labels.iter().enumerate() {
            members[l - 1].push(i);
        }
        if let Some(empty) = members.iter().position(Vec::is_empty) {
            return Err(Error::GroupTooSmall {
                group: empty + 1,
                size: 0,
                min: 1,
            });
        }
        let groups = members.iter().map(|m| data.subset(m)).collect();
        Ok(Self { data, groups })
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn labels(&self) -> &[usize] {
        self.data.labels().expect("validated on construction")
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    /// Points of group `g` (1-based).
    pub fn group(&self, g: usize) -> &Dataset {
        &self.groups[g - 1]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::new(self.data.subset(indices))
    }
}

/// Families of classifiers sharing one tuning parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// No parameter.
    MaxDepth,
    /// Locality level `β`.
    MaxLd,
    /// Upper bound `B` of uniform weights.
    MaxIld,
    /// Number of neighbors `k`.
    DKnn,
    /// Upper bound `B` of uniform weights; 1 for the full range.
    Pild,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::MaxDepth => "md",
            Family::MaxLd => "ld",
            Family::MaxIld => "ild",
            Family::DKnn => "dknn",
            Family::Pild => "pild",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "md" => Ok(Family::MaxDepth),
            "ld" => Ok(Family::MaxLd),
            "ild" => Ok(Family::MaxIld),
            "dknn" => Ok(Family::DKnn),
            "pild" => Ok(Family::Pild),
            other => Err(Error::InvalidParameter(format!("unknown classifier '{other}'"))),
        }
    }
}

/// A fully parameterized classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassifierSpec {
    MaxDepth,
    MaxLd { beta: f64 },
    MaxIld { upper: f64 },
    DKnn { k: usize },
    Pild { upper: f64 },
}

impl ClassifierSpec {
    pub fn new(family: Family, param: f64) -> Self {
        match family {
            Family::MaxDepth => ClassifierSpec::MaxDepth,
            Family::MaxLd => ClassifierSpec::MaxLd { beta: param },
            Family::MaxIld => ClassifierSpec::MaxIld { upper: param },
            Family::DKnn => ClassifierSpec::DKnn { k: param as usize },
            Family::Pild => ClassifierSpec::Pild { upper: param },
        }
    }

    pub fn family(&self) -> Family {
        match self {
            ClassifierSpec::MaxDepth => Family::MaxDepth,
            ClassifierSpec::MaxLd { .. } => Family::MaxLd,
            ClassifierSpec::MaxIld { .. } => Family::MaxIld,
            ClassifierSpec::DKnn { .. } => Family::DKnn,
            ClassifierSpec::Pild { .. } => Family::Pild,
        }
    }

    pub fn param(&self) -> f64 {
        match *self {
            ClassifierSpec::MaxDepth => 1.0,
            ClassifierSpec::MaxLd { beta } => beta,
            ClassifierSpec::MaxIld { upper } | ClassifierSpec::Pild { upper } => upper,
            ClassifierSpec::DKnn { k } => k as f64,
        }
    }
}

/// Predicted group with the per-group scores it was chosen from.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// 1-based group index.
    pub group: usize,
    pub scores: Vec<f64>,
}

impl Prediction {
    /// Arg-max of `scores`, ties to the smaller group.
    pub fn from_scores(scores: Vec<f64>) -> Self {
        let mut best = 0;
        for (g, s) in scores.iter().enumerate() {
            if *s > scores[best] {
                best = g;
            }
        }
        Self {
            group: best + 1,
            scores,
        }
    }
}

fn check_bounds(param: f64) -> Result<()> {
    if !(param > 0.0 && param <= 1.0) {
        return Err(Error::InvalidParameter(format!("locality must be in (0, 1], got {param}")));
    }
    Ok(())
}

fn check_params(family: Family, train: &LabeledDataset, params: &[f64]) -> Result<()> {
    for &p in params {
        match family {
            Family::MaxDepth => {}
            Family::DKnn => {
                if p < 1.0 || p.fract() != 0.0 || p as usize > train.len() {
                    return Err(Error::InvalidParameter(format!(
                        "k must be an integer in 1..={}, got {p}",
                        train.len()
                    )));
                }
            }
            _ => check_bounds(p)?,
        }
    }
    if matches!(family, Family::MaxLd | Family::MaxIld) {
        for g in 1..=train.num_groups() {
            let size = train.group(g).len();
            if size < DEFAULT_MIN_POINTS {
                return Err(Error::GroupTooSmall {
                    group: g,
                    size,
                    min: DEFAULT_MIN_POINTS,
                });
            }
        }
    }
    Ok(())
}

/// Scores of every query for every parameter: `out[p][q][g]`.
///
/// Work that does not depend on the parameter (profiles, reflected orders,
/// the joint PILD basis) is done once per query.
pub fn score_grid(
    family: Family,
    train: &LabeledDataset,
    queries: &Dataset,
    params: &[f64],
) -> Result<Vec<Vec<Vec<f64>>>> {
    if queries.dim() != train.data().dim() {
        return Err(Error::DimensionMismatch {
            expected: train.data().dim(),
            found: queries.dim(),
        });
    }
    check_params(family, train, params)?;
    let g_count = train.num_groups();
    let per_query: Vec<Vec<Vec<f64>>> = match family {
        Family::MaxDepth => queries
            .points()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|z| {
                let s = (1..=g_count)
                    .map(|g| spatial_depth(z, train.group(g)).map(|d| d.depth))
                    .collect::<Result<Vec<_>>>()?;
                Ok(vec![s; params.len()])
            })
            .collect::<Result<_>>()?,
        Family::MaxLd | Family::MaxIld => {
            let groups: Vec<&Dataset> = (1..=g_count).map(|g| train.group(g)).collect();
            let reflectors = groups
                .iter()
                .map(|x| Reflector::new(x))
                .collect::<Result<Vec<_>>>()?;
            let grids = groups
                .iter()
                .map(|x| LocalityGrid::with_default_min(x.len()))
                .collect::<Result<Vec<_>>>()?;
            let weights = if family == Family::MaxIld {
                grids
                    .iter()
                    .map(|grid| {
                        params
                            .iter()
                            .map(|&b| WeightSpec::up_to(b).resolve(grid))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?
            } else {
                Vec::new()
            };
            (0..queries.len())
                .into_par_iter()
                .map(|q| {
                    let z = queries.point(q);
                    let profiles: Vec<DepthProfile> = (0..g_count)
                        .map(|g| {
                            let row = reflectors[g].row(z)?;
                            let ld = levels_from_row(z, groups[g], &row, &grids[g]);
                            Ok(DepthProfile::from_levels(None, ld))
                        })
                        .collect::<Result<_>>()?;
                    params
                        .iter()
                        .enumerate()
                        .map(|(p, &param)| {
                            (0..g_count)
                                .map(|g| match family {
                                    Family::MaxLd => Ok(profiles[g].ld_at(&grids[g], param)),
                                    _ => profiles[g].sild(&weights[g][p]),
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect::<Result<_>>()?
        }
        Family::DKnn => {
            let reflector = Reflector::new(train.data())?;
            let labels = train.labels();
            (0..queries.len())
                .into_par_iter()
                .map(|q| {
                    let row = reflector.row(queries.point(q))?;
                    let mut counts = vec![vec![0usize; g_count]; train.len() + 1];
                    for (r, &i) in row.order().iter().enumerate() {
                        counts[r + 1] = counts[r].clone();
                        counts[r + 1][labels[i] - 1] += 1;
                    }
                    Ok(params
                        .iter()
                        .map(|&k| {
                            let k = k as usize;
                            counts[k].iter().map(|&c| c as f64 / k as f64).collect()
                        })
                        .collect())
                })
                .collect::<Result<_>>()?
        }
        Family::Pild => {
            let out = pild_scores(train, queries, params)?;
            // reorder from [p][q][g] to [q][p][g] to share the transpose below
            (0..queries.len())
                .map(|q| out.iter().map(|per_p| per_p[q].clone()).collect())
                .collect()
        }
    };
    Ok((0..params.len())
        .map(|p| per_query.iter().map(|per_p| per_p[p].clone()).collect())
        .collect())
}

/// Average contribution of each group's training rows to every query's column
/// of the joint matrix over training and query points: `out[p][q][g]`.
fn pild_scores(train: &LabeledDataset, queries: &Dataset, params: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let joint = train.data().stack(queries)?;
    let basis = PildBasis::with_default_min(&joint)?;
    let n = train.len();
    let labels = train.labels();
    let g_count = train.num_groups();
    let sizes: Vec<f64> = (1..=g_count).map(|g| train.group(g).len() as f64).collect();
    params
        .iter()
        .map(|&b| {
            let p = basis.matrix(&WeightSpec::up_to(b))?;
            let e = p.entries();
            Ok((0..queries.len())
                .map(|q| {
                    let mut sums = vec![0.0; g_count];
                    for i in 0..n {
                        sums[labels[i] - 1] += e[(i, n + q)];
                    }
                    sums.iter().zip(&sizes).map(|(s, m)| s / m).collect()
                })
                .collect())
        })
        .collect()
}

/// Predictions for every parameter: `out[p][q]`.
pub fn predict_grid(
    family: Family,
    train: &LabeledDataset,
    queries: &Dataset,
    params: &[f64],
) -> Result<Vec<Vec<Prediction>>> {
    Ok(score_grid(family, train, queries, params)?
        .into_iter()
        .map(|per_q| per_q.into_iter().map(Prediction::from_scores).collect())
        .collect())
}

pub fn predict(spec: ClassifierSpec, train: &LabeledDataset, queries: &Dataset) -> Result<Vec<Prediction>> {
    Ok(predict_grid(spec.family(), train, queries, &[spec.param()])?
        .pop()
        .expect("one parameter"))
}

fn single(spec: ClassifierSpec, z: &[f64], train: &LabeledDataset) -> Result<Prediction> {
    let q = Dataset::new(z.len(), z.to_vec())?;
    Ok(predict(spec, train, &q)?.pop().expect("one query"))
}

/// Group of maximal spatial depth.
pub fn classify_max_depth(z: &[f64], train: &LabeledDataset) -> Result<Prediction> {
    single(ClassifierSpec::MaxDepth, z, train)
}

/// Group of maximal `β`-local depth, each group on its own grid.
pub fn classify_max_ld(z: &[f64], train: &LabeledDataset, beta: f64) -> Result<Prediction> {
    single(ClassifierSpec::MaxLd { beta }, z, train)
}

/// Group of maximal integrated local depth under uniform weights up to `upper`.
pub fn classify_max_ild(z: &[f64], train: &LabeledDataset, upper: f64) -> Result<Prediction> {
    single(ClassifierSpec::MaxIld { upper }, z, train)
}

/// Majority label among the `k` pooled training points deepest in the
/// reflection through `z`.
pub fn classify_dknn(z: &[f64], train: &LabeledDataset, k: usize) -> Result<Prediction> {
    single(ClassifierSpec::DKnn { k }, z, train)
}

/// Group with the largest average contribution to each query's column.
pub fn classify_pild(queries: &Dataset, train: &LabeledDataset, upper: f64) -> Result<Vec<Prediction>> {
    predict(ClassifierSpec::Pild { upper }, train, queries)
}

/// Fraction of predictions matching `truth` (1-based groups).
pub fn accuracy(predictions: &[Prediction], truth: &[usize]) -> f64 {
    let hits = predictions
        .iter()
        .zip(truth)
        .filter(|(p, &t)| p.group == t)
        .count();
    hits as f64 / truth.len() as f64
}
