//! Stratified k-fold cross-validation over one classifier parameter.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{accuracy, predict_grid, Family, LabeledDataset};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Locality values `0.025, 0.05, ..., 1`.
pub fn default_locality_grid() -> Vec<f64> {
    (1..=40).map(|i| i as f64 * 0.025).collect()
}

/// Neighbor counts `1..=n/4`.
pub fn default_k_grid(n: usize) -> Vec<f64> {
    (1..=(n / 4).max(1)).map(|k| k as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub family: Family,
    pub params: Vec<f64>,
    /// `fold_accuracies[f][p]`.
    pub fold_accuracies: Vec<Vec<f64>>,
    pub mean_accuracies: Vec<f64>,
    pub selected: f64,
    /// Accuracy on held-out test data after refitting with `selected`.
    pub final_accuracy: Option<f64>,
}

/// Fold index per training point; each group is shuffled and dealt round-robin.
fn stratified_folds(train: &LabeledDataset, folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = train.labels();
    let mut assignment = vec![0; train.len()];
    let mut offset = 0;
    for g in 1..=train.num_groups() {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == g).collect();
        members.shuffle(&mut rng);
        for (pos, &i) in members.iter().enumerate() {
            assignment[i] = (offset + pos) % folds;
        }
        offset += members.len();
    }
    assignment
}

/// Chooses the parameter with the best mean fold accuracy; ties go to the
/// smallest parameter value.
pub fn cross_validate(
    train: &LabeledDataset,
    family: Family,
    params: &[f64],
    folds: usize,
    seed: u64,
) -> Result<CvReport> {
    if params.is_empty() {
        return Err(Error::InvalidParameter("empty parameter grid".into()));
    }
    if folds < 2 || folds > train.len() {
        return Err(Error::InvalidParameter(format!(
            "fold count must be in 2..={}, got {folds}",
            train.len()
        )));
    }
    let assignment = stratified_folds(train, folds, seed);
    let labels = train.labels();
    let mut fold_accuracies = Vec::with_capacity(folds);
    for f in 0..folds {
        let (held, kept): (Vec<usize>, Vec<usize>) = (0..train.len()).partition(|&i| assignment[i] == f);
        let fit = train.subset(&kept)?;
        let queries = train.data().subset(&held);
        let truth: Vec<usize> = held.iter().map(|&i| labels[i]).collect();
        let preds = predict_grid(family, &fit, &queries, params)?;
        fold_accuracies.push(preds.iter().map(|p| accuracy(p, &truth)).collect::<Vec<_>>());
    }
    let mean_accuracies: Vec<f64> = (0..params.len())
        .map(|p| fold_accuracies.iter().map(|a| a[p]).sum::<f64>() / folds as f64)
        .collect();
    let mut best = 0;
    for p in 1..params.len() {
        let better = mean_accuracies[p] > mean_accuracies[best];
        let tie_smaller = mean_accuracies[p] == mean_accuracies[best] && params[p] < params[best];
        if better || tie_smaller {
            best = p;
        }
    }
    Ok(CvReport {
        family,
        params: params.to_vec(),
        fold_accuracies,
        mean_accuracies,
        selected: params[best],
        final_accuracy: None,
    })
}

/// Cross-validates on `train`, then scores the labeled `test` set with the
/// selected parameter fitted on all of `train`.
pub fn evaluate(
    train: &LabeledDataset,
    test: &Dataset,
    family: Family,
    params: &[f64],
    folds: usize,
    seed: u64,
) -> Result<CvReport> {
    let truth = test
        .labels()
        .ok_or_else(|| Error::InvalidLabels("test data has no labels".into()))?
        .to_vec();
    let mut report = cross_validate(train, family, params, folds, seed)?;
    let preds = predict_grid(family, train, test, &[report.selected])?;
    report.final_accuracy = Some(accuracy(&preds[0], &truth));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn blobs(seed: u64, n: usize, shift: f64) -> LabeledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coords = Vec::new();
        let mut labels = Vec::new();
        for g in 0..2 {
            for _ in 0..n {
                coords.push(rng.random_range(-1.0..1.0) + g as f64 * shift);
                coords.push(rng.random_range(-1.0..1.0));
                labels.push(g + 1);
            }
        }
        LabeledDataset::new(Dataset::new(2, coords).unwrap().with_labels(labels).unwrap()).unwrap()
    }

    #[test]
    fn folds_are_stratified() {
        let train = blobs(1, 23, 5.0);
        let a = stratified_folds(&train, 5, 9);
        for f in 0..5 {
            for g in 1..=2 {
                let c = (0..train.len())
                    .filter(|&i| a[i] == f && train.labels()[i] == g)
                    .count();
                assert!((4..=5).contains(&c));
            }
        }
    }

    #[test]
    fn perfect_classifier_selects_smallest_parameter() {
        let train = blobs(2, 20, 50.0);
        let params = [0.5, 0.3, 0.9];
        let r = cross_validate(&train, Family::MaxIld, &params, 5, 0).unwrap();
        assert!(r.mean_accuracies.iter().all(|&a| a == 1.0));
        assert_eq!(r.selected, 0.3);
    }

    #[test]
    fn reruns_are_identical() {
        let train = blobs(3, 30, 1.0);
        let grid = default_k_grid(train.len());
        let a = cross_validate(&train, Family::DKnn, &grid, 5, 42).unwrap();
        let b = cross_validate(&train, Family::DKnn, &grid, 5, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(grid.len(), 15);
    }

    #[test]
    fn evaluate_reports_test_accuracy() {
        let train = blobs(4, 20, 6.0);
        let test = blobs(5, 10, 6.0);
        let r = evaluate(&train, test.data(), Family::MaxLd, &default_locality_grid(), 5, 1).unwrap();
        assert_eq!(r.final_accuracy, Some(1.0));
        assert_eq!(r.params.len(), 40);
        assert!((r.params[39] - 1.0).abs() < 1e-15);
    }
}
