mod common;

use common::*;
use localdepth::classify::{
    accuracy, classify_dknn, classify_max_depth, classify_max_ild, classify_max_ld, classify_pild, cross_validate,
    evaluate, predict_grid, score_grid, ClassifierSpec, Family, LabeledDataset,
};
use localdepth::{Dataset, Error};
use rand::Rng;

const TOL: f64 = 1e-12;

fn two_groups(seed: u64, sizes: [usize; 2], shift: f64) -> LabeledDataset {
    let mut r = rng(seed);
    let mut coords = Vec::new();
    let mut labels = Vec::new();
    for (g, &m) in sizes.iter().enumerate() {
        for _ in 0..m {
            coords.push(r.random_range(-1.0..1.0) + shift * g as f64);
            coords.push(r.random_range(-1.0..1.0));
            labels.push(g + 1);
        }
    }
    LabeledDataset::new(Dataset::new(2, coords).unwrap().with_labels(labels).unwrap()).unwrap()
}

fn queries(seed: u64, q: usize) -> Dataset {
    let mut r = rng(seed);
    Dataset::new(2, (0..2 * q).map(|_| r.random_range(-1.0..2.0)).collect()).unwrap()
}

fn group_points(train: &LabeledDataset, g: usize) -> Vec<Vec<f64>> {
    points(train.group(g))
}

#[test]
fn max_depth_scores_match_oracle() {
    let train = two_groups(1, [9, 7], 0.8);
    let q = queries(2, 5);
    let scores = score_grid(Family::MaxDepth, &train, &q, &[1.0]).unwrap();
    for (i, z) in q.points().enumerate() {
        let want: Vec<f64> = (1..=2).map(|g| spatial_depth(z, &group_points(&train, g))).collect();
        assert!(max_abs_diff(&scores[0][i], &want) <= TOL);
    }
}

#[test]
fn local_scores_match_oracle() {
    // group sizes 8 and 12 make 0.25, 0.5 and 1 land exactly on both grids
    let train = two_groups(3, [8, 12], 0.6);
    let q = queries(4, 6);
    let params = [0.25, 0.5, 1.0];
    let ld = score_grid(Family::MaxLd, &train, &q, &params).unwrap();
    let ild = score_grid(Family::MaxIld, &train, &q, &params).unwrap();
    for (i, z) in q.points().enumerate() {
        for (p, &b) in params.iter().enumerate() {
            for g in 1..=2 {
                let x = train.group(g);
                let n = x.len();
                let levels = ld_levels(z, x, None, 3);
                let size = ((b * n as f64).round() as usize).max(3);
                assert!((ld[p][i][g - 1] - levels[size - 3]).abs() <= TOL, "ld b {b} g {g}");
                let want = weighted_sum(&levels, &uniform_weights(n, 3, size));
                assert!((ild[p][i][g - 1] - want).abs() <= TOL, "ild b {b} g {g}");
            }
        }
    }
}

#[test]
fn dknn_votes_match_oracle() {
    let train = two_groups(5, [10, 10], 0.5);
    let q = queries(6, 6);
    let ks = [1.0, 3.0, 5.0, 20.0];
    let scores = score_grid(Family::DKnn, &train, &q, &ks).unwrap();
    for (i, z) in q.points().enumerate() {
        let order = neighborhood_order(z, train.data(), None);
        for (p, &k) in ks.iter().enumerate() {
            let k = k as usize;
            let votes: Vec<f64> = (1..=2)
                .map(|g| order[..k].iter().filter(|&&j| train.labels()[j] == g).count() as f64 / k as f64)
                .collect();
            assert_eq!(scores[p][i], votes);
        }
    }
}

#[test]
fn pild_scores_match_oracle_on_joint_sample() {
    let train = two_groups(7, [6, 6], 0.7);
    let q = queries(8, 3);
    let joint = train.data().stack(&q).unwrap();
    let n = joint.len();
    let scores = score_grid(Family::Pild, &train, &q, &[0.4, 1.0]).unwrap();
    for (p, upper_size) in [(0, (0.4 * n as f64).ceil() as usize), (1, n)] {
        let m = pild_matrix(&joint, 3, &uniform_weights(n, 3, upper_size));
        for qi in 0..3 {
            for g in 1..=2 {
                let rows: Vec<usize> = (0..12).filter(|&i| train.labels()[i] == g).collect();
                let want = rows.iter().map(|&i| m[i][12 + qi]).sum::<f64>() / rows.len() as f64;
                assert!((scores[p][qi][g - 1] - want).abs() <= TOL);
            }
        }
    }
}

#[test]
fn single_query_helpers_agree_with_batch() {
    let train = two_groups(9, [15, 15], 1.0);
    let q = queries(10, 4);
    let batch = |spec: ClassifierSpec| localdepth::classify::predict(spec, &train, &q).unwrap();
    let md = batch(ClassifierSpec::MaxDepth);
    let ld = batch(ClassifierSpec::MaxLd { beta: 0.3 });
    let ild = batch(ClassifierSpec::MaxIld { upper: 0.3 });
    let knn = batch(ClassifierSpec::DKnn { k: 4 });
    for (i, z) in q.points().enumerate() {
        assert_eq!(classify_max_depth(z, &train).unwrap(), md[i]);
        assert_eq!(classify_max_ld(z, &train, 0.3).unwrap(), ld[i]);
        assert_eq!(classify_max_ild(z, &train, 0.3).unwrap(), ild[i]);
        assert_eq!(classify_dknn(z, &train, 4).unwrap(), knn[i]);
    }
    assert_eq!(classify_pild(&q, &train, 0.5).unwrap(), batch(ClassifierSpec::Pild { upper: 0.5 }));
}

#[test]
fn separated_groups_are_classified_perfectly() {
    let train = two_groups(11, [30, 30], 10.0);
    let test = two_groups(12, [10, 10], 10.0);
    let truth = test.labels().to_vec();
    for (family, param) in [
        (Family::MaxDepth, 1.0),
        (Family::MaxLd, 0.2),
        (Family::MaxIld, 0.5),
        (Family::DKnn, 5.0),
        (Family::Pild, 0.3),
    ] {
        let preds = predict_grid(family, &train, test.data(), &[param]).unwrap().remove(0);
        assert_eq!(accuracy(&preds, &truth), 1.0, "{family:?}");
    }
}

#[test]
fn cross_validation_is_seeded_and_picks_first_best() {
    let train = two_groups(13, [20, 20], 0.4);
    let params = [0.1, 0.2, 0.5, 1.0];
    let a = cross_validate(&train, Family::MaxIld, &params, 5, 3).unwrap();
    let b = cross_validate(&train, Family::MaxIld, &params, 5, 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.fold_accuracies.len(), 5);
    let best = a.mean_accuracies.iter().cloned().fold(f64::MIN, f64::max);
    let first = a.mean_accuracies.iter().position(|&m| m == best).unwrap();
    assert_eq!(a.selected, params[first]);

    let test = two_groups(14, [10, 10], 0.4);
    let r = evaluate(&train, test.data(), Family::MaxIld, &params, 5, 3).unwrap();
    let preds = predict_grid(Family::MaxIld, &train, test.data(), &[r.selected]).unwrap().remove(0);
    assert_eq!(r.final_accuracy, Some(accuracy(&preds, test.labels())));
}

#[test]
fn invalid_inputs_are_rejected() {
    let train = two_groups(15, [5, 2], 1.0);
    let q = queries(16, 1);
    assert!(matches!(
        score_grid(Family::MaxLd, &train, &q, &[0.5]),
        Err(Error::GroupTooSmall { group: 2, size: 2, .. })
    ));
    assert!(score_grid(Family::MaxIld, &two_groups(15, [5, 5], 1.0), &q, &[0.0]).is_err());
    assert!(score_grid(Family::DKnn, &train, &q, &[1.5]).is_err());
    assert!(score_grid(Family::DKnn, &train, &q, &[8.0]).is_err());
    let q3 = Dataset::new(3, vec![0.0; 3]).unwrap();
    assert!(matches!(score_grid(Family::MaxDepth, &train, &q3, &[1.0]), Err(Error::DimensionMismatch { .. })));
    let one_group = Dataset::new(1, vec![0.0, 1.0]).unwrap().with_labels(vec![1, 1]).unwrap();
    assert!(LabeledDataset::new(one_group).is_err());
}
