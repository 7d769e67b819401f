//! Independent seeded replications of an experiment with summary statistics.

use rayon::prelude::*;

use super::{generate_replicate, Generated, ScenarioSpec};
use crate::error::Result;

/// Per-replicate values of one metric and their location summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub values: Vec<f64>,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

impl Summary {
    pub fn from_values(values: Vec<f64>) -> Self {
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Self {
            mean,
            median: quantile(&sorted, 0.5),
            q1: quantile(&sorted, 0.25),
            q3: quantile(&sorted, 0.75),
            values,
        }
    }

    /// Number of replicates where this metric is strictly above `other`'s.
    pub fn wins_over(&self, other: &Summary) -> usize {
        self.values.iter().zip(&other.values).filter(|(a, b)| a > b).count()
    }
}

/// Linear interpolation between order statistics (the common "type 7" rule).
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Runs `experiment` on `reps` independently generated datasets and summarizes
/// each metric it returns. Replicate `r` draws from stream `r` of the spec's
/// seed, so results do not depend on scheduling.
pub fn replicate<F>(spec: &ScenarioSpec, reps: usize, experiment: F) -> Result<Vec<Summary>>
where
    F: Fn(usize, &Generated) -> Result<Vec<f64>> + Sync,
{
    let per_rep: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|r| experiment(r, &generate_replicate(spec, r as u64)?))
        .collect::<Result<_>>()?;
    let metrics = per_rep.first().map_or(0, Vec::len);
    Ok((0..metrics)
        .map(|m| Summary::from_values(per_rep.iter().map(|v| v[m]).collect()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simdata::{generate, Scenario};

    fn first_coord(g: &Generated) -> f64 {
        match g {
            Generated::Classification { train, .. } => train.point(0)[0],
            Generated::Outlier { data, .. } => data.point(0)[0],
        }
    }

    #[test]
    fn quartiles() {
        let s = Summary::from_values(vec![4.0, 1.0, 3.0, 2.0, 5.0]);
        assert_eq!((s.q1, s.median, s.q3, s.mean), (2.0, 3.0, 4.0, 3.0));
        let s = Summary::from_values(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!((s.q1, s.median, s.q3), (1.75, 2.5, 3.25));
    }

    #[test]
    fn one_rep_is_a_direct_run() {
        let spec = ScenarioSpec::new(Scenario::ToyB, 21);
        let s = replicate(&spec, 1, |_, g| Ok(vec![first_coord(g)])).unwrap();
        assert_eq!(s[0].values, vec![first_coord(&generate(&spec).unwrap())]);
    }

    #[test]
    fn same_seed_same_summary() {
        let spec = ScenarioSpec::new(Scenario::Setup2, 22);
        let f = |_: usize, g: &Generated| Ok(vec![first_coord(g), 1.0]);
        assert_eq!(replicate(&spec, 6, f).unwrap(), replicate(&spec, 6, f).unwrap());
    }
}
