//! Seeded generators for the two-class simulation setups and the outlier toy
//! examples.

mod copula;
mod replicate;

pub use copula::{kendall_tau, TCopula};
pub use replicate::{replicate, Summary};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::{squared_distance, Dataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Two Gaussians, identity and correlated covariance.
    Setup1,
    /// Two interleaved uniform half-moons.
    Setup2,
    /// Overlapping Gaussians with different spreads.
    Setup3,
    /// Uniform ring around a mixture of two uniform-radius balls.
    Setup4,
    /// t-copula inliers with uniformly scattered outliers.
    ToyA,
    /// Four Gaussian inlier modes with outlier modes between them.
    ToyB,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Setup1,
        Scenario::Setup2,
        Scenario::Setup3,
        Scenario::Setup4,
        Scenario::ToyA,
        Scenario::ToyB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Setup1 => "setup1",
            Scenario::Setup2 => "setup2",
            Scenario::Setup3 => "setup3",
            Scenario::Setup4 => "setup4",
            Scenario::ToyA => "toyA",
            Scenario::ToyB => "toyB",
        }
    }

    pub fn is_outlier_scenario(self) -> bool {
        matches!(self, Scenario::ToyA | Scenario::ToyB)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

/// Scenario plus sample sizes and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    /// Classification setups: training points per class.
    pub train_per_class: usize,
    /// Classification setups: test points per class.
    pub test_per_class: usize,
    /// Outlier scenarios: inlier count (split evenly across modes for toyB).
    pub inliers: usize,
    /// Outlier scenarios: outlier count.
    pub outliers: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Default sizes: 200 + 100 per class, or 400 inliers and 100 outliers.
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Self {
            scenario,
            train_per_class: 200,
            test_per_class: 100,
            inliers: 400,
            outliers: 100,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = if self.scenario.is_outlier_scenario() {
            self.inliers > 0 && self.outliers > 0
        } else {
            self.train_per_class > 0 && self.test_per_class > 0
        };
        if !ok {
            return Err(Error::InvalidParameter("scenario counts must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    /// Labels 1 and 2 for the two classes.
    Classification { train: Dataset, test: Dataset },
    /// Inliers first, then outliers.
    Outlier { data: Dataset, is_outlier: Vec<bool> },
}

/// Lower-triangular factor of a 2×2 covariance, with mean, for sampling.
#[derive(Debug, Clone, Copy)]
struct Gaussian2 {
    mean: [f64; 2],
    l: [f64; 3],
}

impl Gaussian2 {
    fn new(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Self {
        let l11 = cov[0][0].sqrt();
        let l21 = cov[1][0] / l11;
        let l22 = (cov[1][1] - l21 * l21).sqrt();
        Self {
            mean,
            l: [l11, l21, l22],
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        [
            self.mean[0] + self.l[0] * a,
            self.mean[1] + self.l[1] * a + self.l[2] * b,
        ]
    }
}

fn half_moon<R: Rng + ?Sized>(rng: &mut R, class: usize) -> [f64; 2] {
    let u: f64 = rng.random_range(-1.0..1.0);
    let h = 1.0 - u * u;
    let v = if h > 0.0 { rng.random_range(h..2.0 * h) } else { 0.0 };
    if class == 0 {
        [u, v]
    } else {
        [-0.5 + u + 0.5 * v, 2.0 + 0.5 * u - v]
    }
}

fn polar<R: Rng + ?Sized>(rng: &mut R, r: f64) -> [f64; 2] {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    [r * theta.cos(), r * theta.sin()]
}

fn ring_or_balls<R: Rng + ?Sized>(rng: &mut R, class: usize) -> [f64; 2] {
    if class == 0 {
        // area-uniform on 1 <= r <= 2
        let r = rng.random_range(1.0f64..4.0).sqrt();
        polar(rng, r.clamp(1.0, 2.0))
    } else {
        let radius = if rng.random_bool(0.7) { 1.7 } else { 1.0 };
        let r = rng.random_range(0.0..radius);
        polar(rng, r)
    }
}

fn classification<R: Rng + ?Sized>(rng: &mut R, spec: &ScenarioSpec) -> Result<Generated> {
    let g = match spec.scenario {
        Scenario::Setup1 => Some([
            Gaussian2::new([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]]),
            Gaussian2::new([2.0, 2.0], [[2.0, 1.0], [1.0, 1.0]]),
        ]),
        Scenario::Setup3 => Some([
            Gaussian2::new([0.0, 0.0], [[1.0, 1.0], [1.0, 2.0]]),
            Gaussian2::new([1.0, 1.0], [[4.0, 4.0], [4.0, 12.0]]),
        ]),
        _ => None,
    };
    let draw = |rng: &mut R, class: usize| match spec.scenario {
        Scenario::Setup2 => half_moon(rng, class),
        Scenario::Setup4 => ring_or_balls(rng, class),
        _ => g.expect("gaussian setup")[class].sample(rng),
    };
    let make = |rng: &mut R, per_class: usize| {
        let mut coords = Vec::with_capacity(4 * per_class);
        let mut labels = Vec::with_capacity(2 * per_class);
        for class in 0..2 {
            for _ in 0..per_class {
                coords.extend(draw(rng, class));
                labels.push(class + 1);
            }
        }
        Dataset::new(2, coords)?.with_labels(labels)
    };
    let train = make(rng, spec.train_per_class)?;
    let test = make(rng, spec.test_per_class)?;
    Ok(Generated::Classification { train, test })
}

const TOY_A_TAU: f64 = 0.0638;
const TOY_A_DF: f64 = 1.0;
const TOY_A_EXCLUSION: f64 = 0.1;
const TOY_A_MAX_ATTEMPTS: usize = 1_000_000;

fn toy_a<R: Rng + ?Sized>(rng: &mut R, spec: &ScenarioSpec) -> Result<Vec<[f64; 2]>> {
    let copula = TCopula::from_kendall_tau(TOY_A_TAU, TOY_A_DF)?;
    let mut points: Vec<[f64; 2]> = (0..spec.inliers).map(|_| copula.sample(rng)).collect();
    let limit = TOY_A_EXCLUSION * TOY_A_EXCLUSION;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < spec.outliers {
        if attempts == TOY_A_MAX_ATTEMPTS {
            return Err(Error::InvalidParameter(format!(
                "could not place {} outliers in {TOY_A_MAX_ATTEMPTS} attempts",
                spec.outliers
            )));
        }
        attempts += 1;
        let p = [rng.random_range(-0.2..2.0), rng.random_range(-0.2..2.0)];
        if points[..spec.inliers].iter().all(|q| squared_distance(&p, q) >= limit) {
            points.push(p);
            accepted += 1;
        }
    }
    Ok(points)
}

/// Divides `total` over `parts` as evenly as possible, earlier parts first.
fn split_even(total: usize, parts: usize) -> impl Iterator<Item = usize> {
    (0..parts).map(move |i| total / parts + usize::from(i < total % parts))
}

fn toy_b<R: Rng + ?Sized>(rng: &mut R, spec: &ScenarioSpec) -> Vec<[f64; 2]> {
    let inlier_means = [[4.0, 4.0], [-4.0, 4.0], [-4.0, -4.0], [4.0, -4.0]];
    let outlier_means = [[0.0, 5.0], [-5.0, 0.0], [0.0, -5.0], [5.0, 0.0]];
    let mut points = Vec::with_capacity(spec.inliers + spec.outliers);
    for (means, var, total) in [
        (inlier_means, 1.0, spec.inliers),
        (outlier_means, 2.0, spec.outliers),
    ] {
        for (mean, count) in means.iter().zip(split_even(total, 4)) {
            let g = Gaussian2::new(*mean, [[var, 0.0], [0.0, var]]);
            points.extend((0..count).map(|_| g.sample(rng)));
        }
    }
    points
}

fn generate_with<R: Rng + ?Sized>(rng: &mut R, spec: &ScenarioSpec) -> Result<Generated> {
    spec.validate()?;
    let points = match spec.scenario {
        Scenario::ToyA => toy_a(rng, spec)?,
        Scenario::ToyB => toy_b(rng, spec),
        _ => return classification(rng, spec),
    };
    let is_outlier = (0..points.len()).map(|i| i >= spec.inliers).collect();
    Ok(Generated::Outlier {
        data: Dataset::from_rows(&points)?,
        is_outlier,
    })
}

/// Random stream for replicate `rep`; replicate 0 is the plain seeded stream.
pub fn replicate_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

pub fn generate(spec: &ScenarioSpec) -> Result<Generated> {
    generate_replicate(spec, 0)
}

pub fn generate_replicate(spec: &ScenarioSpec, rep: u64) -> Result<Generated> {
    generate_with(&mut replicate_rng(spec.seed, rep), spec)
}
