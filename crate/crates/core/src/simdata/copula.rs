//! Bivariate t-copula sampling.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Bivariate t-copula with correlation `rho` and `df` degrees of freedom.
#[derive(Debug, Clone)]
pub struct TCopula {
    rho: f64,
    df: f64,
    chi: ChiSquared<f64>,
    marginal: StudentsT,
}

impl TCopula {
    pub fn new(rho: f64, df: f64) -> Result<Self> {
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::InvalidParameter(format!("copula correlation must be in (-1, 1), got {rho}")));
        }
        let bad_df = || Error::InvalidParameter(format!("degrees of freedom must be positive, got {df}"));
        let chi = ChiSquared::new(df).map_err(|_| bad_df())?;
        let marginal = StudentsT::new(0.0, 1.0, df).map_err(|_| bad_df())?;
        Ok(Self { rho, df, chi, marginal })
    }

    /// Elliptical copulas satisfy `tau = 2 asin(rho) / pi`.
    pub fn from_kendall_tau(tau: f64, df: f64) -> Result<Self> {
        Self::new((std::f64::consts::FRAC_PI_2 * tau).sin(), df)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn df(&self) -> f64 {
        self.df
    }

    /// One draw on `[0, 1]²`: a correlated t vector pushed through the t CDF.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let z1: f64 = StandardNormal.sample(rng);
        let e: f64 = StandardNormal.sample(rng);
        let z2 = self.rho * z1 + (1.0 - self.rho * self.rho).sqrt() * e;
        let w = self.chi.sample(rng);
        let s = (w / self.df).sqrt();
        [self.marginal.cdf(z1 / s), self.marginal.cdf(z2 / s)]
    }
}

/// Kendall's tau-a of paired samples, `O(n²)`.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut concordant = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let s = (a[i] - a[j]) * (b[i] - b[j]);
            if s > 0.0 {
                concordant += 1;
            } else if s < 0.0 {
                concordant -= 1;
            }
        }
    }
    2.0 * concordant as f64 / (n * (n - 1)) as f64
}
