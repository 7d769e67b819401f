//! Locality grids and weighting measures over `(0, 1]`.
//!
//! The sample local depth is a step function of the locality level: it only
//! changes when the neighborhood gains a point. For a sample of size `n` and a
//! minimum neighborhood size `n0`, the grid levels are `(n0 + l) / n` for
//! `l = 0..b`, with `b = n - n0 + 1`, and level `l` covers the interval
//! `((n0 + l - 1) / n, (n0 + l) / n]`. Weights are the mass a measure `W`
//! assigns to each interval.
//!
//! Internally everything is computed in grid units (`beta * n`) so that the
//! common weightings resolve to exact fractions.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default minimum neighborhood size for spatial depth.
pub const DEFAULT_MIN_POINTS: usize = 3;

/// Slack used when mapping a locality level onto the grid, so that values such
/// as `0.3 * 10 = 3.0000000000000004` land on the intended step.
const GRID_SNAP_TOL: f64 = 1e-9;

/// Number of points in a `beta`-neighborhood of a sample of size `n`:
/// `ceil(n * beta)`, at least 1 and at most `n`.
pub fn neighborhood_size(n: usize, beta: f64) -> usize {
    let k = snap_units(beta * n as f64).ceil();
    (k.max(1.0) as usize).min(n)
}

fn snap_units(u: f64) -> f64 {
    let r = u.round();
    if (u - r).abs() <= GRID_SNAP_TOL {
        r
    } else {
        u
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalityGrid {
    n: usize,
    n0: usize,
}

impl LocalityGrid {
    pub fn new(n: usize, n0: usize) -> Result<Self> {
        if n0 == 0 || n < n0 {
            return Err(Error::InvalidGrid { n, n0 });
        }
        Ok(Self { n, n0 })
    }

    /// Grid with the default minimum of three points.
    pub fn with_default_min(n: usize) -> Result<Self> {
        Self::new(n, DEFAULT_MIN_POINTS)
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    pub fn min_points(&self) -> usize {
        self.n0
    }

    /// Number of levels `b`.
    pub fn len(&self) -> usize {
        self.n - self.n0 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Level `l` (0-based): `(n0 + l) / n`.
    pub fn level(&self, l: usize) -> f64 {
        (self.n0 + l) as f64 / self.n as f64
    }

    pub fn levels(&self) -> Vec<f64> {
        (0..self.len()).map(|l| self.level(l)).collect()
    }

    /// Lower end of the first integration interval, `(n0 - 1) / n`.
    pub fn beta0(&self) -> f64 {
        (self.n0 - 1) as f64 / self.n as f64
    }

    /// Neighborhood size at level `l`: `n0 + l`.
    pub fn neighborhood_size(&self, l: usize) -> usize {
        self.n0 + l
    }

    /// Index of the smallest level `>= beta`, clamped to the grid.
    pub fn level_index(&self, beta: f64) -> usize {
        let k = snap_units(beta * self.n as f64).ceil();
        let k = if k.is_finite() { k.max(0.0) as usize } else { self.n };
        k.clamp(self.n0, self.n) - self.n0
    }
}

/// A probability measure over locality levels.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// Uniform density on `(lower, upper]`; `lower = None` means the grid's `beta0`.
    Uniform { lower: Option<f64>, upper: f64 },
    /// All mass at the grid level containing `at`.
    Point { at: f64 },
    /// Raw non-negative per-level weights, normalized on resolution.
    Custom(Vec<f64>),
}

impl WeightSpec {
    /// Uniform weighting over every level.
    pub fn full() -> Self {
        WeightSpec::Uniform {
            lower: None,
            upper: 1.0,
        }
    }

    /// Uniform weighting from `beta0` up to `upper`.
    pub fn up_to(upper: f64) -> Self {
        WeightSpec::Uniform { lower: None, upper }
    }

    /// Parses the CLI grammar `uniform:B0,B1 | point:B | file:<path>`. `B0` may be
    /// `auto` for the grid's `beta0`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidWeights(format!("cannot parse weight spec '{s}'"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "uniform" => {
                let (lo, hi) = rest.split_once(',').ok_or_else(bad)?;
                let lower = match lo.trim() {
                    "auto" | "" => None,
                    v => Some(v.parse::<f64>().map_err(|_| bad())?),
                };
                let upper = hi.trim().parse::<f64>().map_err(|_| bad())?;
                Ok(WeightSpec::Uniform { lower, upper })
            }
            "point" => Ok(WeightSpec::Point {
                at: rest.trim().parse().map_err(|_| bad())?,
            }),
            "file" => Self::from_file(rest),
            _ => Err(bad()),
        }
    }

    /// Reads custom weights, one non-negative value per line.
    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut weights = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let w = line.parse::<f64>().map_err(|e| Error::Parse {
                path: path.display().to_string(),
                line: i as u64 + 1,
                column: "1".into(),
                message: e.to_string(),
            })?;
            weights.push(w);
        }
        Ok(WeightSpec::Custom(weights))
    }

    /// Per-level weights on `grid`, summing to one.
    pub fn resolve(&self, grid: &LocalityGrid) -> Result<LevelWeights> {
        let b = grid.len();
        let n = grid.n as f64;
        let mut w = vec![0.0; b];
        match *self {
            WeightSpec::Uniform { lower, upper } => {
                if !(upper > 0.0 && upper <= 1.0 + GRID_SNAP_TOL) {
                    return Err(Error::InvalidWeights(format!(
                        "upper locality {upper} outside (0, 1]"
                    )));
                }
                let first = (grid.n0 - 1) as f64;
                let lo = match lower {
                    Some(l) if !l.is_finite() || l < 0.0 => {
                        return Err(Error::InvalidWeights(format!(
                            "lower locality {l} is negative"
                        )))
                    }
                    Some(l) if l >= upper => {
                        return Err(Error::InvalidWeights(format!(
                            "empty locality range ({l}, {upper}]"
                        )))
                    }
                    Some(l) => snap_units(l * n).max(first),
                    None => first,
                };
                let hi = (grid.n0 + grid.level_index(upper)) as f64;
                if hi <= lo {
                    return Err(Error::InvalidWeights(format!(
                        "empty locality range ({:?}, {upper}]",
                        lower
                    )));
                }
                let span = hi - lo;
                for (l, wl) in w.iter_mut().enumerate() {
                    let a = (grid.n0 + l - 1) as f64;
                    let overlap = (a + 1.0).min(hi) - a.max(lo);
                    if overlap > 0.0 {
                        *wl = overlap / span;
                    }
                }
            }
            WeightSpec::Point { at } => {
                if !(at > 0.0 && at <= 1.0 + GRID_SNAP_TOL) {
                    return Err(Error::InvalidWeights(format!(
                        "locality {at} outside (0, 1]"
                    )));
                }
                w[grid.level_index(at)] = 1.0;
            }
            WeightSpec::Custom(ref raw) => {
                if raw.len() != b {
                    return Err(Error::WeightLength {
                        expected: b,
                        found: raw.len(),
                    });
                }
                if raw.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidWeights(
                        "custom weights must be finite and non-negative".into(),
                    ));
                }
                let total: f64 = raw.iter().sum();
                if total <= 0.0 {
                    return Err(Error::InvalidWeights("custom weights sum to zero".into()));
                }
                for (wl, r) in w.iter_mut().zip(raw) {
                    *wl = r / total;
                }
            }
        }
        Ok(LevelWeights(w))
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WeightSpec::parse(s)
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Uniform { lower: None, upper } => write!(f, "uniform:auto,{upper}"),
            WeightSpec::Uniform {
                lower: Some(l),
                upper,
            } => write!(f, "uniform:{l},{upper}"),
            WeightSpec::Point { at } => write!(f, "point:{at}"),
            WeightSpec::Custom(w) => write!(f, "custom[{}]", w.len()),
        }
    }
}

/// Resolved per-level weights (non-negative, summing to one).
#[derive(Debug, Clone, PartialEq)]
pub struct LevelWeights(Vec<f64>);

impl LevelWeights {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the last level with positive weight.
    pub fn last_positive(&self) -> Option<usize> {
        self.0.iter().rposition(|&w| w > 0.0)
    }
}
