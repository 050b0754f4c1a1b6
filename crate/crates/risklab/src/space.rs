//! Finite probability spaces and payoff vectors.
//!
//! A [`ProbSpace`] is a finite sample space with strictly positive outcome
//! probabilities; a [`Position`] is a real payoff vector indexed by outcomes.
//! With every atom carrying positive mass, almost-sure statements collapse to
//! pointwise ones and essential bounds are plain min/max.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Tolerance on the probability sum at load time; entries are renormalized
/// exactly afterwards.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Default multiplicative scalings (all > 1) probed by star-shapedness and
/// positive-homogeneity checks.
pub const DEFAULT_SCALING_GRID: [f64; 5] = [1.0 + 1.0 / 16.0, 1.5, 2.0, 4.0, 16.0];

/// Default convex-combination weights probed by convexity checks.
pub const DEFAULT_WEIGHT_GRID: [f64; 3] = [0.25, 0.5, 0.75];

/// Finite probability space with strictly positive atom probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbSpace {
    probs: Vec<f64>,
}

impl ProbSpace {
    /// Validates and renormalizes a probability vector.
    ///
    /// Zero-probability outcomes are rejected rather than supported: the
    /// pointwise reading of almost-sure statements needs every atom charged.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::config("probability space needs at least 1 outcome"));
        }
        for (i, p) in probs.iter().enumerate() {
            if !p.is_finite() || *p <= 0.0 {
                return Err(Error::config(format!(
                    "probability at outcome {i} must be finite and strictly positive, got {p}"
                )));
            }
            if *p > 1.0 {
                return Err(Error::config(format!(
                    "probability at outcome {i} exceeds 1, got {p}"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::config(format!(
                "probabilities sum to {sum}, outside 1 +/- {PROB_SUM_TOL}"
            )));
        }
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(ProbSpace { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        ProbSpace::new(vec![1.0 / n as f64; n.max(1)])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Builds a position bound to this space.
    pub fn position(&self, values: Vec<f64>) -> Result<Position> {
        let x = Position::new(values)?;
        self.check_position(&x)?;
        Ok(x)
    }

    pub fn constant(&self, c: f64) -> Position {
        Position {
            values: vec![c; self.len()],
        }
    }

    pub fn zero(&self) -> Position {
        self.constant(0.0)
    }

    pub fn check_position(&self, x: &Position) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Expectation under the space's measure.
    pub fn expectation(&self, x: &Position) -> Result<f64> {
        self.check_position(x)?;
        Ok(self.probs.iter().zip(x.values()).map(|(p, v)| p * v).sum())
    }

    /// Essential bounds `(inf, sup)`; with all atoms charged these are the
    /// plain componentwise min and max.
    pub fn ess_bounds(&self, x: &Position) -> Result<(f64, f64)> {
        self.check_position(x)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in x.values() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok((lo, hi))
    }

    /// Deterministic counter-based draw: the same `(sampler.seed, index)` pair
    /// always yields the same position, regardless of evaluation order.
    pub fn sample_position(&self, sampler: &SamplerConfig, index: u64) -> Position {
        let n = self.len() as u64;
        let values = (0..self.len())
            .map(|j| {
                rng::range(
                    sampler.seed,
                    STREAM_POSITION,
                    index.wrapping_mul(n).wrapping_add(j as u64),
                    sampler.lo,
                    sampler.hi,
                )
            })
            .collect();
        Position { values }
    }
}

const STREAM_POSITION: u64 = 0x70;

/// Payoff vector; entries are finite reals in currency units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position {
    values: Vec<f64>,
}

impl Position {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::config(format!(
                    "payoff at outcome {i} must be finite, got {v}"
                )));
            }
        }
        Ok(Position { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Componentwise `self + c`.
    pub fn shift(&self, c: f64) -> Position {
        Position {
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    /// Componentwise `k * self`.
    pub fn scale(&self, k: f64) -> Position {
        Position {
            values: self.values.iter().map(|v| k * v).collect(),
        }
    }

    /// Componentwise sum.
    pub fn add(&self, other: &Position) -> Result<Position> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(Position {
            values: self
                .values
                .iter()
                .zip(other.values())
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Convex combination `w * self + (1 - w) * other`.
    pub fn combine(&self, w: f64, other: &Position) -> Result<Position> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(Position {
            values: self
                .values
                .iter()
                .zip(other.values())
                .map(|(a, b)| w * a + (1.0 - w) * b)
                .collect(),
        })
    }

    /// Componentwise mathematical floor.
    pub fn floor(&self) -> Position {
        Position {
            values: self.values.iter().map(|v| v.floor()).collect(),
        }
    }

    /// Componentwise absolute value.
    pub fn abs(&self) -> Position {
        Position {
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Position) -> bool {
        self.len() == other.len() && self.values.iter().zip(other.values()).all(|(a, b)| a <= b)
    }
}

/// Deterministic sampling plan shared by the property checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub count: usize,
    pub lo: f64,
    pub hi: f64,
    /// Scalings (> 1) for star-shapedness and positive homogeneity.
    pub scaling_grid: Vec<f64>,
    /// Convex weights in (0, 1).
    pub weight_grid: Vec<f64>,
}

impl SamplerConfig {
    pub fn new(seed: u64, count: usize, lo: f64, hi: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::config("sampler count must be >= 1"));
        }
        if lo > hi {
            return Err(Error::config(format!(
                "sampler range is empty: lo {lo} > hi {hi}"
            )));
        }
        Ok(SamplerConfig {
            seed,
            count,
            lo,
            hi,
            scaling_grid: DEFAULT_SCALING_GRID.to_vec(),
            weight_grid: DEFAULT_WEIGHT_GRID.to_vec(),
        })
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count.max(1);
        self
    }
}
