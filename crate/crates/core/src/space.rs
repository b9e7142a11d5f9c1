use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance below which an equality residual counts as satisfied.
pub const DEFAULT_EQUALITY_TOLERANCE: f64 = 1e-4;

/// Box-bounded search space with an optional integer mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
    integer_mask: Vec<bool>,
    equality_tolerance: f64,
}

impl SearchSpace {
    /// Continuous space. Fails unless `lower[d] < upper[d]` for every dimension.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let dim = lower.len();
        Self::with_integers(lower, upper, vec![false; dim])
    }

    pub fn with_integers(lower: Vec<f64>, upper: Vec<f64>, integer_mask: Vec<bool>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidConfig("search space needs at least one dimension".into()));
        }
        if upper.len() != lower.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if integer_mask.len() != lower.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: integer_mask.len(),
            });
        }
        for (d, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidConfig(format!(
                    "dimension {d}: lower bound {lo} must be below upper bound {hi}"
                )));
            }
        }
        Ok(Self {
            lower,
            upper,
            integer_mask,
            equality_tolerance: DEFAULT_EQUALITY_TOLERANCE,
        })
    }

    /// Uniform bounds repeated over `dim` dimensions.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn with_equality_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "equality tolerance must be positive, got {tolerance}"
            )));
        }
        self.equality_tolerance = tolerance;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn integer_mask(&self) -> &[bool] {
        &self.integer_mask
    }

    pub fn equality_tolerance(&self) -> f64 {
        self.equality_tolerance
    }

    pub fn integer_count(&self) -> usize {
        self.integer_mask.iter().filter(|&&b| b).count()
    }

    fn check_len(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    /// Clamps every coordinate into `[lower, upper]` (min against the upper
    /// bound first, then max against the lower bound).
    pub fn clamp_position(&self, position: &[f64]) -> Result<Vec<f64>> {
        self.check_len(position.len())?;
        let mut out = position.to_vec();
        self.clamp_position_in_place(&mut out);
        Ok(out)
    }

    pub(crate) fn clamp_position_in_place(&self, position: &mut [f64]) {
        for ((x, lo), hi) in position.iter_mut().zip(&self.lower).zip(&self.upper) {
            *x = x.min(*hi).max(*lo);
        }
    }

    /// Clamps each velocity component to `±fraction·(upper − lower)`.
    pub fn clamp_velocity(&self, velocity: &[f64], fraction: f64) -> Result<Vec<f64>> {
        self.check_len(velocity.len())?;
        check_fraction(fraction)?;
        let mut out = velocity.to_vec();
        self.clamp_velocity_in_place(&mut out, fraction);
        Ok(out)
    }

    pub(crate) fn clamp_velocity_in_place(&self, velocity: &mut [f64], fraction: f64) {
        for ((v, lo), hi) in velocity.iter_mut().zip(&self.lower).zip(&self.upper) {
            let bound = fraction * (hi - lo);
            *v = v.min(bound).max(-bound);
        }
    }

    pub fn contains(&self, position: &[f64]) -> bool {
        position.len() == self.dim()
            && position
                .iter()
                .zip(&self.lower)
                .zip(&self.upper)
                .all(|((x, lo), hi)| lo <= x && x <= hi)
    }
}

pub(crate) fn check_fraction(fraction: f64) -> Result<()> {
    if fraction > 0.0 && fraction <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "velocity bound fraction must lie in (0, 1], got {fraction}"
        )))
    }
}
