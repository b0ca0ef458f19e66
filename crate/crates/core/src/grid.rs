//! Parameter grids for the α (and auxiliary) optimizations.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    #[default]
    Geometric,
}

/// Serializable grid description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl GridSpec {
    /// Grid points. Geometric spacing is applied to `x − offset`, so an α
    /// grid with offset 1 is dense near `α = 1⁺`.
    pub fn values(&self, offset: f64) -> Result<Vec<f64>> {
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return Err(invalid(format!("grid bounds [{}, {}] are not an interval", self.min, self.max)));
        }
        if self.points == 0 {
            return Err(invalid("grid needs at least one point"));
        }
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        let n = self.points - 1;
        Ok(match self.scale {
            Scale::Linear => (0..=n)
                .map(|i| self.min + (self.max - self.min) * i as f64 / n as f64)
                .collect(),
            Scale::Geometric => {
                let (lo, hi) = (self.min - offset, self.max - offset);
                if lo <= 0.0 {
                    return Err(invalid(format!("geometric grid needs min > {offset}")));
                }
                let ratio = (hi / lo).ln() / n as f64;
                (0..=n).map(|i| offset + lo * (ratio * i as f64).exp()).collect()
            }
        })
    }
}

/// Ascending grid of orders `α > 1`.
///
/// The default is 400 points spaced geometrically in `α − 1` on
/// `[1 + 10⁻⁴, 10³]`, refined locally by golden-section search.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid {
    alphas: Vec<f64>,
    exec: Execution,
    refine: bool,
}

impl AlphaGrid {
    pub fn new(mut alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(invalid("alpha grid is empty"));
        }
        if let Some(a) = alphas.iter().find(|a| !(a.is_finite() && **a > 1.0)) {
            return Err(invalid(format!("alpha grid entry {a} is not a finite value > 1")));
        }
        alphas.sort_by(f64::total_cmp);
        alphas.dedup();
        Ok(Self {
            alphas,
            exec: Execution::default(),
            refine: true,
        })
    }

    pub fn geometric(min: f64, max: f64, points: usize) -> Result<Self> {
        Self::from_spec(&GridSpec { min, max, points, scale: Scale::Geometric })
    }

    pub fn linear(min: f64, max: f64, points: usize) -> Result<Self> {
        Self::from_spec(&GridSpec { min, max, points, scale: Scale::Linear })
    }

    pub fn from_spec(spec: &GridSpec) -> Result<Self> {
        Self::new(spec.values(1.0)?)
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn without_refinement(mut self) -> Self {
        self.refine = false;
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.alphas
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    pub fn refines(&self) -> bool {
        self.refine
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.alphas[0]
    }

    pub fn last(&self) -> f64 {
        self.alphas[self.alphas.len() - 1]
    }
}

impl Default for AlphaGrid {
    fn default() -> Self {
        Self::geometric(1.0 + 1e-4, 1e3, 400).expect("default grid is valid")
    }
}

/// `points` evenly spaced values on `[min, max]`.
pub fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![min],
        _ => (0..points)
            .map(|i| min + (max - min) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = AlphaGrid::default();
        assert_eq!(g.len(), 400);
        assert!((g.first() - 1.0001).abs() < 1e-15);
        assert!((g.last() - 1000.0).abs() < 1e-9);
        assert!(g.values().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_orders_at_or_below_one() {
        assert!(AlphaGrid::new(vec![1.0, 2.0]).is_err());
        assert!(AlphaGrid::new(vec![]).is_err());
        assert!(AlphaGrid::geometric(1.0, 2.0, 5).is_err());
    }

    #[test]
    fn linear_spec() {
        let v = GridSpec { min: 0.0, max: 1.0, points: 5, scale: Scale::Linear }.values(0.0).unwrap();
        assert_eq!(v, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
