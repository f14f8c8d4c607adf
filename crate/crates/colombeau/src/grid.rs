//! Geometric evaluation grids for the parameter interval (0, 1].
//!
//! Sampled computations live on the finite grid eps_k = base^-k with
//! k = k_min..=k_max. Asymptotic questions ("eventually", valuations,
//! positivity witnesses) are answered on the tail half of the grid, where
//! the limiting behaviour of a net is assumed to show.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid eps_k = base^-k for k in [k_min, k_max]; strictly decreasing in k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonGrid {
    base: f64,
    k_min: u32,
    k_max: u32,
}

/// Fewest grid points a usable grid may have.
pub const MIN_GRID_POINTS: usize = 8;

impl EpsilonGrid {
    /// Build a grid; requires base > 1, k_min >= 1, and at least
    /// [`MIN_GRID_POINTS`] points.
    pub fn new(base: f64, k_min: u32, k_max: u32) -> Result<EpsilonGrid> {
        if !(base > 1.0) || !base.is_finite() {
            return Err(Error::PreconditionError(format!(
                "grid base must be a finite number > 1, got {base}"
            )));
        }
        if k_min < 1 {
            return Err(Error::PreconditionError(
                "k_min must be at least 1 so every grid point lies in (0, 1)".into(),
            ));
        }
        if k_max < k_min || (k_max - k_min + 1) < MIN_GRID_POINTS as u32 {
            return Err(Error::PreconditionError(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got k range [{k_min}, {k_max}]"
            )));
        }
        Ok(EpsilonGrid { base, k_min, k_max })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn k_min(&self) -> u32 {
        self.k_min
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Exponent k at grid index i (index 0 is the largest eps).
    pub fn k_at(&self, i: usize) -> u32 {
        debug_assert!(i < self.len());
        self.k_min + i as u32
    }

    /// eps value at grid index i.
    pub fn eps(&self, i: usize) -> f64 {
        self.base.powi(-(self.k_at(i) as i32))
    }

    /// ln(eps) at grid index i, computed without underflow.
    pub fn log_eps(&self, i: usize) -> f64 {
        -(self.k_at(i) as f64) * self.base.ln()
    }

    /// Indices of the tail half of the grid (smallest eps values).
    pub fn tail(&self) -> std::ops::Range<usize> {
        self.len() / 2..self.len()
    }

    /// All indices.
    pub fn indices(&self) -> std::ops::Range<usize> {
        0..self.len()
    }
}

impl Default for EpsilonGrid {
    /// The stock grid: eps_k = 2^-k for k = 4..=48.
    fn default() -> EpsilonGrid {
        EpsilonGrid { base: 2.0, k_min: 4, k_max: 48 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = EpsilonGrid::default();
        assert_eq!(g.len(), 45);
        assert_eq!(g.eps(0), 2f64.powi(-4));
        assert_eq!(g.eps(g.len() - 1), 2f64.powi(-48));
        assert!(g.tail().contains(&30));
        assert!(!g.tail().contains(&21));
    }

    #[test]
    fn log_eps_matches_eps() {
        let g = EpsilonGrid::default();
        for i in g.indices() {
            assert!((g.log_eps(i) - g.eps(i).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(EpsilonGrid::new(1.0, 4, 48).is_err());
        assert!(EpsilonGrid::new(2.0, 0, 48).is_err());
        assert!(EpsilonGrid::new(2.0, 4, 9).is_err());
        assert!(EpsilonGrid::new(2.0, 4, 11).is_ok());
    }
}
