//! Shared tuning knobs for sampled decisions and the box optimizer.

use serde::{Deserialize, Serialize};

use crate::grid::EpsilonGrid;

/// Budget for the per-eps box optimizer used by extreme values and norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Dense scan points per dimension before refinement.
    pub grid_points: usize,
    /// Number of local refinement starts (best scan point plus random ones).
    pub starts: usize,
    /// Compass-search iterations per start.
    pub iters: usize,
    /// Relative tolerance, in log magnitude, the refinement aims for.
    pub rel_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> OptimizerConfig {
        OptimizerConfig { grid_points: 64, starts: 5, iters: 100, rel_tol: 1e-3 }
    }
}

/// Parameters every sampled (semi-decidable) operation reads.
///
/// `m_max` bounds the integer exponents probed when hunting for positivity
/// or exterior-distance witnesses. `v_cut` clamps estimated valuations:
/// a fitted slope at or above `v_cut` classifies a net as negligible, and
/// slopes below `-v_cut` are treated as not moderate. `residual_tol` is the
/// largest log-log fit residual an estimate may have and still count as
/// reliable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub grid: EpsilonGrid,
    pub m_max: i32,
    pub v_cut: f64,
    pub residual_tol: f64,
    pub max_derivative_order: usize,
    pub seed: u64,
    pub opt: OptimizerConfig,
}

/// Margin, in valuation units, below which sampled infinitesimality and
/// agreement checks refuse to decide.
pub const VALUATION_MARGIN: f64 = 0.05;

/// Hard cap on log-domain magnitudes; beyond it arithmetic reports overflow.
pub const LOG_MAGNITUDE_BUDGET: f64 = 700.0;

impl Default for Params {
    fn default() -> Params {
        Params {
            grid: EpsilonGrid::default(),
            m_max: 12,
            v_cut: 12.0,
            residual_tol: 0.1,
            max_derivative_order: 6,
            seed: 42,
            opt: OptimizerConfig::default(),
        }
    }
}

impl Params {
    /// Integer exponents probed by witness searches: 0..=m_max.
    pub fn witness_range(&self) -> std::ops::RangeInclusive<i32> {
        0..=self.m_max
    }
}
