//! Points of the n-dimensional module over generalized numbers.
//!
//! A point is a coordinate vector of [`GeneralizedNumber`]s. The Euclidean
//! absolute value extends componentwise and generalized balls are decided
//! through the strict-positivity test on the radius gap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::EpsilonGrid;
use crate::number::GeneralizedNumber;
use crate::params::Params;
use crate::tri::Tri;

/// A point of the free module over the generalized numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GPoint {
    coords: Vec<GeneralizedNumber>,
}

impl GPoint {
    pub fn new(coords: Vec<GeneralizedNumber>) -> Result<GPoint> {
        if coords.is_empty() {
            return Err(Error::PreconditionError("a point needs at least one coordinate".into()));
        }
        Ok(GPoint { coords })
    }

    pub fn from_reals(coords: &[f64]) -> Result<GPoint> {
        GPoint::new(coords.iter().map(|&c| GeneralizedNumber::constant(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[GeneralizedNumber] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &GeneralizedNumber {
        &self.coords[i]
    }

    fn check_dim(&self, other: &GPoint) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }

    pub fn add(&self, other: &GPoint, params: &Params) -> Result<GPoint> {
        self.check_dim(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.add(b, params))
            .collect::<Result<Vec<_>>>()?;
        GPoint::new(coords)
    }

    pub fn sub(&self, other: &GPoint, params: &Params) -> Result<GPoint> {
        self.check_dim(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.sub(b, params))
            .collect::<Result<Vec<_>>>()?;
        GPoint::new(coords)
    }

    /// Realize every coordinate at grid index i.
    pub fn values_at(&self, grid: &EpsilonGrid, i: usize) -> Result<Vec<f64>> {
        self.coords.iter().map(|c| c.value_at(grid, i)).collect()
    }

    /// The Euclidean absolute value |x| = sqrt(sum of squares).
    pub fn euclidean_abs(&self, params: &Params) -> Result<GeneralizedNumber> {
        if self.dim() == 1 {
            return Ok(self.coords[0].abs());
        }
        let mut sum = GeneralizedNumber::zero();
        for c in &self.coords {
            sum = sum.add(&c.mul(c, params)?, params)?;
        }
        sum.sqrt(params)
    }

    /// Largest coordinatewise sharp distance; the product ultrametric.
    pub fn sharp_distance(&self, other: &GPoint, params: &Params) -> Result<f64> {
        self.check_dim(other)?;
        let mut best: f64 = 0.0;
        for (a, b) in self.coords.iter().zip(&other.coords) {
            best = best.max(a.sharp_distance(b, params)?);
        }
        Ok(best)
    }
}

/// Decide |y - x| < rho through strict positivity of the gap rho - |y - x|.
pub fn ball_member_point(
    y: &GPoint,
    x: &GPoint,
    rho: &GeneralizedNumber,
    params: &Params,
) -> Result<Tri> {
    let gap = rho.sub(&y.sub(x, params)?.euclidean_abs(params)?, params)?;
    Ok(gap.strictly_positive(params)?.decision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactNet;

    fn p() -> Params {
        Params::default()
    }

    #[test]
    fn euclidean_abs_matches_hand_value() {
        let p = p();
        let x = GPoint::from_reals(&[3.0, 4.0]).unwrap();
        let a = x.euclidean_abs(&p).unwrap();
        let v = a.value_at(&p.grid, 0).unwrap();
        assert!((v - 5.0).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_abs_stays_exact() {
        let p = p();
        let x = GPoint::new(vec![GeneralizedNumber::constant(-2.5)]).unwrap();
        let a = x.euclidean_abs(&p).unwrap();
        assert_eq!(a, GeneralizedNumber::constant(2.5));
    }

    #[test]
    fn ball_membership_is_scale_aware() {
        let p = p();
        let center = GPoint::from_reals(&[0.0, 0.0]).unwrap();
        // An infinitesimal offset sits inside any real-radius ball.
        let eps2 = GeneralizedNumber::Exact(ExactNet::eps_power(2.0));
        let y = GPoint::new(vec![eps2.clone(), eps2]).unwrap();
        let real_radius = GeneralizedNumber::constant(0.1);
        assert_eq!(ball_member_point(&y, &center, &real_radius, &p).unwrap(), Tri::True);
        // But outside a ball of strictly smaller infinitesimal radius.
        let tiny_radius = GeneralizedNumber::eps_power(3.0);
        assert_eq!(ball_member_point(&y, &center, &tiny_radius, &p).unwrap(), Tri::False);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = p();
        let a = GPoint::from_reals(&[1.0]).unwrap();
        let b = GPoint::from_reals(&[1.0, 2.0]).unwrap();
        assert!(matches!(a.sub(&b, &p), Err(Error::DimensionMismatch { .. })));
    }
}
