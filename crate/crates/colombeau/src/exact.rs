//! Exact generalized numbers: finite signed power sums in eps.
//!
//! An [`ExactNet`] is a finite sum `c_1*eps^a_1 + ... + c_t*eps^a_t` with
//! nonzero real coefficients and strictly increasing real exponents; the
//! empty sum is zero. On this backend the leading exponent *is* the
//! valuation, so order, invertibility, and the sharp norm are all decided
//! exactly instead of being estimated from samples.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One monomial `coeff * eps^expo`; `coeff` is never zero in a stored net.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticTerm {
    pub coeff: f64,
    pub expo: f64,
}

/// A finite asymptotic power sum in eps, sorted by strictly increasing
/// exponent. Empty means zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExactNet {
    terms: Vec<AsymptoticTerm>,
}

impl ExactNet {
    /// The zero net (empty sum).
    pub fn zero() -> ExactNet {
        ExactNet { terms: Vec::new() }
    }

    /// The constant net `c * eps^0`.
    pub fn constant(c: f64) -> ExactNet {
        ExactNet::from_terms(vec![(c, 0.0)]).expect("finite constant")
    }

    /// The net `eps^a`, written `deps^a` when viewed as a generalized number.
    pub fn eps_power(a: f64) -> ExactNet {
        ExactNet::from_terms(vec![(1.0, a)]).expect("finite exponent")
    }

    /// Build from (coeff, expo) pairs: merges equal exponents, drops zero
    /// coefficients, sorts, and rejects non-finite inputs.
    pub fn from_terms(pairs: Vec<(f64, f64)>) -> Result<ExactNet> {
        for &(c, a) in &pairs {
            if !c.is_finite() || !a.is_finite() {
                return Err(Error::PreconditionError(format!(
                    "exact terms must be finite, got {c} * eps^{a}"
                )));
            }
        }
        let mut sorted = pairs;
        sorted.sort_by(|x, y| x.1.partial_cmp(&y.1).expect("finite exponents"));
        let mut terms: Vec<AsymptoticTerm> = Vec::with_capacity(sorted.len());
        for (c, a) in sorted {
            match terms.last_mut() {
                Some(t) if t.expo == a => t.coeff += c,
                _ => terms.push(AsymptoticTerm { coeff: c, expo: a }),
            }
        }
        terms.retain(|t| t.coeff != 0.0);
        Ok(ExactNet { terms })
    }

    pub fn terms(&self) -> &[AsymptoticTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Leading (smallest-exponent) term, if any.
    pub fn leading(&self) -> Option<AsymptoticTerm> {
        self.terms.first().copied()
    }

    /// Exact valuation: the leading exponent; `None` encodes +infinity.
    pub fn valuation(&self) -> Option<f64> {
        self.leading().map(|t| t.expo)
    }

    pub fn neg(&self) -> ExactNet {
        ExactNet {
            terms: self.terms.iter().map(|t| AsymptoticTerm { coeff: -t.coeff, expo: t.expo }).collect(),
        }
    }

    pub fn add(&self, other: &ExactNet) -> ExactNet {
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(self.terms.len() + other.terms.len());
        pairs.extend(self.terms.iter().map(|t| (t.coeff, t.expo)));
        pairs.extend(other.terms.iter().map(|t| (t.coeff, t.expo)));
        ExactNet::from_terms(pairs).expect("terms of valid nets are finite")
    }

    pub fn sub(&self, other: &ExactNet) -> ExactNet {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ExactNet) -> ExactNet {
        let mut pairs = Vec::with_capacity(self.terms.len() * other.terms.len());
        for s in &self.terms {
            for o in &other.terms {
                pairs.push((s.coeff * o.coeff, s.expo + o.expo));
            }
        }
        ExactNet::from_terms(pairs).expect("products of finite terms are finite")
    }

    pub fn scale(&self, c: f64) -> ExactNet {
        if c == 0.0 {
            return ExactNet::zero();
        }
        ExactNet {
            terms: self.terms.iter().map(|t| AsymptoticTerm { coeff: c * t.coeff, expo: t.expo }).collect(),
        }
    }

    /// Nonnegative integer power.
    pub fn powi(&self, k: u32) -> ExactNet {
        let mut acc = ExactNet::constant(1.0);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Eventual absolute value: flips the sign when the net is eventually
    /// negative; as a generalized number this is |x|.
    pub fn abs(&self) -> ExactNet {
        match self.leading() {
            Some(t) if t.coeff < 0.0 => self.neg(),
            _ => self.clone(),
        }
    }

    /// Exact division; only defined when `other` is a single monomial.
    pub fn div(&self, other: &ExactNet) -> Result<ExactNet> {
        if other.terms.len() != 1 {
            return Err(Error::PreconditionError(
                "exact division needs a monomial divisor; use the sampled backend otherwise".into(),
            ));
        }
        let d = other.terms[0];
        ExactNet::from_terms(self.terms.iter().map(|t| (t.coeff / d.coeff, t.expo - d.expo)).collect())
    }

    /// Exact square root; only defined for a single monomial with positive
    /// coefficient (or zero).
    pub fn sqrt(&self) -> Result<ExactNet> {
        if self.is_zero() {
            return Ok(ExactNet::zero());
        }
        if self.terms.len() != 1 || self.terms[0].coeff < 0.0 {
            return Err(Error::PreconditionError(
                "exact square root needs a single nonnegative monomial".into(),
            ));
        }
        let t = self.terms[0];
        ExactNet::from_terms(vec![(t.coeff.sqrt(), t.expo / 2.0)])
    }

    /// Exact real power; only defined for a single monomial with positive
    /// coefficient (or zero with a positive exponent).
    pub fn powf(&self, p: f64) -> Result<ExactNet> {
        if p == 0.0 {
            return Ok(ExactNet::constant(1.0));
        }
        if self.is_zero() {
            if p > 0.0 {
                return Ok(ExactNet::zero());
            }
            return Err(Error::PreconditionError("zero raised to a negative power".into()));
        }
        if self.terms.len() != 1 || self.terms[0].coeff <= 0.0 {
            return Err(Error::PreconditionError(
                "exact real power needs a single positive monomial".into(),
            ));
        }
        let t = self.terms[0];
        ExactNet::from_terms(vec![(t.coeff.powf(p), t.expo * p)])
    }

    /// Whether the net is eventually strictly positive with invertible size,
    /// i.e. the leading coefficient is positive.
    pub fn strictly_positive(&self) -> bool {
        matches!(self.leading(), Some(t) if t.coeff > 0.0)
    }

    /// Least integer m with `self_eps > eps^m` for all small eps; exists
    /// exactly when the net is strictly positive.
    pub fn positivity_witness(&self) -> Option<i32> {
        match self.leading() {
            Some(t) if t.coeff > 0.0 => Some(t.expo.floor() as i32 + 1),
            _ => None,
        }
    }

    /// Total order on the exact backend: self <= other eventually.
    pub fn leq(&self, other: &ExactNet) -> bool {
        let d = other.sub(self);
        match d.leading() {
            None => true,
            Some(t) => t.coeff > 0.0,
        }
    }

    /// Least integer N >= 0 with `eps^N <= self_eps` eventually; `None` when
    /// the net is not strictly positive.
    pub fn least_power_below(&self) -> Option<i32> {
        let t = self.leading()?;
        if t.coeff <= 0.0 {
            return None;
        }
        // The leading exponent pins the answer to within one; lower-order
        // terms decide ties, so compare the full nets.
        let n = t.expo.ceil().max(0.0) as i32;
        if ExactNet::eps_power(n as f64).leq(self) {
            Some(n)
        } else {
            Some(n + 1)
        }
    }

    /// Least integer N >= 0 with `|self_eps| <= eps^-N` eventually; this is
    /// the sharp-boundedness witness of the net.
    pub fn least_sharp_bound(&self) -> i32 {
        let Some(t) = self.leading() else { return 0 };
        let n = (-t.expo).ceil().max(0.0) as i32;
        if self.abs().leq(&ExactNet::eps_power(-(n as f64))) {
            n
        } else {
            n + 1
        }
    }

    /// Evaluate the net at a concrete eps > 0.
    pub fn eval(&self, eps: f64) -> f64 {
        self.terms.iter().map(|t| t.coeff * eps.powf(t.expo)).sum()
    }

    /// Evaluate as (sign, ln|value|) without under- or overflow; used when
    /// sampling exact nets onto a grid.
    pub fn eval_log(&self, log_eps: f64) -> (i8, f64) {
        if self.terms.is_empty() {
            return (0, f64::NEG_INFINITY);
        }
        // Signed log-sum-exp over the term logs, accumulated relative to the
        // dominant term with ln_1p so that perturbations far below the float
        // precision of the dominant magnitude keep their effect on the log.
        let logs: Vec<(f64, f64)> = self
            .terms
            .iter()
            .map(|t| (t.coeff.signum(), t.coeff.abs().ln() + t.expo * log_eps))
            .collect();
        let (t, &(top_sign, top)) = logs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .expect("nonempty term list");
        if top == f64::NEG_INFINITY {
            return (0, f64::NEG_INFINITY);
        }
        let rest: f64 = logs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != t)
            .map(|(_, &(s, l))| top_sign * s * (l - top).exp())
            .sum();
        if rest == -1.0 {
            (0, f64::NEG_INFINITY)
        } else if rest > -1.0 {
            (top_sign as i8, top + rest.ln_1p())
        } else {
            (-top_sign as i8, top + (-1.0 - rest).ln())
        }
    }
}

impl fmt::Display for ExactNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let c = if i == 0 {
                t.coeff
            } else {
                f.write_str(if t.coeff < 0.0 { " - " } else { " + " })?;
                t.coeff.abs()
            };
            if t.expo == 0.0 {
                write!(f, "{c}")?;
            } else if c == 1.0 {
                write!(f, "eps^{}", t.expo)?;
            } else {
                write!(f, "{c}*eps^{}", t.expo)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(pairs: &[(f64, f64)]) -> ExactNet {
        ExactNet::from_terms(pairs.to_vec()).unwrap()
    }

    #[test]
    fn square_of_inverse_plus_one() {
        // (eps^-1 + 1)^2 = eps^-2 + 2*eps^-1 + 1
        let x = net(&[(1.0, -1.0), (1.0, 0.0)]);
        let sq = x.mul(&x);
        assert_eq!(sq, net(&[(1.0, -2.0), (2.0, -1.0), (1.0, 0.0)]));
    }

    #[test]
    fn addition_cancels_terms() {
        let x = net(&[(1.0, 1.0), (2.0, 2.0)]);
        let y = net(&[(-1.0, 1.0), (3.0, 0.5)]);
        assert_eq!(x.add(&y), net(&[(3.0, 0.5), (2.0, 2.0)]));
        assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn valuation_is_leading_exponent() {
        assert_eq!(net(&[(5.0, 2.0), (3.0, -1.0)]).valuation(), Some(-1.0));
        assert_eq!(ExactNet::zero().valuation(), None);
    }

    #[test]
    fn positivity_and_witness() {
        let x = ExactNet::eps_power(3.0);
        assert!(x.strictly_positive());
        assert_eq!(x.positivity_witness(), Some(4));
        assert!(!x.neg().strictly_positive());
        assert_eq!(net(&[(2.0, -1.5)]).positivity_witness(), Some(-1));
        // The witness really is a lower bound: x - eps^m stays positive.
        let m = x.positivity_witness().unwrap();
        assert!(ExactNet::eps_power(m as f64).leq(&x));
    }

    #[test]
    fn total_order() {
        let x = net(&[(1.0, 1.0)]);
        let y = net(&[(1.0, 0.0)]);
        assert!(x.leq(&y)); // eps <= 1 eventually
        assert!(!y.leq(&x));
        assert!(x.leq(&x));
    }

    #[test]
    fn dominating_witnesses() {
        assert_eq!(ExactNet::eps_power(2.0).least_power_below(), Some(2));
        assert_eq!(net(&[(0.5, 2.0)]).least_power_below(), Some(3));
        assert_eq!(net(&[(2.0, 2.0)]).least_power_below(), Some(2));
        assert_eq!(net(&[(1.0, -2.5)]).least_power_below(), Some(0));
        assert_eq!(ExactNet::zero().least_power_below(), None);

        assert_eq!(net(&[(1.0, -3.0)]).least_sharp_bound(), 3);
        assert_eq!(net(&[(1.0, -2.5)]).least_sharp_bound(), 3);
        assert_eq!(net(&[(5.0, -2.0)]).least_sharp_bound(), 3);
        assert_eq!(ExactNet::constant(1.0).least_sharp_bound(), 0);
        assert_eq!(ExactNet::constant(5.0).least_sharp_bound(), 1);
        assert_eq!(ExactNet::zero().least_sharp_bound(), 0);
    }

    #[test]
    fn division_and_sqrt_on_monomials() {
        let x = net(&[(4.0, 2.0), (2.0, 3.0)]);
        let d = x.div(&net(&[(2.0, 1.0)])).unwrap();
        assert_eq!(d, net(&[(2.0, 1.0), (1.0, 2.0)]));
        assert!(x.div(&x).is_err());
        assert_eq!(net(&[(4.0, 2.0)]).sqrt().unwrap(), net(&[(2.0, 1.0)]));
        assert!(net(&[(-4.0, 2.0)]).sqrt().is_err());
    }

    #[test]
    fn log_evaluation_matches_plain_evaluation() {
        let x = net(&[(3.0, -1.0), (-5.0, 2.0)]);
        for &eps in &[0.5f64, 0.125, 1e-3] {
            let (s, l) = x.eval_log(eps.ln());
            let v = s as f64 * l.exp();
            assert!((v - x.eval(eps)).abs() <= 1e-12 * x.eval(eps).abs());
        }
        assert_eq!(ExactNet::zero().eval_log(0.5f64.ln()), (0, f64::NEG_INFINITY));
        // Exact cancellation at a specific eps shows up as sign 0.
        let y = net(&[(1.0, 1.0), (-0.5, 0.0)]);
        assert_eq!(y.eval_log(0.5f64.ln()).0, 0);
    }

    #[test]
    fn display_round_trip_shape() {
        let x = net(&[(3.0, -1.0), (5.0, 2.0)]);
        assert_eq!(x.to_string(), "3*eps^-1 + 5*eps^2");
        assert_eq!(ExactNet::zero().to_string(), "0");
    }
}
