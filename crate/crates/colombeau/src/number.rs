//! Generalized numbers: the user-facing ring type over both backends.
//!
//! A [`GeneralizedNumber`] is either an exact power sum in eps or a sampled
//! net on a grid. Mixed arithmetic promotes the exact side onto the grid.
//! Order predicates are exact (hence total) on the exact backend and
//! three-valued on the sampled one, where a finite grid can only semi-decide
//! them. The sampled rules, shared by everything downstream:
//!
//! * strict positivity looks for an integer m <= m_max with
//!   `x_eps > eps^m` across the whole grid tail (the classical
//!   characterization of invertible positives by a power-of-eps gap);
//! * `x <= y` tolerates violations below the resolution `eps^v_cut` or
//!   classified negligible, and refutes only when the reversed difference
//!   carries a positivity witness of its own; everything else is reported
//!   undecidable rather than silently false.
//!
//! Two nets that denote the same number but were evaluated through
//! different floating-point routes differ by rounding noise, which the
//! procedures above classify as undecidable, not as equality.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactNet;
use crate::grid::EpsilonGrid;
use crate::params::{Params, VALUATION_MARGIN};
use crate::sampled::{LogSample, SampledNet, Valuation, ValuationEstimate};
use crate::tri::{Tri, Witnessed};

/// An element of the ring of generalized numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum GeneralizedNumber {
    Exact(ExactNet),
    Sampled(SampledNet),
}

use GeneralizedNumber as Gn;

impl GeneralizedNumber {
    pub fn zero() -> Gn {
        Gn::Exact(ExactNet::zero())
    }

    pub fn constant(c: f64) -> Gn {
        Gn::Exact(ExactNet::constant(c))
    }

    /// The number `deps^a`, the class of the net eps -> eps^a.
    pub fn eps_power(a: f64) -> Gn {
        Gn::Exact(ExactNet::eps_power(a))
    }

    pub fn as_exact(&self) -> Option<&ExactNet> {
        match self {
            Gn::Exact(e) => Some(e),
            Gn::Sampled(_) => None,
        }
    }

    pub fn as_sampled(&self) -> Option<&SampledNet> {
        match self {
            Gn::Exact(_) => None,
            Gn::Sampled(s) => Some(s),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Gn::Exact(e) if e.is_zero())
    }

    /// Sample the number at grid index i in (sign, log) form.
    pub fn sample_log(&self, grid: &EpsilonGrid, i: usize) -> Result<LogSample> {
        match self {
            Gn::Exact(e) => {
                let (sign, log_abs) = e.eval_log(grid.log_eps(i));
                Ok(if sign == 0 { LogSample::zero() } else { LogSample { sign, log_abs } })
            }
            Gn::Sampled(s) => {
                if s.grid() != grid {
                    return Err(Error::GridMismatch);
                }
                Ok(s.sample(i))
            }
        }
    }

    /// Sample the number at grid index i as a plain float; magnitudes below
    /// the float range underflow to zero.
    pub fn value_at(&self, grid: &EpsilonGrid, i: usize) -> Result<f64> {
        Ok(self.sample_log(grid, i)?.value())
    }

    /// Push the number onto the configured grid.
    pub fn to_sampled(&self, params: &Params) -> Result<SampledNet> {
        match self {
            Gn::Exact(e) => SampledNet::from_log_fn(params, |_, log_eps| e.eval_log(log_eps)),
            Gn::Sampled(s) => {
                if s.grid() != &params.grid {
                    return Err(Error::GridMismatch);
                }
                Ok(s.clone())
            }
        }
    }

    fn binop(
        &self,
        other: &Gn,
        params: &Params,
        exact_op: impl Fn(&ExactNet, &ExactNet) -> ExactNet,
        sample_op: impl Fn(LogSample, LogSample) -> Result<LogSample>,
    ) -> Result<Gn> {
        match (self, other) {
            (Gn::Exact(a), Gn::Exact(b)) => Ok(Gn::Exact(exact_op(a, b))),
            _ => {
                let a = self.to_sampled(params)?;
                let b = other.to_sampled(params)?;
                Ok(Gn::Sampled(a.map2(&b, params, sample_op)?))
            }
        }
    }

    pub fn add(&self, other: &Gn, params: &Params) -> Result<Gn> {
        self.binop(other, params, ExactNet::add, LogSample::add)
    }

    pub fn sub(&self, other: &Gn, params: &Params) -> Result<Gn> {
        self.add(&other.neg(), params)
    }

    pub fn mul(&self, other: &Gn, params: &Params) -> Result<Gn> {
        self.binop(other, params, ExactNet::mul, LogSample::mul)
    }

    pub fn neg(&self) -> Gn {
        match self {
            Gn::Exact(e) => Gn::Exact(e.neg()),
            Gn::Sampled(s) => {
                Gn::Sampled(s.with_samples(s.samples().iter().map(|&x| x.neg()).collect()))
            }
        }
    }

    /// The absolute value |x|.
    pub fn abs(&self) -> Gn {
        match self {
            Gn::Exact(e) => Gn::Exact(e.abs()),
            Gn::Sampled(s) => {
                Gn::Sampled(s.with_samples(s.samples().iter().map(|&x| x.abs()).collect()))
            }
        }
    }

    /// Division; exact when the divisor is a monomial, otherwise pointwise
    /// on samples. The divisor must not vanish at any grid point.
    pub fn div(&self, other: &Gn, params: &Params) -> Result<Gn> {
        if let (Gn::Exact(a), Gn::Exact(b)) = (self, other) {
            if !b.is_zero() {
                if let Ok(q) = a.div(b) {
                    return Ok(Gn::Exact(q));
                }
            }
        }
        let a = self.to_sampled(params)?;
        let b = other.to_sampled(params)?;
        Ok(Gn::Sampled(a.map2(&b, params, LogSample::div)?))
    }

    /// Square root of a nonnegative number; exact for monomials.
    pub fn sqrt(&self, params: &Params) -> Result<Gn> {
        if let Gn::Exact(e) = self {
            if let Ok(r) = e.sqrt() {
                return Ok(Gn::Exact(r));
            }
        }
        let s = self.to_sampled(params)?;
        Ok(Gn::Sampled(s.map(params, LogSample::sqrt)?))
    }

    /// Valuation v(x): exact on the exact backend, otherwise the tail-half
    /// regression estimate with diagnostics.
    pub fn valuation(&self, params: &Params) -> ValuationEstimate {
        match self {
            Gn::Exact(e) => ValuationEstimate::exact(e.valuation()),
            Gn::Sampled(s) => s.estimate_valuation(params),
        }
    }

    /// The sharp norm |x|_e = e^{-v(x)}.
    pub fn e_norm(&self, params: &Params) -> f64 {
        self.valuation(params).value.e_norm()
    }

    /// Sharp (ultrametric) distance d(x, y) = |x - y|_e.
    pub fn sharp_distance(&self, other: &Gn, params: &Params) -> Result<f64> {
        Ok(self.sub(other, params)?.e_norm(params))
    }

    /// Like [`GeneralizedNumber::sharp_distance`] but keeps the estimate
    /// diagnostics of the difference.
    pub fn sharp_distance_detailed(&self, other: &Gn, params: &Params) -> Result<(f64, ValuationEstimate)> {
        let est = self.sub(other, params)?.valuation(params);
        Ok((est.value.e_norm(), est))
    }

    /// Strict positivity: x >= 0 and x invertible, witnessed by an integer m
    /// with `x_eps > eps^m` eventually.
    pub fn strictly_positive(&self, params: &Params) -> Result<Witnessed> {
        match self {
            Gn::Exact(e) => Ok(match e.positivity_witness() {
                Some(m) => Witnessed::decided_true(m),
                None => Witnessed::decided_false(),
            }),
            Gn::Sampled(s) => {
                if s.grid() != &params.grid {
                    return Err(Error::GridMismatch);
                }
                Ok(sampled_strictly_positive(s, params))
            }
        }
    }

    /// Order test x <= y, up to negligible differences.
    pub fn leq(&self, other: &Gn, params: &Params) -> Result<Tri> {
        if let (Gn::Exact(a), Gn::Exact(b)) = (self, other) {
            return Ok(Tri::from_bool(a.leq(b)));
        }
        let d = other.sub(self, params)?;
        let s = d.to_sampled(params)?;
        Ok(sampled_nonnegative(&s, params))
    }

    /// Whether the number is zero in the ring (its net is negligible).
    pub fn is_negligible(&self, params: &Params) -> Tri {
        match self {
            Gn::Exact(e) => Tri::from_bool(e.is_zero()),
            Gn::Sampled(s) => {
                let est = s.estimate_valuation(params);
                match est.value {
                    Valuation::PlusInfinity => Tri::True,
                    Valuation::Finite(v) => {
                        if est.reliable || v < params.v_cut - 1.0 {
                            Tri::False
                        } else {
                            Tri::Undecidable
                        }
                    }
                }
            }
        }
    }

    /// Whether |x| <= r for every real r > 0.
    pub fn is_infinitesimal(&self, params: &Params) -> Tri {
        match self {
            Gn::Exact(e) => match e.valuation() {
                None => Tri::True,
                Some(v) => Tri::from_bool(v > 0.0),
            },
            Gn::Sampled(s) => {
                let est = s.estimate_valuation(params);
                match est.value {
                    Valuation::PlusInfinity => Tri::True,
                    Valuation::Finite(v) => {
                        if v > VALUATION_MARGIN {
                            Tri::True
                        } else if v < -VALUATION_MARGIN {
                            Tri::False
                        } else {
                            Tri::Undecidable
                        }
                    }
                }
            }
        }
    }

    /// Invertibility; equivalent to strict positivity of |x|.
    pub fn is_invertible(&self, params: &Params) -> Result<Tri> {
        match self {
            Gn::Exact(e) => Ok(Tri::from_bool(!e.is_zero())),
            Gn::Sampled(_) => {
                if self.is_negligible(params).is_true() {
                    return Ok(Tri::False);
                }
                Ok(self.abs().strictly_positive(params)?.decision)
            }
        }
    }
}

/// Search for an integer m <= m_max with `s_k > eps_k^m` at every tail index.
fn search_gap_witness(s: &SampledNet, params: &Params) -> Option<i32> {
    let grid = s.grid();
    'witness: for m in params.witness_range() {
        for i in grid.tail() {
            let smp = s.sample(i);
            if smp.sign <= 0 || smp.log_abs <= m as f64 * grid.log_eps(i) {
                continue 'witness;
            }
        }
        return Some(m);
    }
    None
}

fn sampled_strictly_positive(s: &SampledNet, params: &Params) -> Witnessed {
    if let Some(m) = search_gap_witness(s, params) {
        return Witnessed::decided_true(m);
    }
    // No witness. Decide false only on decisive evidence: an exact zero on
    // the tail, classification as negligible, or a witnessed gap for the
    // negation. Anything else stays undecided rather than silently false.
    if s.grid().tail().any(|i| s.sample(i).is_zero()) {
        return Witnessed::decided_false();
    }
    if s.estimate_valuation(params).value.is_infinite() {
        return Witnessed::decided_false();
    }
    let neg = s.with_samples(s.samples().iter().map(|&x| x.neg()).collect());
    if search_gap_witness(&neg, params).is_some() {
        return Witnessed::decided_false();
    }
    Witnessed::undecidable()
}

/// Tail test for d >= 0 up to negligible defects. True when every tail
/// violation stays below the resolution eps^v_cut or the whole difference is
/// classified negligible; false only when -d carries a positivity witness.
fn sampled_nonnegative(d: &SampledNet, params: &Params) -> Tri {
    let grid = d.grid();
    let within_resolution = grid.tail().all(|i| {
        let smp = d.sample(i);
        smp.sign >= 0 || smp.log_abs <= params.v_cut * grid.log_eps(i)
    });
    if within_resolution {
        return Tri::True;
    }
    if d.estimate_valuation(params).value.is_infinite() {
        return Tri::True;
    }
    let neg = d.with_samples(d.samples().iter().map(|&x| x.neg()).collect());
    if search_gap_witness(&neg, params).is_some() {
        return Tri::False;
    }
    Tri::Undecidable
}

impl From<f64> for GeneralizedNumber {
    fn from(c: f64) -> GeneralizedNumber {
        GeneralizedNumber::constant(c)
    }
}

impl From<ExactNet> for GeneralizedNumber {
    fn from(e: ExactNet) -> GeneralizedNumber {
        GeneralizedNumber::Exact(e)
    }
}

impl fmt::Display for GeneralizedNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gn::Exact(e) => write!(f, "{e}"),
            Gn::Sampled(s) => {
                let est = s.samples().last().map(|x| x.value()).unwrap_or(0.0);
                write!(f, "sampled({} points, last value {est:.3e})", s.samples().len())
            }
        }
    }
}
