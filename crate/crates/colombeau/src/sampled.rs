//! Grid-sampled generalized numbers stored as signed log magnitudes.
//!
//! A [`SampledNet`] records, for every grid point, the sign of the net and
//! ln|value|. Ring operations act pointwise in the log domain so that
//! magnitudes like eps^-12 at eps = 2^-48 stay representable; anything whose
//! log magnitude passes the hard budget of 700 raises
//! [`Error::MagnitudeOverflow`]. Valuations are estimated by a least-squares
//! fit of ln|x_eps| against ln(eps) over the tail half of the grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::EpsilonGrid;
use crate::params::{Params, LOG_MAGNITUDE_BUDGET};

/// One grid sample: sign in {-1, 0, +1} and ln|value| (-inf iff sign 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "LogSampleWire", into = "LogSampleWire")]
pub struct LogSample {
    pub sign: i8,
    pub log_abs: f64,
}

/// JSON form of a sample; `log_abs` is absent for exact zeros so the wire
/// format never carries infinities.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct LogSampleWire {
    sign: i8,
    #[serde(skip_serializing_if = "Option::is_none")]
    log_abs: Option<f64>,
}

impl From<LogSampleWire> for LogSample {
    fn from(w: LogSampleWire) -> LogSample {
        match w.log_abs {
            Some(l) if w.sign != 0 => LogSample { sign: w.sign.signum(), log_abs: l },
            _ => LogSample::zero(),
        }
    }
}

impl From<LogSample> for LogSampleWire {
    fn from(s: LogSample) -> LogSampleWire {
        LogSampleWire {
            sign: s.sign,
            log_abs: if s.sign == 0 { None } else { Some(s.log_abs) },
        }
    }
}

impl LogSample {
    pub fn zero() -> LogSample {
        LogSample { sign: 0, log_abs: f64::NEG_INFINITY }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    /// Encode a concrete value; rejects non-finite inputs and magnitudes
    /// beyond the log budget.
    pub fn from_value(v: f64) -> Result<LogSample> {
        if v == 0.0 {
            return Ok(LogSample::zero());
        }
        if !v.is_finite() {
            return Err(Error::EvalDomainError(format!("sample is not finite: {v}")));
        }
        let log_abs = v.abs().ln();
        if log_abs > LOG_MAGNITUDE_BUDGET {
            return Err(Error::MagnitudeOverflow { log_abs, budget: LOG_MAGNITUDE_BUDGET });
        }
        Ok(LogSample { sign: if v > 0.0 { 1 } else { -1 }, log_abs })
    }

    /// Decode to a plain float; deep log magnitudes underflow to zero.
    pub fn value(self) -> f64 {
        self.sign as f64 * self.log_abs.exp()
    }

    pub fn neg(self) -> LogSample {
        LogSample { sign: -self.sign, log_abs: self.log_abs }
    }

    /// Total order of the encoded real values. Signs order first; among
    /// positives larger magnitude is larger, among negatives smaller.
    pub fn cmp_signed(self, other: LogSample) -> std::cmp::Ordering {
        match (self.sign, other.sign) {
            (a, b) if a != b => a.cmp(&b),
            (1, 1) => self.log_abs.total_cmp(&other.log_abs),
            (-1, -1) => other.log_abs.total_cmp(&self.log_abs),
            _ => std::cmp::Ordering::Equal,
        }
    }

    pub fn abs(self) -> LogSample {
        LogSample { sign: self.sign.abs(), log_abs: self.log_abs }
    }

    pub fn mul(self, other: LogSample) -> Result<LogSample> {
        if self.sign == 0 || other.sign == 0 {
            return Ok(LogSample::zero());
        }
        let log_abs = self.log_abs + other.log_abs;
        if log_abs > LOG_MAGNITUDE_BUDGET {
            return Err(Error::MagnitudeOverflow { log_abs, budget: LOG_MAGNITUDE_BUDGET });
        }
        Ok(LogSample { sign: self.sign * other.sign, log_abs })
    }

    /// Signed addition via log-sum-exp; exact cancellation yields zero.
    pub fn add(self, other: LogSample) -> Result<LogSample> {
        if self.sign == 0 {
            return Ok(other);
        }
        if other.sign == 0 {
            return Ok(self);
        }
        let (hi, lo) = if self.log_abs >= other.log_abs { (self, other) } else { (other, self) };
        let d = lo.log_abs - hi.log_abs; // <= 0
        let out = if hi.sign == lo.sign {
            LogSample { sign: hi.sign, log_abs: hi.log_abs + d.exp().ln_1p() }
        } else if d == 0.0 {
            LogSample::zero()
        } else {
            // 1 - e^d through expm1, so log-differences far below float
            // precision of the magnitudes still survive.
            LogSample { sign: hi.sign, log_abs: hi.log_abs + (-d.exp_m1()).ln() }
        };
        if out.sign != 0 && out.log_abs > LOG_MAGNITUDE_BUDGET {
            return Err(Error::MagnitudeOverflow { log_abs: out.log_abs, budget: LOG_MAGNITUDE_BUDGET });
        }
        Ok(out)
    }

    /// Integer power; negative exponents reject exactly zero samples.
    pub fn powi(self, n: i32) -> Result<LogSample> {
        if n == 0 {
            return Ok(LogSample { sign: 1, log_abs: 0.0 });
        }
        if self.sign == 0 {
            if n > 0 {
                return Ok(LogSample::zero());
            }
            return Err(Error::EvalDomainError("zero sample raised to a negative power".into()));
        }
        let sign = if n % 2 == 0 { 1 } else { self.sign };
        let log_abs = self.log_abs * n as f64;
        if log_abs > LOG_MAGNITUDE_BUDGET {
            return Err(Error::MagnitudeOverflow { log_abs, budget: LOG_MAGNITUDE_BUDGET });
        }
        Ok(LogSample { sign, log_abs })
    }

    /// Real power of a nonnegative sample.
    pub fn powf(self, a: f64) -> Result<LogSample> {
        if a == 0.0 {
            return Ok(LogSample { sign: 1, log_abs: 0.0 });
        }
        match self.sign {
            0 if a > 0.0 => Ok(LogSample::zero()),
            0 => Err(Error::EvalDomainError("zero sample raised to a negative power".into())),
            1 => {
                let log_abs = self.log_abs * a;
                if log_abs > LOG_MAGNITUDE_BUDGET {
                    return Err(Error::MagnitudeOverflow { log_abs, budget: LOG_MAGNITUDE_BUDGET });
                }
                Ok(LogSample { sign: 1, log_abs })
            }
            _ => Err(Error::EvalDomainError("real power of a negative sample".into())),
        }
    }

    /// Square root of a nonnegative sample.
    pub fn sqrt(self) -> Result<LogSample> {
        match self.sign {
            0 => Ok(LogSample::zero()),
            1 => Ok(LogSample { sign: 1, log_abs: self.log_abs / 2.0 }),
            _ => Err(Error::EvalDomainError("square root of a negative sample".into())),
        }
    }

    pub fn div(self, other: LogSample) -> Result<LogSample> {
        if other.sign == 0 {
            return Err(Error::EvalDomainError("division by an exactly zero sample".into()));
        }
        if self.sign == 0 {
            return Ok(LogSample::zero());
        }
        let log_abs = self.log_abs - other.log_abs;
        if log_abs > LOG_MAGNITUDE_BUDGET {
            return Err(Error::MagnitudeOverflow { log_abs, budget: LOG_MAGNITUDE_BUDGET });
        }
        Ok(LogSample { sign: self.sign * other.sign, log_abs })
    }
}

/// A generalized number known through its samples on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledNet {
    grid: EpsilonGrid,
    samples: Vec<LogSample>,
    /// Moderateness certificate: the estimated valuation stayed above the
    /// clamp -v_cut when the net was built.
    moderate: bool,
}

impl SampledNet {
    /// Sample a generator on the grid. The generator receives eps and must
    /// return a finite value within the log budget.
    pub fn from_fn(params: &Params, mut gen: impl FnMut(f64) -> f64) -> Result<SampledNet> {
        let grid = params.grid.clone();
        let samples = grid
            .indices()
            .map(|i| LogSample::from_value(gen(grid.eps(i))))
            .collect::<Result<Vec<_>>>()?;
        Ok(SampledNet::from_samples_in(params, samples))
    }

    /// Like [`SampledNet::from_fn`] but the generator works directly in
    /// (sign, ln|value|) form, so sub-underflow magnitudes survive.
    pub fn from_log_fn(params: &Params, mut gen: impl FnMut(f64, f64) -> (i8, f64)) -> Result<SampledNet> {
        let grid = params.grid.clone();
        let mut samples = Vec::with_capacity(grid.len());
        for i in grid.indices() {
            let (sign, log_abs) = gen(grid.eps(i), grid.log_eps(i));
            if log_abs > LOG_MAGNITUDE_BUDGET {
                return Err(Error::MagnitudeOverflow { log_abs, budget: LOG_MAGNITUDE_BUDGET });
            }
            if sign == 0 || log_abs == f64::NEG_INFINITY {
                samples.push(LogSample::zero());
            } else {
                samples.push(LogSample { sign: sign.signum(), log_abs });
            }
        }
        Ok(SampledNet::from_samples_in(params, samples))
    }

    pub(crate) fn from_samples_in(params: &Params, samples: Vec<LogSample>) -> SampledNet {
        debug_assert_eq!(samples.len(), params.grid.len());
        let mut net = SampledNet { grid: params.grid.clone(), samples, moderate: true };
        let est = net.estimate_valuation(params);
        net.moderate = !est.clamped_low;
        net
    }

    /// Swap in samples of the same magnitudes (sign flips, absolute values);
    /// the grid and the moderateness certificate carry over unchanged.
    pub(crate) fn with_samples(&self, samples: Vec<LogSample>) -> SampledNet {
        debug_assert_eq!(samples.len(), self.samples.len());
        SampledNet { grid: self.grid.clone(), samples, moderate: self.moderate }
    }

    pub fn grid(&self) -> &EpsilonGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[LogSample] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> LogSample {
        self.samples[i]
    }

    /// Whether the moderateness certificate held at construction.
    pub fn is_moderate(&self) -> bool {
        self.moderate
    }

    pub fn map2(&self, other: &SampledNet, params: &Params, f: impl Fn(LogSample, LogSample) -> Result<LogSample>) -> Result<SampledNet> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(SampledNet::from_samples_in(params, samples))
    }

    pub fn map(&self, params: &Params, f: impl Fn(LogSample) -> Result<LogSample>) -> Result<SampledNet> {
        let samples = self.samples.iter().map(|&a| f(a)).collect::<Result<Vec<_>>>()?;
        Ok(SampledNet::from_samples_in(params, samples))
    }

    /// Least-squares valuation estimate over the tail half of the grid.
    pub fn estimate_valuation(&self, params: &Params) -> ValuationEstimate {
        let pts: Vec<(f64, f64)> = self
            .grid
            .tail()
            .filter(|&i| !self.samples[i].is_zero())
            .map(|i| (self.grid.log_eps(i), self.samples[i].log_abs))
            .collect();
        if pts.is_empty() {
            // Identically zero on the tail: negligible.
            return ValuationEstimate { value: Valuation::PlusInfinity, residual: 0.0, reliable: true, clamped_low: false };
        }
        let (slope, residual) = fit_line(&pts);
        if slope >= params.v_cut {
            return ValuationEstimate {
                value: Valuation::PlusInfinity,
                residual,
                reliable: residual <= params.residual_tol,
                clamped_low: false,
            };
        }
        let clamped_low = slope <= -params.v_cut;
        ValuationEstimate {
            value: Valuation::Finite(slope.max(-params.v_cut)),
            residual,
            reliable: !clamped_low && residual <= params.residual_tol,
            clamped_low,
        }
    }
}

/// A valuation: either a finite slope or +infinity (negligible net).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Valuation {
    Finite(f64),
    PlusInfinity,
}

impl Valuation {
    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::PlusInfinity)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::PlusInfinity => None,
        }
    }

    /// The sharp norm e^-v; +infinity maps to 0.
    pub fn e_norm(self) -> f64 {
        match self {
            Valuation::Finite(v) => (-v).exp(),
            Valuation::PlusInfinity => 0.0,
        }
    }

    pub fn min(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::PlusInfinity, o) => o,
            (s, Valuation::PlusInfinity) => s,
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a.min(b)),
        }
    }
}

/// A valuation value with its fit diagnostics. `reliable` is false when the
/// log-log residual passed the configured tolerance or the slope hit the
/// moderateness clamp; such estimates should be treated as warnings, not
/// answers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValuationEstimate {
    pub value: Valuation,
    pub residual: f64,
    pub reliable: bool,
    pub clamped_low: bool,
}

impl ValuationEstimate {
    pub fn exact(v: Option<f64>) -> ValuationEstimate {
        ValuationEstimate {
            value: match v {
                Some(x) => Valuation::Finite(x),
                None => Valuation::PlusInfinity,
            },
            residual: 0.0,
            reliable: true,
            clamped_low: false,
        }
    }
}

/// Ordinary least squares of y against x; returns (slope, rms residual).
/// A single point fits exactly with slope 0.
fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    if pts.len() == 1 {
        return (0.0, 0.0);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum();
    (slope, (ss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> Params {
        Params::default()
    }

    #[test]
    fn log_addition_matches_float_addition() {
        let cases = [(3.0, 4.0), (3.0, -4.0), (-3.0, -4.0), (1e-8, 2.0), (5.0, -5.0), (0.0, 7.0)];
        for (a, b) in cases {
            let s = LogSample::from_value(a).unwrap().add(LogSample::from_value(b).unwrap()).unwrap();
            let expect = a + b;
            if expect == 0.0 {
                assert!(s.is_zero(), "{a} + {b}");
            } else {
                assert!((s.value() - expect).abs() <= 1e-12 * expect.abs(), "{a} + {b} gave {}", s.value());
            }
        }
    }

    #[test]
    fn multiplication_overflow_is_reported() {
        let big = LogSample { sign: 1, log_abs: 400.0 };
        assert!(matches!(big.mul(big), Err(Error::MagnitudeOverflow { .. })));
    }

    #[test]
    fn power_nets_recover_their_exponent() {
        let p = params();
        for a in [-3.0, -1.0, 0.0, 0.5, 2.0, 7.0] {
            let net = SampledNet::from_log_fn(&p, |_, log_eps| (1, a * log_eps)).unwrap();
            let est = net.estimate_valuation(&p);
            let v = est.value.finite().unwrap();
            assert!((v - a).abs() < 0.05, "exponent {a} estimated as {v}");
            assert!(est.reliable);
        }
    }

    #[test]
    fn rapidly_vanishing_net_classifies_negligible() {
        let p = params();
        // x_eps = exp(-1/eps): every sample is far below every power of eps.
        let net = SampledNet::from_log_fn(&p, |eps, _| (1, -1.0 / eps)).unwrap();
        let est = net.estimate_valuation(&p);
        assert_eq!(est.value, Valuation::PlusInfinity);
    }

    #[test]
    fn tail_zero_net_is_negligible_and_moderate_flagging_works() {
        let p = params();
        let zero = SampledNet::from_fn(&p, |_| 0.0).unwrap();
        assert_eq!(zero.estimate_valuation(&p).value, Valuation::PlusInfinity);
        assert!(zero.is_moderate());

        let wild = SampledNet::from_log_fn(&p, |_, log_eps| (1, -20.0 * log_eps)).unwrap();
        assert!(!wild.is_moderate());
    }

    #[test]
    fn oscillating_net_is_flagged_unreliable() {
        let p = params();
        let net = SampledNet::from_fn(&p, |eps| eps * (1.0 + 0.9 * (1.0 / eps).sin())).unwrap();
        let est = net.estimate_valuation(&p);
        assert!(!est.reliable);
    }

    #[test]
    fn sample_wire_format_round_trips_zero() {
        let s = LogSample::zero();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"sign":0}"#);
        let back: LogSample = serde_json::from_str(&json).unwrap();
        assert!(back.is_zero());
    }
}
