//! Symbolic expression trees for the defining nets u_eps(x).
//!
//! An expression is smooth in the variables x1..xn for every fixed eps, and
//! the class is closed under differentiation: derivatives of the two kernel
//! primitives stay in the grammar through their derivative order index.
//!
//! Evaluation works per grid point on (sign, log)-form inputs, so
//! magnitudes far outside the double range pass through arithmetic nodes
//! without overflow. A product whose left factor evaluates to exactly zero
//! short-circuits: the right factor is not evaluated at all, which keeps
//! kernel-gated expressions defined where a dead branch would fault.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactNet;
use crate::kernels::{bump_deriv_log, plateau_deriv_log, MAX_KERNEL_ORDER};
use crate::sampled::LogSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", content = "args", rename_all = "snake_case")]
pub enum SmoothExpr {
    Const(f64),
    /// Variable x{i+1}.
    Var(usize),
    Eps,
    /// 1 where eps <= threshold, 0 elsewhere; constant in x, so smooth.
    EpsGate { threshold: f64 },
    Add(Box<SmoothExpr>, Box<SmoothExpr>),
    Sub(Box<SmoothExpr>, Box<SmoothExpr>),
    Mul(Box<SmoothExpr>, Box<SmoothExpr>),
    Div(Box<SmoothExpr>, Box<SmoothExpr>),
    Powi(Box<SmoothExpr>, i32),
    Powf(Box<SmoothExpr>, f64),
    Exp(Box<SmoothExpr>),
    Log(Box<SmoothExpr>),
    Sin(Box<SmoothExpr>),
    Cos(Box<SmoothExpr>),
    Tanh(Box<SmoothExpr>),
    /// order-th derivative of the bump kernel, applied to arg.
    Bump { order: u32, arg: Box<SmoothExpr> },
    /// order-th derivative of the plateau kernel, applied to arg.
    Plateau { order: u32, arg: Box<SmoothExpr> },
}

use SmoothExpr as E;

impl SmoothExpr {
    pub fn constant(c: f64) -> E {
        E::Const(c)
    }

    pub fn var(i: usize) -> E {
        E::Var(i)
    }

    pub fn eps() -> E {
        E::Eps
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, E::Const(c) if *c == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, E::Const(c) if *c == 1.0)
    }

    pub fn add(a: E, b: E) -> E {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        E::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: E, b: E) -> E {
        if b.is_zero() {
            return a;
        }
        E::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: E, b: E) -> E {
        if a.is_zero() || b.is_zero() {
            return E::Const(0.0);
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        E::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: E, b: E) -> E {
        if b.is_one() {
            return a;
        }
        E::Div(Box::new(a), Box::new(b))
    }

    pub fn powi(a: E, n: i32) -> E {
        match n {
            0 => E::Const(1.0),
            1 => a,
            _ => E::Powi(Box::new(a), n),
        }
    }

    pub fn powf(a: E, p: f64) -> E {
        E::Powf(Box::new(a), p)
    }

    pub fn bump(arg: E) -> E {
        E::Bump { order: 0, arg: Box::new(arg) }
    }

    pub fn plateau(arg: E) -> E {
        E::Plateau { order: 0, arg: Box::new(arg) }
    }

    /// Largest variable index mentioned, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            E::Const(_) | E::Eps | E::EpsGate { .. } => None,
            E::Var(i) => Some(*i),
            E::Add(a, b) | E::Sub(a, b) | E::Mul(a, b) | E::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            E::Powi(a, _) | E::Powf(a, _) => a.max_var(),
            E::Exp(a) | E::Log(a) | E::Sin(a) | E::Cos(a) | E::Tanh(a) => a.max_var(),
            E::Bump { arg, .. } | E::Plateau { arg, .. } => arg.max_var(),
        }
    }

    /// Partial derivative with respect to variable `var`.
    ///
    /// Chain-rule products place the kernel factor first, so evaluation
    /// short-circuits wherever the kernel derivative vanishes.
    pub fn diff(&self, var: usize) -> E {
        match self {
            E::Const(_) | E::Eps | E::EpsGate { .. } => E::Const(0.0),
            E::Var(i) => E::Const(if *i == var { 1.0 } else { 0.0 }),
            E::Add(a, b) => E::add(a.diff(var), b.diff(var)),
            E::Sub(a, b) => E::sub(a.diff(var), b.diff(var)),
            E::Mul(a, b) => E::add(
                E::mul(a.diff(var), (**b).clone()),
                E::mul((**a).clone(), b.diff(var)),
            ),
            E::Div(a, b) => E::div(
                E::sub(
                    E::mul(a.diff(var), (**b).clone()),
                    E::mul((**a).clone(), b.diff(var)),
                ),
                E::powi((**b).clone(), 2),
            ),
            E::Powi(a, n) => E::mul(
                E::mul(E::Const(*n as f64), E::powi((**a).clone(), n - 1)),
                a.diff(var),
            ),
            E::Powf(a, p) => E::mul(
                E::mul(E::Const(*p), E::powf((**a).clone(), p - 1.0)),
                a.diff(var),
            ),
            E::Exp(a) => E::mul(E::Exp(a.clone()), a.diff(var)),
            E::Log(a) => E::div(a.diff(var), (**a).clone()),
            E::Sin(a) => E::mul(E::Cos(a.clone()), a.diff(var)),
            E::Cos(a) => E::mul(E::mul(E::Const(-1.0), E::Sin(a.clone())), a.diff(var)),
            E::Tanh(a) => E::mul(
                E::sub(E::Const(1.0), E::powi(E::Tanh(a.clone()), 2)),
                a.diff(var),
            ),
            E::Bump { order, arg } => E::mul(
                E::Bump { order: order + 1, arg: arg.clone() },
                arg.diff(var),
            ),
            E::Plateau { order, arg } => E::mul(
                E::Plateau { order: order + 1, arg: arg.clone() },
                arg.diff(var),
            ),
        }
    }

    /// Evaluate at one grid point with coordinates in (sign, log) form.
    pub fn eval_log(&self, x: &[LogSample], eps: f64, log_eps: f64) -> Result<LogSample> {
        match self {
            E::Const(c) => LogSample::from_value(*c),
            E::Var(i) => x.get(*i).copied().ok_or(Error::DimensionMismatch {
                expected: *i + 1,
                got: x.len(),
            }),
            E::Eps => Ok(LogSample { sign: 1, log_abs: log_eps }),
            E::EpsGate { threshold } => Ok(if eps <= *threshold {
                LogSample { sign: 1, log_abs: 0.0 }
            } else {
                LogSample::zero()
            }),
            E::Add(a, b) => a.eval_log(x, eps, log_eps)?.add(b.eval_log(x, eps, log_eps)?),
            E::Sub(a, b) => a.eval_log(x, eps, log_eps)?.add(b.eval_log(x, eps, log_eps)?.neg()),
            E::Mul(a, b) => {
                let av = a.eval_log(x, eps, log_eps)?;
                if av.is_zero() {
                    return Ok(LogSample::zero());
                }
                av.mul(b.eval_log(x, eps, log_eps)?)
            }
            E::Div(a, b) => {
                let bv = b.eval_log(x, eps, log_eps)?;
                if bv.is_zero() {
                    return Err(Error::EvalDomainError("division by zero in expression".into()));
                }
                a.eval_log(x, eps, log_eps)?.div(bv)
            }
            E::Powi(a, n) => a.eval_log(x, eps, log_eps)?.powi(*n),
            E::Powf(a, p) => a.eval_log(x, eps, log_eps)?.powf(*p),
            E::Exp(a) => {
                let v = a.eval_log(x, eps, log_eps)?.value();
                if !v.is_finite() || v > crate::params::LOG_MAGNITUDE_BUDGET {
                    return Err(Error::MagnitudeOverflow {
                        log_abs: v,
                        budget: crate::params::LOG_MAGNITUDE_BUDGET,
                    });
                }
                Ok(LogSample { sign: 1, log_abs: v })
            }
            E::Log(a) => {
                let av = a.eval_log(x, eps, log_eps)?;
                if av.sign <= 0 {
                    return Err(Error::EvalDomainError("log of a nonpositive value".into()));
                }
                LogSample::from_value(av.log_abs)
            }
            E::Sin(a) => {
                let av = a.eval_log(x, eps, log_eps)?;
                // sin t = t to double precision below 1e-8.
                if av.is_zero() || av.log_abs < -18.5 {
                    return Ok(av);
                }
                LogSample::from_value(finite_trig(av)?.sin())
            }
            E::Cos(a) => {
                let av = a.eval_log(x, eps, log_eps)?;
                if av.is_zero() || av.log_abs < -18.5 {
                    return Ok(LogSample { sign: 1, log_abs: 0.0 });
                }
                LogSample::from_value(finite_trig(av)?.cos())
            }
            E::Tanh(a) => {
                let av = a.eval_log(x, eps, log_eps)?;
                if av.is_zero() || av.log_abs < -18.5 {
                    return Ok(av);
                }
                if av.log_abs > 20f64.ln() {
                    return Ok(LogSample { sign: av.sign, log_abs: 0.0 });
                }
                LogSample::from_value(av.value().tanh())
            }
            E::Bump { order, arg } => Ok(bump_deriv_log(*order, arg.eval_log(x, eps, log_eps)?)),
            E::Plateau { order, arg } => {
                Ok(plateau_deriv_log(*order, arg.eval_log(x, eps, log_eps)?))
            }
        }
    }

    /// Whether the expression is a polynomial in (x, eps), so that exact
    /// evaluation on exact inputs is available.
    pub fn is_polynomial(&self) -> bool {
        match self {
            E::Const(_) | E::Var(_) | E::Eps => true,
            E::EpsGate { .. } => false,
            E::Add(a, b) | E::Sub(a, b) | E::Mul(a, b) => a.is_polynomial() && b.is_polynomial(),
            E::Powi(a, n) => *n >= 0 && a.is_polynomial(),
            _ => false,
        }
    }

    /// Exact evaluation on exact coordinates; caller checks is_polynomial.
    pub fn eval_exact(&self, x: &[ExactNet]) -> Result<ExactNet> {
        match self {
            E::Const(c) => Ok(ExactNet::constant(*c)),
            E::Var(i) => x.get(*i).cloned().ok_or(Error::DimensionMismatch {
                expected: *i + 1,
                got: x.len(),
            }),
            E::Eps => Ok(ExactNet::eps_power(1.0)),
            E::Add(a, b) => Ok(a.eval_exact(x)?.add(&b.eval_exact(x)?)),
            E::Sub(a, b) => Ok(a.eval_exact(x)?.sub(&b.eval_exact(x)?)),
            E::Mul(a, b) => Ok(a.eval_exact(x)?.mul(&b.eval_exact(x)?)),
            E::Powi(a, n) => {
                if *n < 0 {
                    return Err(Error::PreconditionError(
                        "negative power is not polynomial".into(),
                    ));
                }
                Ok(a.eval_exact(x)?.powi(*n as u32))
            }
            _ => Err(Error::PreconditionError(format!(
                "non-polynomial node {self} has no exact evaluation"
            ))),
        }
    }

    /// Validate kernel orders against the table cap; called on parsed input.
    pub fn check_orders(&self) -> Result<()> {
        match self {
            E::Bump { order, arg } | E::Plateau { order, arg } => {
                if *order > MAX_KERNEL_ORDER {
                    return Err(Error::PreconditionError(format!(
                        "kernel derivative order {order} exceeds the cap {MAX_KERNEL_ORDER}"
                    )));
                }
                arg.check_orders()
            }
            E::Add(a, b) | E::Sub(a, b) | E::Mul(a, b) | E::Div(a, b) => {
                a.check_orders()?;
                b.check_orders()
            }
            E::Powi(a, _) | E::Powf(a, _) => a.check_orders(),
            E::Exp(a) | E::Log(a) | E::Sin(a) | E::Cos(a) | E::Tanh(a) => a.check_orders(),
            E::Const(_) | E::Var(_) | E::Eps | E::EpsGate { .. } => Ok(()),
        }
    }
}

fn finite_trig(v: LogSample) -> Result<f64> {
    let value = v.value();
    if !value.is_finite() {
        return Err(Error::EvalDomainError(
            "trigonometric argument exceeds the double range".into(),
        ));
    }
    Ok(value)
}

impl fmt::Display for SmoothExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            E::Const(c) => write!(f, "{c}"),
            E::Var(i) => write!(f, "x{}", i + 1),
            E::Eps => write!(f, "eps"),
            E::EpsGate { threshold } => write!(f, "gate({threshold})"),
            E::Add(a, b) => {
                write_child(f, a, 1)?;
                f.write_str(" + ")?;
                write_child(f, b, 2)
            }
            E::Sub(a, b) => {
                write_child(f, a, 1)?;
                f.write_str(" - ")?;
                write_child(f, b, 2)
            }
            E::Mul(a, b) => {
                write_child(f, a, 2)?;
                f.write_str(" * ")?;
                write_child(f, b, 3)
            }
            E::Div(a, b) => {
                write_child(f, a, 2)?;
                f.write_str(" / ")?;
                write_child(f, b, 3)
            }
            E::Powi(a, n) => {
                write_child(f, a, 4)?;
                write!(f, "^{n}")
            }
            E::Powf(a, p) => {
                write_child(f, a, 4)?;
                write!(f, "^{p}")
            }
            E::Exp(a) => write!(f, "exp({a})"),
            E::Log(a) => write!(f, "log({a})"),
            E::Sin(a) => write!(f, "sin({a})"),
            E::Cos(a) => write!(f, "cos({a})"),
            E::Tanh(a) => write!(f, "tanh({a})"),
            E::Bump { order: 0, arg } => write!(f, "bump({arg})"),
            E::Bump { order, arg } => write!(f, "bump@{order}({arg})"),
            E::Plateau { order: 0, arg } => write!(f, "plateau({arg})"),
            E::Plateau { order, arg } => write!(f, "plateau@{order}({arg})"),
        }
    }
}

/// Precedence levels: additive 1, multiplicative 2, power 3, atom 4.
fn prec(e: &SmoothExpr) -> u8 {
    match e {
        E::Add(..) | E::Sub(..) => 1,
        E::Mul(..) | E::Div(..) => 2,
        E::Powi(..) | E::Powf(..) => 3,
        _ => 4,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &SmoothExpr, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// One expanded summand: a real coefficient, a power of eps, and remaining
/// factors kept in a canonical order.
struct Term {
    coeff: f64,
    expo: f64,
    factors: Vec<SmoothExpr>,
}

/// Cap on the number of terms the expansion may produce; past it the
/// subtree stays a single opaque factor.
const EXPANSION_CAP: usize = 128;

/// Expand into a sum of terms over sums, differences, products, and eps
/// powers. Everything else is an opaque factor, so the result always
/// represents the input exactly.
fn expand_terms(e: &SmoothExpr) -> Vec<Term> {
    match e {
        E::Const(c) => vec![Term { coeff: *c, expo: 0.0, factors: Vec::new() }],
        E::Eps => vec![Term { coeff: 1.0, expo: 1.0, factors: Vec::new() }],
        E::Powi(base, n) if **base == E::Eps => {
            vec![Term { coeff: 1.0, expo: *n as f64, factors: Vec::new() }]
        }
        E::Powf(base, p) if **base == E::Eps => {
            vec![Term { coeff: 1.0, expo: *p, factors: Vec::new() }]
        }
        E::Add(a, b) => {
            let mut out = expand_terms(a);
            out.extend(expand_terms(b));
            out
        }
        E::Sub(a, b) => {
            let mut out = expand_terms(a);
            out.extend(expand_terms(b).into_iter().map(|mut t| {
                t.coeff = -t.coeff;
                t
            }));
            out
        }
        E::Mul(a, b) => {
            let left = expand_terms(a);
            let right = expand_terms(b);
            if left.len().saturating_mul(right.len()) > EXPANSION_CAP {
                return vec![Term { coeff: 1.0, expo: 0.0, factors: vec![e.clone()] }];
            }
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    let mut factors = l.factors.clone();
                    factors.extend(r.factors.iter().cloned());
                    out.push(Term {
                        coeff: l.coeff * r.coeff,
                        expo: l.expo + r.expo,
                        factors,
                    });
                }
            }
            out
        }
        _ => vec![Term { coeff: 1.0, expo: 0.0, factors: vec![e.clone()] }],
    }
}

fn term_expr(t: &Term) -> SmoothExpr {
    let mut out = E::Const(1.0);
    for f in &t.factors {
        out = E::mul(out, f.clone());
    }
    if t.expo != 0.0 {
        out = E::mul(E::powf(E::eps(), t.expo), out);
    }
    E::mul(E::Const(t.coeff), out)
}

/// The difference a - b with structurally equal summands cancelled
/// symbolically. A summand matches when its eps power and its factor list
/// agree node for node, so shared parts drop out with exact coefficient
/// arithmetic instead of cancelling in log magnitude at evaluation time,
/// where they would erase every bit of a small residual.
pub fn collect_difference(a: &SmoothExpr, b: &SmoothExpr) -> SmoothExpr {
    let mut terms = expand_terms(a);
    terms.extend(expand_terms(b).into_iter().map(|mut t| {
        t.coeff = -t.coeff;
        t
    }));
    if terms.len() > EXPANSION_CAP {
        return E::sub(a.clone(), b.clone());
    }
    let mut collected: std::collections::BTreeMap<(u64, String), Term> =
        std::collections::BTreeMap::new();
    for mut t in terms {
        t.factors.sort_by_key(|f| format!("{f:?}"));
        let key = (
            t.expo.to_bits(),
            t.factors.iter().map(|f| format!("{f:?};")).collect::<String>(),
        );
        collected
            .entry(key)
            .and_modify(|slot| slot.coeff += t.coeff)
            .or_insert(t);
    }
    let mut out = E::Const(0.0);
    for t in collected.values() {
        if t.coeff == 0.0 {
            continue;
        }
        out = E::add(out, term_expr(t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Params;

    fn ev(e: &SmoothExpr, x: f64, eps: f64) -> f64 {
        e.eval_log(&[LogSample::from_value(x).unwrap()], eps, eps.ln())
            .unwrap()
            .value()
    }

    #[test]
    fn polynomial_derivative_shapes() {
        let x = E::var(0);
        let sq = E::powi(x.clone(), 2);
        let d = sq.diff(0);
        // d(x^2) = 2x.
        assert!((ev(&d, 3.0, 0.5) - 6.0).abs() < 1e-12);
        let dd = d.diff(0);
        assert!((ev(&dd, 3.0, 0.5) - 2.0).abs() < 1e-12);
        assert!(E::Const(5.0).diff(0).is_zero());
    }

    #[test]
    fn chain_rule_through_kernels() {
        let p = Params::default();
        // f(x) = eps^-1 * bump(x / eps); df/dx = eps^-2 * bump'(x/eps).
        let inner = E::div(E::var(0), E::Eps);
        let f = E::mul(E::powi(E::Eps, -1), E::bump(inner));
        let d = f.diff(0);
        for i in [0usize, 5, 20] {
            let eps = p.grid.eps(i);
            let x = 0.5 * eps;
            let want = crate::kernels::bump_deriv(1, 0.5) / (eps * eps);
            let got = ev(&d, x, eps);
            assert!(
                (got - want).abs() <= 1e-9 * want.abs(),
                "at eps {eps}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn zero_factor_short_circuits_dead_branches() {
        // bump(x) vanishes at |x| >= 1, so the 1/(x-2) branch behind it must
        // not be evaluated at x = 2 where it would divide by zero.
        let guarded = E::mul(
            E::bump(E::var(0)),
            E::div(E::Const(1.0), E::sub(E::var(0), E::Const(2.0))),
        );
        let v = guarded
            .eval_log(&[LogSample::from_value(2.0).unwrap()], 0.5, 0.5f64.ln())
            .unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn exact_path_matches_log_path_on_polynomials() {
        let e = E::add(
            E::mul(E::powi(E::var(0), 2), E::Eps),
            E::mul(E::Const(3.0), E::powi(E::Eps, 2)),
        );
        assert!(e.is_polynomial());
        let exact = e.eval_exact(&[ExactNet::constant(2.0)]).unwrap();
        for &eps in &[0.5f64, 0.125, 0.01] {
            let log = ev(&e, 2.0, eps);
            assert!((exact.eval(eps) - log).abs() < 1e-12 * log.abs());
        }
        assert!(!E::bump(E::var(0)).is_polynomial());
        assert!(!E::powi(E::var(0), -1).is_polynomial());
    }

    #[test]
    fn guards_fault_cleanly() {
        let logx = E::Log(Box::new(E::var(0)));
        let bad = logx.eval_log(&[LogSample::from_value(-1.0).unwrap()], 0.5, 0.5f64.ln());
        assert!(matches!(bad, Err(Error::EvalDomainError(_))));
        let div = E::div(E::Const(1.0), E::var(0));
        let bad = div.eval_log(&[LogSample::zero()], 0.5, 0.5f64.ln());
        assert!(matches!(bad, Err(Error::EvalDomainError(_))));
        let oob = E::var(3).eval_log(&[LogSample::zero()], 0.5, 0.5f64.ln());
        assert!(matches!(oob, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gate_switches_on_the_grid() {
        let g = E::EpsGate { threshold: 0.01 };
        assert_eq!(ev(&g, 0.0, 0.5), 0.0);
        assert_eq!(ev(&g, 0.0, 0.005), 1.0);
        assert!(g.diff(0).is_zero());
    }

    #[test]
    fn tiny_arguments_keep_log_scale_through_trig() {
        let s = E::Sin(Box::new(E::var(0)));
        let tiny = LogSample { sign: 1, log_abs: -500.0 };
        let v = s.eval_log(&[tiny], 0.5, 0.5f64.ln()).unwrap();
        assert_eq!((v.sign, v.log_abs), (1, -500.0));
        let c = E::Cos(Box::new(E::var(0)));
        let v = c.eval_log(&[tiny], 0.5, 0.5f64.ln()).unwrap();
        assert_eq!((v.sign, v.log_abs), (1, 0.0));
    }
}
