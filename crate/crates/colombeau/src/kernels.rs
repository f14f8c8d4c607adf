//! Closed-form derivative tables for the two smooth kernels.
//!
//! bump(t) = exp(1 - 1/(1 - t^2)) on |t| < 1, zero outside, bump(0) = 1.
//! plateau(t) = 1 on |t| <= 1/2, 0 on |t| >= 1, and on the shoulder
//! S(y) = A(y)/(A(y) + A(1-y)) with A(s) = exp(-1/s) and y = 2 - 2|t|.
//!
//! Every derivative of bump has the shape P_k(t, u) * bump(t) with
//! u = 1/(1 - t^2) and P_k a polynomial obeying P_{k+1} = dP_k/dt - 2tu^2 P_k
//! (monomial rule d(t^i u^j)/dt = i t^{i-1} u^j + 2j t^{i+1} u^{j+1}).
//! Every derivative of S has the shape N_k(a, b, u, w) / (a + b)^{k+1} with
//! a = exp(-u), b = exp(-w), u = 1/y, w = 1/(1-y) and the closure rules
//! a' = a u^2, b' = -b w^2, u' = -u^2, w' = w^2. Both polynomials are kept
//! as exact monomial lists and evaluated by signed log-sum-exp, so the huge
//! u, w powers near the joints cancel against the flat exponentials instead
//! of overflowing.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::sampled::LogSample;

/// Largest supported derivative order of either kernel.
pub const MAX_KERNEL_ORDER: u32 = 32;

/// Monomial list for P_k(t, u): (pow_t, pow_u, coefficient).
type BumpPoly = Vec<(i64, i64, f64)>;
/// Monomial list for N_k(a, b, u, w).
type PlateauPoly = Vec<(i64, i64, i64, i64, f64)>;

fn bump_tables() -> &'static Vec<BumpPoly> {
    static TABLES: OnceLock<Vec<BumpPoly>> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut tables: Vec<BumpPoly> = Vec::with_capacity(MAX_KERNEL_ORDER as usize + 1);
        tables.push(vec![(0, 0, 1.0)]);
        for _ in 0..MAX_KERNEL_ORDER {
            let prev = tables.last().unwrap();
            let mut next: BTreeMap<(i64, i64), f64> = BTreeMap::new();
            let mut push = |key: (i64, i64), c: f64| *next.entry(key).or_insert(0.0) += c;
            for &(i, j, c) in prev {
                if i != 0 {
                    push((i - 1, j), c * i as f64);
                }
                if j != 0 {
                    push((i + 1, j + 1), c * 2.0 * j as f64);
                }
                // The -2 t u^2 P_k term from differentiating bump itself.
                push((i + 1, j + 2), -2.0 * c);
            }
            tables.push(
                next.into_iter().filter(|&(_, c)| c != 0.0).map(|((i, j), c)| (i, j, c)).collect(),
            );
        }
        tables
    })
}

fn plateau_tables() -> &'static Vec<PlateauPoly> {
    static TABLES: OnceLock<Vec<PlateauPoly>> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut tables: Vec<PlateauPoly> = Vec::with_capacity(MAX_KERNEL_ORDER as usize + 1);
        tables.push(vec![(1, 0, 0, 0, 1.0)]);
        for k in 0..MAX_KERNEL_ORDER {
            let prev = tables.last().unwrap();
            let mut next: BTreeMap<(i64, i64, i64, i64), f64> = BTreeMap::new();
            let mut push = |key: (i64, i64, i64, i64), c: f64| *next.entry(key).or_insert(0.0) += c;
            for &(pa, pb, pu, pw, c) in prev {
                // N_k' * (a + b), with the monomial derivative rules above.
                let derivs: [((i64, i64, i64, i64), f64); 4] = [
                    ((pa, pb, pu + 2, pw), c * pa as f64),
                    ((pa, pb, pu, pw + 2), -c * pb as f64),
                    ((pa, pb, pu + 1, pw), -c * pu as f64),
                    ((pa, pb, pu, pw + 1), c * pw as f64),
                ];
                for ((qa, qb, qu, qw), d) in derivs {
                    if d != 0.0 {
                        push((qa + 1, qb, qu, qw), d);
                        push((qa, qb + 1, qu, qw), d);
                    }
                }
                // -(k + 1) N_k (a u^2 - b w^2).
                let m = -(k as f64 + 1.0) * c;
                push((pa + 1, pb, pu + 2, pw), m);
                push((pa, pb + 1, pu, pw + 2), -m);
            }
            tables.push(
                next.into_iter()
                    .filter(|&(_, c)| c != 0.0)
                    .map(|((pa, pb, pu, pw), c)| (pa, pb, pu, pw, c))
                    .collect(),
            );
        }
        tables
    })
}

/// Signed log-sum-exp accumulation of (sign, log) terms, relative to the
/// dominant term so that tiny relative remainders survive.
fn logsumexp_signed(terms: impl Iterator<Item = (f64, f64)>) -> LogSample {
    let collected: Vec<(f64, f64)> = terms.filter(|&(s, l)| s != 0.0 && l > f64::NEG_INFINITY).collect();
    let Some(ti) = collected
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
    else {
        return LogSample::zero();
    };
    let (top_sign, top) = collected[ti];
    let rest: f64 = collected
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != ti)
        .map(|(_, &(s, l))| top_sign * s * (l - top).exp())
        .sum();
    if rest == -1.0 {
        LogSample::zero()
    } else if rest > -1.0 {
        LogSample { sign: top_sign as i8, log_abs: top + rest.ln_1p() }
    } else {
        LogSample { sign: -top_sign as i8, log_abs: top + (-1.0 - rest).ln() }
    }
}

/// k-th derivative of bump at t, with t given in (sign, log) form.
pub fn bump_deriv_log(k: u32, t: LogSample) -> LogSample {
    assert!(k <= MAX_KERNEL_ORDER, "kernel derivative order over the cap");
    if t.sign != 0 && t.log_abs >= 0.0 {
        return LogSample::zero();
    }
    // ln u and ln bump; both are exactly 0 at t = 0.
    let (sign_t, log_u, log_bump) = if t.is_zero() {
        (0.0, 0.0, 0.0)
    } else {
        let tsq = (2.0 * t.log_abs).exp();
        let log_u = -(-tsq).ln_1p();
        // ln bump = 1 - u = -(u - 1), cancellation-free via expm1.
        (t.sign as f64, log_u, -log_u.exp_m1())
    };
    let poly = &bump_tables()[k as usize];
    let total = logsumexp_signed(
        poly.iter()
            .filter(|&&(i, _, _)| !(t.is_zero() && i != 0))
            .map(|&(i, j, c)| {
                let sign = c.signum() * if i % 2 != 0 { sign_t } else { 1.0 };
                let log_t_part = if i == 0 { 0.0 } else { i as f64 * t.log_abs };
                (sign, c.abs().ln() + log_t_part + j as f64 * log_u)
            }),
    );
    if total.is_zero() {
        LogSample::zero()
    } else {
        LogSample { sign: total.sign, log_abs: total.log_abs + log_bump }
    }
}

/// k-th derivative of plateau at t, with t given in (sign, log) form.
pub fn plateau_deriv_log(k: u32, t: LogSample) -> LogSample {
    assert!(k <= MAX_KERNEL_ORDER, "kernel derivative order over the cap");
    let half = -std::f64::consts::LN_2;
    if t.is_zero() || t.log_abs <= half {
        return if k == 0 { LogSample { sign: 1, log_abs: 0.0 } } else { LogSample::zero() };
    }
    if t.log_abs >= 0.0 {
        return LogSample::zero();
    }
    // Shoulder: y = 2 - 2|t| in (0, 1).
    let abs_t = t.log_abs.exp();
    let y = 2.0 - 2.0 * abs_t;
    let u = 1.0 / y;
    let w = 1.0 / (1.0 - y);
    let (la, lb) = (-u, -w);
    let log_apb = la.max(lb) + (la.min(lb) - la.max(lb)).exp().ln_1p();
    let poly = &plateau_tables()[k as usize];
    let total = logsumexp_signed(poly.iter().map(|&(pa, pb, pu, pw, c)| {
        let log = c.abs().ln() - pa as f64 * u - pb as f64 * w
            + pu as f64 * u.ln()
            + pw as f64 * w.ln();
        (c.signum(), log)
    }));
    if total.is_zero() {
        return LogSample::zero();
    }
    // Chain rule through y = 2 - 2|t|: factor (-2 sign t)^k.
    let sign = total.sign as f64 * if k % 2 == 1 { -(t.sign as f64) } else { 1.0 };
    let log_abs = total.log_abs - (k as f64 + 1.0) * log_apb + k as f64 * std::f64::consts::LN_2;
    LogSample { sign: sign as i8, log_abs }
}

/// Linear-domain convenience wrappers.
pub fn bump_deriv(k: u32, t: f64) -> f64 {
    LogSample::from_value(t).map(|s| bump_deriv_log(k, s).value()).unwrap_or(f64::NAN)
}

pub fn plateau_deriv(k: u32, t: f64) -> f64 {
    LogSample::from_value(t).map(|s| plateau_deriv_log(k, s).value()).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_diff(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
        (f(t + h) - f(t - h)) / (2.0 * h)
    }

    #[test]
    fn bump_basic_values() {
        assert_eq!(bump_deriv(0, 0.0), 1.0);
        assert_eq!(bump_deriv(0, 1.0), 0.0);
        assert_eq!(bump_deriv(0, -2.0), 0.0);
        let t = 0.5f64;
        let want = (1.0 - 1.0 / (1.0 - t * t)).exp();
        assert!((bump_deriv(0, t) - want).abs() < 1e-14);
        assert!((bump_deriv(1, 0.3) + bump_deriv(1, -0.3)).abs() < 1e-14);
        assert!((bump_deriv(2, 0.3) - bump_deriv(2, -0.3)).abs() < 1e-14);
        assert_eq!(bump_deriv(1, 0.0), 0.0);
        // bump''(0) = -2: P_2 contains the constant-in-t monomial -2u^2.
        assert!((bump_deriv(2, 0.0) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        for k in 0..6u32 {
            for &t in &[-0.9, -0.55, -0.2, 0.1, 0.4, 0.8] {
                let h = 1e-6;
                let fd = central_diff(|s| bump_deriv(k, s), t, h);
                let an = bump_deriv(k + 1, t);
                let scale = an.abs().max(1.0);
                assert!(
                    (fd - an).abs() / scale < 1e-4,
                    "bump order {k} at {t}: fd {fd} vs analytic {an}"
                );
            }
        }
    }

    #[test]
    fn bump_vanishes_flatly_at_support_edge() {
        for k in 0..=8u32 {
            let v = bump_deriv(k, 1.0 - 1e-4);
            assert!(v.abs() < 1e-100, "order {k} near edge: {v}");
        }
    }

    #[test]
    fn plateau_basic_values() {
        assert_eq!(plateau_deriv(0, 0.0), 1.0);
        assert_eq!(plateau_deriv(0, 0.5), 1.0);
        assert_eq!(plateau_deriv(0, -0.25), 1.0);
        assert_eq!(plateau_deriv(0, 1.0), 0.0);
        assert_eq!(plateau_deriv(0, 1.5), 0.0);
        let v = plateau_deriv(0, 0.75);
        assert!(0.0 < v && v < 1.0);
        // Midpoint symmetry: S(1/2) = 1/2 at |t| = 3/4.
        assert!((v - 0.5).abs() < 1e-12);
        assert_eq!(plateau_deriv(3, 0.2), 0.0);
        assert_eq!(plateau_deriv(3, 2.0), 0.0);
    }

    #[test]
    fn plateau_derivatives_match_finite_differences() {
        for k in 0..6u32 {
            for &t in &[-0.95, -0.8, -0.6, 0.55, 0.7, 0.9] {
                let h = 1e-6;
                let fd = central_diff(|s| plateau_deriv(k, s), t, h);
                let an = plateau_deriv(k + 1, t);
                let scale = an.abs().max(1.0);
                assert!(
                    (fd - an).abs() / scale < 1e-4,
                    "plateau order {k} at {t}: fd {fd} vs analytic {an}"
                );
            }
        }
    }

    #[test]
    fn plateau_is_monotone_on_shoulder() {
        let mut prev = 1.0;
        for i in 1..40 {
            let t = 0.5 + 0.5 * i as f64 / 40.0;
            let v = plateau_deriv(0, t);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn kernels_preserve_tiny_arguments_in_log_domain() {
        // An exp(-1/eps)-sized argument stays inside the flat regions.
        let t = LogSample { sign: 1, log_abs: -1e6 };
        let b = bump_deriv_log(0, t);
        assert_eq!((b.sign, b.log_abs), (1, 0.0));
        let p = plateau_deriv_log(0, t);
        assert_eq!((p.sign, p.log_abs), (1, 0.0));
        // bump'(t) = -2 t u^2 bump(t) ~ -2t keeps the argument's log scale.
        let d = bump_deriv_log(1, t);
        assert_eq!(d.sign, -1);
        assert!((d.log_abs - (t.log_abs + 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn high_order_tables_stay_finite() {
        for k in [10u32, 20, 32] {
            for &t in &[0.1, 0.6, 0.9, 0.99] {
                assert!(bump_deriv(k, t).is_finite(), "bump order {k} at {t}");
                assert!(plateau_deriv(k, t).is_finite(), "plateau order {k} at {t}");
            }
        }
    }
}
