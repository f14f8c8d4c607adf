//! Worked demonstrations with built-in assertions.
//!
//! Each demo builds a reference construction, checks the expected
//! decisions, and reports every check with its expected and actual value,
//! so a failure shows the diff directly. Demos are deterministic: they use
//! no randomness beyond the optimizer's seeded multistart.

use clap::ValueEnum;
use colombeau::{
    cauchy_limit, delta_embedding, hausdorff_distance, hausdorff_equal, interleave, interval,
    member_exterior, member_internal, member_strongly, norm_m, verify_compact_support, BoxNet,
    CompactlySupportedGsf, FunctionallyCompactSet, GBox, GPoint, GeneralizedNumber as Gn, Gsf,
    IdempotentSet, InternalSet, Params, SampledNet, SmoothExpr, StronglyInternalSet,
    SupportCheck, Tri, Valuation,
};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::report::tri_str;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    InterleavingGap,
    DeltaNorms,
    HausdorffEqual,
    Completeness,
}

/// A finished demo: the report body and whether every check passed.
pub struct DemoReport {
    pub json: Value,
    pub passed: bool,
}

struct Checks {
    rows: Vec<Value>,
    passed: bool,
}

impl Checks {
    fn new() -> Checks {
        Checks { rows: Vec::new(), passed: true }
    }

    fn expect(&mut self, label: &str, expected: impl Into<Value>, actual: impl Into<Value>) {
        let expected = expected.into();
        let actual = actual.into();
        let ok = expected == actual;
        self.passed &= ok;
        self.rows
            .push(json!({ "check": label, "expected": expected, "actual": actual, "passed": ok }));
    }

    fn expect_close(&mut self, label: &str, expected: f64, actual: f64, tol: f64) {
        let ok = (expected - actual).abs() <= tol;
        self.passed &= ok;
        self.rows.push(json!({
            "check": label, "expected": expected, "actual": actual,
            "tolerance": tol, "passed": ok,
        }));
    }
}

pub fn run_demo(name: DemoName, params: &Params) -> CliResult<DemoReport> {
    match name {
        DemoName::InterleavingGap => interleaving_gap(params),
        DemoName::DeltaNorms => delta_norms(params),
        DemoName::HausdorffEqual => hausdorff_equal_demo(params),
        DemoName::Completeness => completeness(params),
    }
}

/// A point that alternates between two intervals is a member of their
/// interleaving union, yet of neither strongly internal piece: the union
/// of open pieces is not closed under interleaving.
fn interleaving_gap(params: &Params) -> CliResult<DemoReport> {
    let k = interval(&Gn::constant(-0.5), &Gn::constant(0.5), params)?;
    let h = interval(&Gn::constant(2.5), &Gn::constant(3.5), params)?;
    let union = colombeau::interleaving_union(&k, &h, params)?;
    let blocks = IdempotentSet::alternating_blocks(1, 0)?;
    let hopper = interleave(
        &[Gn::constant(0.0), Gn::constant(3.0)],
        &[blocks.clone(), blocks.complement()],
        params,
    )?;
    let x = GPoint::new(vec![hopper])?;

    let mut checks = Checks::new();
    checks.expect(
        "x is a member of the interleaving union",
        "true",
        tri_str(member_internal(&x, union.set(), params)?),
    );
    checks.expect(
        "x is not a member of the first interval",
        "false",
        tri_str(member_internal(&x, k.set(), params)?),
    );
    checks.expect(
        "x is not a member of the second interval",
        "false",
        tri_str(member_internal(&x, h.set(), params)?),
    );
    let u1 = StronglyInternalSet::open_interval(-0.5, 0.5, params)?;
    let u2 = StronglyInternalSet::open_interval(2.5, 3.5, params)?;
    checks.expect(
        "x is not strongly inside the first open piece",
        "false",
        tri_str(member_strongly(&x, &u1, params)?.decision),
    );
    checks.expect(
        "x is not strongly inside the second open piece",
        "false",
        tri_str(member_strongly(&x, &u2, params)?.decision),
    );

    Ok(DemoReport {
        passed: checks.passed,
        json: json!({
            "demo": "interleaving-gap",
            "point": "interleave of 0 and 3 over alternating grid blocks",
            "checks": checks.rows,
            "passed": checks.passed,
        }),
    })
}

fn tight_delta_witness(params: &Params) -> CliResult<FunctionallyCompactSet> {
    let r = Gn::constant(2.0).mul(&Gn::eps_power(1.0), params)?;
    Ok(interval(&r.neg(), &r, params)?)
}

/// The order-m norm of the unit-scale delta model grows like the
/// (m+1)-st inverse power: its valuation is -(m+1).
fn delta_norms(params: &Params) -> CliResult<DemoReport> {
    let delta = delta_embedding(1, 1.0, params)?;
    let witness = tight_delta_witness(params)?;
    let supported = match verify_compact_support(&delta, &witness, 4, 8, params)? {
        SupportCheck::Verified(csg) => csg,
        SupportCheck::Counterexample(_) => {
            return Err(CliError("the delta model failed its support check".into()))
        }
    };
    let mut checks = Checks::new();
    let mut rows = Vec::new();
    for m in 0..=4usize {
        let est = norm_m(&supported, m, params)?.value.valuation(params);
        let v = match est.value {
            Valuation::Finite(v) => v,
            Valuation::PlusInfinity => f64::INFINITY,
        };
        rows.push(json!({
            "order": m,
            "valuation": v,
            "residual": est.residual,
            "reliable": est.reliable,
        }));
        checks.expect_close(
            &format!("order-{m} norm valuation"),
            -((m + 1) as f64),
            v,
            0.05,
        );
        checks.expect(&format!("order-{m} estimate is reliable"), true, est.reliable);
    }
    Ok(DemoReport {
        passed: checks.passed,
        json: json!({
            "demo": "delta-norms",
            "norms": rows,
            "checks": checks.rows,
            "passed": checks.passed,
        }),
    })
}

/// Two internal sets that differ by a faster-than-any-power puncture are
/// Hausdorff-equal and share their exterior decisions; widening a corner
/// by a single epsilon power breaks the equality with distance valuation
/// one.
fn hausdorff_equal_demo(params: &Params) -> CliResult<DemoReport> {
    let k = interval(&Gn::constant(-1.0), &Gn::constant(1.0), params)?;
    let hole =
        Gn::Sampled(SampledNet::from_log_fn(params, |eps, _| (1, -1.0 / eps))?);
    let left = GBox::new(vec![Gn::constant(-1.0)], vec![hole.neg()], params)?;
    let right = GBox::new(vec![hole.clone()], vec![Gn::constant(1.0)], params)?;
    let punctured: InternalSet = BoxNet::new(vec![left, right])?.into();

    let mut checks = Checks::new();
    checks.expect(
        "the punctured interval is Hausdorff-equal to the interval",
        "true",
        tri_str(hausdorff_equal(k.set(), &punctured, params)?),
    );
    let pc = FunctionallyCompactSet::new(punctured, params)?;
    let x = GPoint::from_reals(&[2.0])?;
    let a = member_exterior(&x, &k, params)?;
    let b = member_exterior(&x, &pc, params)?;
    checks.expect("x = 2 is exterior to the interval", "true", tri_str(a.decision));
    checks.expect(
        "exterior decisions agree across the equal representatives",
        tri_str(a.decision),
        tri_str(b.decision),
    );

    let widened_hi = Gn::constant(1.0).add(&Gn::eps_power(1.0), params)?;
    let wide = GBox::new(vec![Gn::constant(-1.0)], vec![widened_hi], params)?;
    let wide_set: InternalSet = BoxNet::new(vec![wide])?.into();
    checks.expect(
        "widening a corner by one epsilon power breaks the equality",
        "false",
        tri_str(hausdorff_equal(k.set(), &wide_set, params)?),
    );
    let dist = hausdorff_distance(k.set(), &wide_set, params)?.valuation(params);
    let v = dist.value.finite().unwrap_or(f64::INFINITY);
    checks.expect_close("the widened distance has valuation one", 1.0, v, 0.05);

    Ok(DemoReport {
        passed: checks.passed,
        json: json!({
            "demo": "hausdorff-equal",
            "checks": checks.rows,
            "passed": checks.passed,
        }),
    })
}

/// Geometric members of the completeness sequence: the n-th member is the
/// bump scaled by 1 + sum of eps^(j+1) for j = 1..=n.
pub fn geometric_member(n: usize) -> SmoothExpr {
    use SmoothExpr as E;
    let bump = E::Bump { order: 0, arg: Box::new(E::var(0)) };
    let mut coeff = E::constant(1.0);
    for j in 1..=n {
        coeff = E::add(coeff, E::powf(E::eps(), (j + 1) as f64));
    }
    E::mul(coeff, bump)
}

/// Completes a geometric Cauchy sequence along the identity schedule and
/// reports every certified tail inequality up to step eight.
pub fn completeness_limit(params: &Params) -> CliResult<(colombeau::CauchyLimit, Params)> {
    let mut deep = params.clone();
    deep.max_derivative_order = 8;
    let witness = interval(&Gn::constant(-1.5), &Gn::constant(1.5), &deep)?;
    let mut seq: Vec<CompactlySupportedGsf> = Vec::new();
    for n in 0..=8usize {
        let gsf = Gsf::new(
            vec![geometric_member(n)],
            StronglyInternalSet::full_space(1)?,
            &deep,
        )?;
        match verify_compact_support(&gsf, &witness, 2, 8, &deep)? {
            SupportCheck::Verified(csg) => seq.push(csg),
            SupportCheck::Counterexample(_) => {
                return Err(CliError(format!("member {n} failed its support check")))
            }
        }
    }
    let schedule: Vec<usize> = (0..=8).collect();
    let out = cauchy_limit(&seq, &schedule, &deep)?;
    Ok((out, deep))
}

fn completeness(params: &Params) -> CliResult<DemoReport> {
    let (out, _) = completeness_limit(params)?;
    let mut checks = Checks::new();
    let mut rows = Vec::new();
    for c in &out.tail_checks {
        rows.push(json!({
            "step": c.step,
            "order": c.order,
            "decision": tri_str(c.decision),
        }));
        if c.step == c.order {
            checks.expect(
                &format!("limit sits within eps^{} of member {} at order {}",
                    c.step as i64 - 1, c.step, c.order),
                "true",
                tri_str(c.decision),
            );
        }
    }
    let all_true = out.tail_checks.iter().all(|c| c.decision == Tri::True);
    checks.expect("every recorded tail inequality is decided true", true, all_true);
    Ok(DemoReport {
        passed: checks.passed,
        json: json!({
            "demo": "completeness",
            "derivative_cap": 8,
            "thresholds": out.thresholds,
            "tail_checks": rows,
            "checks": checks.rows,
            "passed": checks.passed,
        }),
    })
}
