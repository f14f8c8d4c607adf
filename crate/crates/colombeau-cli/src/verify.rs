//! Randomized property suites with machine-readable reports.
//!
//! Each suite draws its cases from a seeded generator, so identical seed
//! and configuration reproduce the report byte for byte. Failures are
//! report content, not process errors: the first counterexample of every
//! property is recorded with the inputs that produced it.
//!
//! Suites that rely on the box optimizer run two profiles. Supremum
//! comparisons with tight value tolerances use the accuracy profile;
//! decisions with valuation-sized margins use the faster one. Generated
//! bump combinations keep their peaks on a separated lattice with distinct
//! magnitudes, so the dense scan cannot mistake the dominant basin.

use clap::ValueEnum;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use colombeau::{
    ball_member, c_set_member, delta_embedding, derive_seed, extend_global, extreme_values,
    hausdorff_equal, image_enclosure, interleave, interleaving_union, interval, member_exterior,
    member_internal, member_strongly, metric, norm_over, support_positive_at,
    verify_compact_support, BoxNet, CompactlySupportedGsf, ExactNet, exhaustion,
    FunctionallyCompactSet, GPoint, GeneralizedNumber as Gn, Gsf, IdempotentSet,
    InternalSet, OptimizerConfig, Params, SmoothExpr, StronglyInternalSet, SupportCheck, Tri,
    Valuation,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    Ring,
    Ultrametric,
    Order,
    Sets,
    Support,
    Norms,
    Topology,
    Metric,
    All,
}

impl SuiteName {
    fn as_str(self) -> &'static str {
        match self {
            SuiteName::Ring => "ring",
            SuiteName::Ultrametric => "ultrametric",
            SuiteName::Order => "order",
            SuiteName::Sets => "sets",
            SuiteName::Support => "support",
            SuiteName::Norms => "norms",
            SuiteName::Topology => "topology",
            SuiteName::Metric => "metric",
            SuiteName::All => "all",
        }
    }

    fn salt(self) -> u64 {
        match self {
            SuiteName::Ring => 1,
            SuiteName::Ultrametric => 2,
            SuiteName::Order => 3,
            SuiteName::Sets => 4,
            SuiteName::Support => 5,
            SuiteName::Norms => 6,
            SuiteName::Topology => 7,
            SuiteName::Metric => 8,
            SuiteName::All => 9,
        }
    }
}

/// A finished suite: the report body and its total failure count.
pub struct SuiteOutcome {
    pub json: Value,
    pub failures: usize,
}

struct Prop {
    name: &'static str,
    cases: usize,
    failures: usize,
    counterexample: Option<Value>,
}

impl Prop {
    fn new(name: &'static str) -> Prop {
        Prop { name, cases: 0, failures: 0, counterexample: None }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(detail());
            }
        }
    }

    fn json(&self) -> Value {
        json!({
            "property": self.name,
            "cases": self.cases,
            "failures": self.failures,
            "passed": self.failures == 0,
            "counterexample": self.counterexample,
        })
    }
}

fn prop_rng(seed: u64, suite: SuiteName, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(derive_seed(seed, suite.salt()), index))
}

/// Optimizer profile for supremum values compared at tight tolerances.
fn accuracy_profile(params: &Params) -> Params {
    let mut p = params.clone();
    p.opt = OptimizerConfig { grid_points: 32, starts: 2, iters: 60, ..p.opt };
    p
}

/// Optimizer profile for decisions whose margins are valuation-sized.
fn margin_profile(params: &Params) -> Params {
    let mut p = params.clone();
    p.opt = OptimizerConfig { grid_points: 16, starts: 1, iters: 60, ..p.opt };
    p
}

fn opt_echo(p: &Params) -> Value {
    json!({
        "grid_points": p.opt.grid_points,
        "starts": p.opt.starts,
        "iters": p.opt.iters,
    })
}

pub fn run_suite(name: SuiteName, seed: u64, params: &Params) -> CliResult<SuiteOutcome> {
    if name == SuiteName::All {
        let order = [
            SuiteName::Ring,
            SuiteName::Ultrametric,
            SuiteName::Order,
            SuiteName::Sets,
            SuiteName::Support,
            SuiteName::Norms,
            SuiteName::Topology,
            SuiteName::Metric,
        ];
        let mut suites = Vec::new();
        let mut failures = 0;
        for s in order {
            let out = run_suite(s, seed, params)?;
            failures += out.failures;
            suites.push(out.json);
        }
        return Ok(SuiteOutcome {
            json: json!({
                "suite": "all",
                "seed": seed,
                "failures": failures,
                "passed": failures == 0,
                "suites": suites,
            }),
            failures,
        });
    }
    let (props, extra) = match name {
        SuiteName::Ring => (ring_suite(seed, params)?, None),
        SuiteName::Ultrametric => (ultrametric_suite(seed, params)?, None),
        SuiteName::Order => (order_suite(seed, params)?, None),
        SuiteName::Sets => (sets_suite(seed, params)?, None),
        SuiteName::Support => {
            let p = accuracy_profile(params);
            (support_suite(seed, &p)?, Some(json!({ "optimizer": opt_echo(&p) })))
        }
        SuiteName::Norms => {
            let p = accuracy_profile(params);
            (norms_suite(seed, params)?, Some(json!({ "optimizer": opt_echo(&p) })))
        }
        SuiteName::Topology => {
            let p = margin_profile(params);
            (topology_suite(seed, &p)?, Some(json!({ "optimizer": opt_echo(&p) })))
        }
        SuiteName::Metric => {
            let p = margin_profile(params);
            (metric_suite(seed, &p)?, Some(json!({ "optimizer": opt_echo(&p) })))
        }
        SuiteName::All => unreachable!(),
    };
    let failures: usize = props.iter().map(|p| p.failures).sum();
    let cases: usize = props.iter().map(|p| p.cases).sum();
    let mut body = json!({
        "suite": name.as_str(),
        "seed": seed,
        "cases": cases,
        "failures": failures,
        "passed": failures == 0,
        "properties": props.iter().map(Prop::json).collect::<Vec<_>>(),
    });
    if let Some(Value::Object(map)) = extra {
        for (k, v) in map {
            body[k] = v;
        }
    }
    Ok(SuiteOutcome { json: body, failures })
}

// Generator helpers. Quarter-integer coefficients and half-integer
// exponents keep ring arithmetic exact in double precision.

fn rand_exact(rng: &mut ChaCha8Rng) -> ExactNet {
    let n = rng.gen_range(0..=3usize);
    let mut terms = Vec::new();
    for _ in 0..n {
        let mut c = f64::from(rng.gen_range(-16i32..=16)) / 4.0;
        if c == 0.0 {
            c = 1.25;
        }
        let e = f64::from(rng.gen_range(-6i32..=6)) / 2.0;
        terms.push((c, e));
    }
    ExactNet::from_terms(terms).unwrap()
}

fn rand_gn(rng: &mut ChaCha8Rng) -> Gn {
    Gn::Exact(rand_exact(rng))
}

fn exact_zero(x: &Gn) -> bool {
    x.as_exact().map(|e| e.valuation().is_none()).unwrap_or(false)
}

/// A combination of up to three bumps whose peak positions sit on a
/// separated lattice and whose magnitudes are pairwise distinct, so the
/// dominant basin is unambiguous at scan resolution.
fn rand_combo(rng: &mut ChaCha8Rng) -> SmoothExpr {
    use SmoothExpr as E;
    let count = rng.gen_range(1..=3usize);
    let mut slots: Vec<i32> = Vec::new();
    let mut tries = 0;
    while slots.len() < count && tries < 200 {
        tries += 1;
        let s = rng.gen_range(-4i32..=4);
        if slots.iter().all(|&t| (t - s).abs() >= 2) {
            slots.push(s);
        }
    }
    let mut mags = [0.75, 1.25, 2.0];
    for i in (1..mags.len()).rev() {
        let j = rng.gen_range(0..=i);
        mags.swap(i, j);
    }
    let widths = [1.0, 1.25, 1.5];
    let mut e = E::constant(0.0);
    for (j, &slot) in slots.iter().enumerate() {
        let c = mags[j] * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let s = f64::from(slot) * 0.25;
        let w = widths[rng.gen_range(0..widths.len())];
        let arg = E::mul(E::constant(1.0 / w), E::sub(E::var(0), E::constant(s)));
        e = E::add(e, E::mul(E::constant(c), E::Bump { order: 0, arg: Box::new(arg) }));
    }
    e
}

fn full1() -> StronglyInternalSet {
    StronglyInternalSet::full_space(1).unwrap()
}

fn combo_witness(params: &Params) -> CliResult<FunctionallyCompactSet> {
    Ok(interval(&Gn::constant(-3.0), &Gn::constant(3.0), params)?)
}

fn combo_gsf(expr: &SmoothExpr, params: &Params) -> CliResult<Gsf> {
    Ok(Gsf::new(vec![expr.clone()], full1(), params)?)
}

fn norm_samples(
    expr: &SmoothExpr,
    m: usize,
    k: &FunctionallyCompactSet,
    params: &Params,
) -> CliResult<Vec<f64>> {
    let gsf = combo_gsf(expr, params)?;
    let nv = norm_over(&gsf, k, m, params)?;
    let mut out = Vec::with_capacity(params.grid.len());
    for i in params.grid.indices() {
        out.push(nv.value.value_at(&params.grid, i)?);
    }
    Ok(out)
}

fn supported_combo(
    expr: &SmoothExpr,
    k: &FunctionallyCompactSet,
    order: usize,
    params: &Params,
) -> CliResult<CompactlySupportedGsf> {
    let gsf = combo_gsf(expr, params)?;
    match verify_compact_support(&gsf, k, order, 6, params)? {
        SupportCheck::Verified(c) => Ok(c),
        SupportCheck::Counterexample(_) => Err(CliError(format!(
            "a generated function failed its support check: {expr}"
        ))),
    }
}

fn eps_scaled(a: f64, e: SmoothExpr) -> SmoothExpr {
    use SmoothExpr as E;
    if a == 0.0 {
        e
    } else {
        E::mul(E::powf(E::eps(), a), e)
    }
}

fn finite_valuation(x: &Gn, params: &Params) -> CliResult<(f64, bool)> {
    let est = x.valuation(params);
    match est.value {
        Valuation::Finite(v) => Ok((v, est.reliable)),
        Valuation::PlusInfinity => Ok((f64::INFINITY, est.reliable)),
    }
}

// Ring suite: exact ring axioms, valuation arithmetic, idempotents.

fn ring_suite(seed: u64, params: &Params) -> CliResult<Vec<Prop>> {
    let s = SuiteName::Ring;
    let mut props = Vec::new();

    let laws: [(&'static str, fn(&Gn, &Gn, &Gn, &Params) -> colombeau::Result<Gn>); 5] = [
        ("addition is associative", |x, y, z, p| {
            x.add(y, p)?.add(z, p)?.sub(&x.add(&y.add(z, p)?, p)?, p)
        }),
        ("addition is commutative", |x, y, _z, p| x.add(y, p)?.sub(&y.add(x, p)?, p)),
        ("multiplication is associative", |x, y, z, p| {
            x.mul(y, p)?.mul(z, p)?.sub(&x.mul(&y.mul(z, p)?, p)?, p)
        }),
        ("multiplication is commutative", |x, y, _z, p| x.mul(y, p)?.sub(&y.mul(x, p)?, p)),
        ("multiplication distributes over addition", |x, y, z, p| {
            x.mul(&y.add(z, p)?, p)?.sub(&x.mul(y, p)?.add(&x.mul(z, p)?, p)?, p)
        }),
    ];
    for (idx, (name, law)) in laws.iter().enumerate() {
        let mut prop = Prop::new(name);
        let mut rng = prop_rng(seed, s, idx as u64);
        for case in 0..300 {
            let (x, y, z) = (rand_gn(&mut rng), rand_gn(&mut rng), rand_gn(&mut rng));
            let diff = law(&x, &y, &z, params)?;
            prop.record(exact_zero(&diff), || {
                json!({
                    "case": case,
                    "x": x.as_exact().unwrap().to_string(),
                    "y": y.as_exact().unwrap().to_string(),
                    "z": z.as_exact().unwrap().to_string(),
                })
            });
        }
        props.push(prop);
    }

    let mut prop = Prop::new("valuation adds over products");
    let mut rng = prop_rng(seed, s, 10);
    for case in 0..300 {
        let (x, y) = (rand_gn(&mut rng), rand_gn(&mut rng));
        if exact_zero(&x) || exact_zero(&y) {
            continue;
        }
        let vx = x.as_exact().unwrap().valuation().unwrap();
        let vy = y.as_exact().unwrap().valuation().unwrap();
        let vxy = x.mul(&y, params)?.as_exact().unwrap().valuation();
        prop.record(vxy == Some(vx + vy), || {
            json!({ "case": case, "x": x.as_exact().unwrap().to_string(),
                    "y": y.as_exact().unwrap().to_string(), "observed": vxy })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("valuation of a sum is at least the minimum");
    let mut rng = prop_rng(seed, s, 11);
    for case in 0..300 {
        let (x, y) = (rand_gn(&mut rng), rand_gn(&mut rng));
        let vx = x.as_exact().unwrap().valuation().unwrap_or(f64::INFINITY);
        let vy = y.as_exact().unwrap().valuation().unwrap_or(f64::INFINITY);
        let vs = x
            .add(&y, params)?
            .as_exact()
            .unwrap()
            .valuation()
            .unwrap_or(f64::INFINITY);
        prop.record(vs >= vx.min(vy), || {
            json!({ "case": case, "x": x.as_exact().unwrap().to_string(),
                    "y": y.as_exact().unwrap().to_string(), "observed": vs })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("sampled valuation matches the exact leading exponent");
    let mut rng = prop_rng(seed, s, 12);
    for case in 0..150 {
        let x = rand_gn(&mut rng);
        let sampled = x.to_sampled(params)?;
        let est = sampled.estimate_valuation(params);
        let ok = match x.as_exact().unwrap().valuation() {
            None => matches!(est.value, Valuation::PlusInfinity),
            Some(v) => match est.value {
                Valuation::Finite(w) => (w - v).abs() <= 0.05 && est.reliable,
                Valuation::PlusInfinity => false,
            },
        };
        prop.record(ok, || {
            json!({ "case": case, "x": x.as_exact().unwrap().to_string(),
                    "exact": x.as_exact().unwrap().valuation(),
                    "estimated": format!("{:?}", est.value) })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("idempotents square to themselves per grid point");
    let variants = idempotent_variants();
    for (vi, set) in variants.iter().enumerate() {
        let e = set.idempotent(params);
        let ee = e.mul(&e, params)?;
        let mut ok = true;
        for i in params.grid.indices() {
            if ee.value_at(&params.grid, i)? != e.value_at(&params.grid, i)? {
                ok = false;
            }
        }
        prop.record(ok, || json!({ "variant": vi }));
    }
    props.push(prop);

    let mut prop = Prop::new("interleaving a net with itself returns the net");
    let mut rng = prop_rng(seed, s, 13);
    for case in 0..20 {
        let x = rand_gn(&mut rng);
        let set = idempotent_variants()[case % 3].clone();
        let z = interleave(&[x.clone(), x.clone()], &[set.clone(), set.complement()], params)?;
        let mut ok = true;
        for i in params.grid.indices() {
            let a = x.value_at(&params.grid, i)?;
            let b = z.value_at(&params.grid, i)?;
            if (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
                ok = false;
            }
        }
        prop.record(ok, || json!({ "case": case, "x": x.as_exact().unwrap().to_string() }));
    }
    props.push(prop);

    Ok(props)
}

fn idempotent_variants() -> Vec<IdempotentSet> {
    vec![
        IdempotentSet::alternating_blocks(1, 0).unwrap(),
        IdempotentSet::alternating_blocks(2, 1).unwrap(),
        IdempotentSet::eps_intervals(vec![(0.0, 0.01)]).unwrap(),
    ]
}

// Ultrametric suite: the sharp distance on exact nets.

fn ultrametric_suite(seed: u64, params: &Params) -> CliResult<Vec<Prop>> {
    let s = SuiteName::Ultrametric;
    let mut props = Vec::new();

    let mut prop = Prop::new("sharp distance satisfies the ultrametric triangle");
    let mut rng = prop_rng(seed, s, 0);
    for case in 0..1000 {
        let (x, y, z) = (rand_gn(&mut rng), rand_gn(&mut rng), rand_gn(&mut rng));
        let dxz = x.sharp_distance(&z, params)?;
        let dxy = x.sharp_distance(&y, params)?;
        let dyz = y.sharp_distance(&z, params)?;
        prop.record(dxz <= dxy.max(dyz), || {
            json!({ "case": case,
                    "x": x.as_exact().unwrap().to_string(),
                    "y": y.as_exact().unwrap().to_string(),
                    "z": z.as_exact().unwrap().to_string(),
                    "d_xz": dxz, "d_xy": dxy, "d_yz": dyz })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("sharp distance is symmetric");
    let mut rng = prop_rng(seed, s, 1);
    for case in 0..500 {
        let (x, y) = (rand_gn(&mut rng), rand_gn(&mut rng));
        let a = x.sharp_distance(&y, params)?;
        let b = y.sharp_distance(&x, params)?;
        prop.record(a == b, || json!({ "case": case, "a": a, "b": b }));
    }
    props.push(prop);

    let mut prop = Prop::new("sharp distance vanishes exactly on negligible differences");
    let mut rng = prop_rng(seed, s, 2);
    for case in 0..200 {
        let x = rand_gn(&mut rng);
        let y = if case % 4 == 0 { x.clone() } else { rand_gn(&mut rng) };
        let d = x.sharp_distance(&y, params)?;
        let zero_diff = exact_zero(&x.sub(&y, params)?);
        prop.record((d == 0.0) == zero_diff, || {
            json!({ "case": case, "distance": d, "difference_zero": zero_diff })
        });
    }
    props.push(prop);

    Ok(props)
}

// Order suite: positivity decisions, witnesses, and the eventual order.

fn order_suite(seed: u64, params: &Params) -> CliResult<Vec<Prop>> {
    let s = SuiteName::Order;
    let mut props = Vec::new();

    let mut prop = Prop::new("positivity, invertible nonnegativity, and the witness power agree");
    let mut rng = prop_rng(seed, s, 0);
    for case in 0..500 {
        let x = if case % 50 == 0 { Gn::zero() } else { rand_gn(&mut rng) };
        let oracle = x.as_exact().unwrap().strictly_positive();
        let w = x.strictly_positive(params)?;
        let mut ok = w.decision == if oracle { Tri::True } else { Tri::False };
        let mut leg = "decision matches the leading coefficient";
        if ok && oracle {
            match w.witness {
                Some(m) => {
                    let probe = Gn::eps_power(f64::from(m)).leq(&x, params)?;
                    if probe != Tri::True {
                        ok = false;
                        leg = "the witness power is not below the net";
                    }
                }
                None => {
                    ok = false;
                    leg = "a positive decision must carry a witness";
                }
            }
        }
        if ok {
            let inv = x.is_invertible(params)?;
            let nonneg = Gn::zero().leq(&x, params)?;
            let both = inv == Tri::True && nonneg == Tri::True;
            if both != oracle {
                ok = false;
                leg = "invertible nonnegativity disagrees with positivity";
            }
        }
        prop.record(ok, || {
            json!({ "case": case, "x": x.as_exact().unwrap().to_string(), "leg": leg })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("the eventual order is transitive");
    let mut rng = prop_rng(seed, s, 1);
    for case in 0..200 {
        let x = rand_gn(&mut rng);
        let t1 = rand_gn(&mut rng);
        let t2 = rand_gn(&mut rng);
        let y = x.add(&t1.mul(&t1, params)?, params)?;
        let z = y.add(&t2.mul(&t2, params)?, params)?;
        let ok = x.leq(&y, params)? == Tri::True
            && y.leq(&z, params)? == Tri::True
            && x.leq(&z, params)? == Tri::True;
        prop.record(ok, || {
            json!({ "case": case, "x": x.as_exact().unwrap().to_string(),
                    "y": y.as_exact().unwrap().to_string(),
                    "z": z.as_exact().unwrap().to_string() })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("mutual eventual order forces equality");
    let mut rng = prop_rng(seed, s, 2);
    for case in 0..100 {
        let x = rand_gn(&mut rng);
        let y = if case % 2 == 0 { x.clone() } else { rand_gn(&mut rng) };
        let mutual = x.leq(&y, params)? == Tri::True && y.leq(&x, params)? == Tri::True;
        let ok = !mutual || exact_zero(&x.sub(&y, params)?);
        prop.record(ok, || {
            json!({ "case": case, "x": x.as_exact().unwrap().to_string(),
                    "y": y.as_exact().unwrap().to_string() })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("higher epsilon powers sit below lower ones");
    for m in 0..12i32 {
        let hi = Gn::eps_power(f64::from(m + 1));
        let lo = Gn::eps_power(f64::from(m));
        prop.record(hi.leq(&lo, params)? == Tri::True, || json!({ "power": m }));
    }
    props.push(prop);

    Ok(props)
}

// Sets suite: exterior decisions, interleavings, and exhaustions.

fn lattice(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let steps = ((hi - lo) / 0.25).round() as i32;
    lo + 0.25 * f64::from(rng.gen_range(0..=steps))
}

fn sets_suite(seed: u64, params: &Params) -> CliResult<Vec<Prop>> {
    let s = SuiteName::Sets;
    let mut props = Vec::new();
    let variants = idempotent_variants();

    let mut prop = Prop::new("exterior points never interleave into the set");
    let mut rng = prop_rng(seed, s, 0);
    for case in 0..50 {
        let a = lattice(&mut rng, -2.0, 0.0);
        let b = a + 0.5 + lattice(&mut rng, 0.0, 2.0);
        let k = interval(&Gn::constant(a), &Gn::constant(b), params)?;
        let set = variants[case % variants.len()].clone();
        let x = b + 0.5 + lattice(&mut rng, 0.0, 1.0);
        let exterior = member_exterior(&GPoint::from_reals(&[x])?, &k, params)?;
        let inside = 0.5 * (a + b);
        let z = interleave(
            &[Gn::constant(x), Gn::constant(inside)],
            &[set.clone(), set.complement()],
            params,
        )?;
        let membership = member_internal(&GPoint::new(vec![z])?, k.set(), params)?;
        let ok = exterior.decision == Tri::True && membership == Tri::False;
        prop.record(ok, || {
            json!({ "case": case, "interval": [a, b], "x": x,
                    "exterior": format!("{:?}", exterior.decision),
                    "interleaved_member": format!("{membership:?}") })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("non-exterior points admit a member interleaving");
    let mut rng = prop_rng(seed, s, 1);
    for case in 0..50 {
        let a = lattice(&mut rng, -2.0, 0.0);
        let b = a + 0.5 + lattice(&mut rng, 0.0, 2.0);
        let k = interval(&Gn::constant(a), &Gn::constant(b), params)?;
        let set = variants[case % variants.len()].clone();
        let x = if case % 5 == 0 { b } else { a + (b - a) * 0.25 * f64::from(rng.gen_range(1..=3)) };
        let exterior = member_exterior(&GPoint::from_reals(&[x])?, &k, params)?;
        let inside = 0.5 * (a + b);
        let z = interleave(
            &[Gn::constant(x), Gn::constant(inside)],
            &[set.clone(), set.complement()],
            params,
        )?;
        let membership = member_internal(&GPoint::new(vec![z])?, k.set(), params)?;
        let ok = exterior.decision == Tri::False && membership == Tri::True;
        prop.record(ok, || {
            json!({ "case": case, "interval": [a, b], "x": x,
                    "exterior": format!("{:?}", exterior.decision),
                    "interleaved_member": format!("{membership:?}") })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("exterior decisions agree across equal representatives");
    let mut rng = prop_rng(seed, s, 2);
    for case in 0..20 {
        let a = lattice(&mut rng, -2.0, 0.0);
        let b = a + 1.0 + lattice(&mut rng, 0.0, 1.0);
        let k = interval(&Gn::constant(a), &Gn::constant(b), params)?;
        let dup: InternalSet = BoxNet::new(vec![
            k.set().net().boxes()[0].clone(),
            k.set().net().boxes()[0].clone(),
        ])?
        .into();
        let l = FunctionallyCompactSet::new(dup, params)?;
        let equal = hausdorff_equal(k.set(), l.set(), params)?;
        let x = lattice(&mut rng, -4.0, 4.0);
        let p = GPoint::from_reals(&[x])?;
        let da = member_exterior(&p, &k, params)?.decision;
        let db = member_exterior(&p, &l, params)?.decision;
        prop.record(equal == Tri::True && da == db, || {
            json!({ "case": case, "interval": [a, b], "x": x,
                    "first": format!("{da:?}"), "second": format!("{db:?}") })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("strongly internal sets absorb interleavings of members");
    let mut rng = prop_rng(seed, s, 3);
    for case in 0..20 {
        let a = lattice(&mut rng, -2.0, 0.0);
        let b = a + 1.0 + lattice(&mut rng, 0.0, 1.0);
        let u = StronglyInternalSet::open_interval(a, b, params)?;
        let x = a + (b - a) * 0.25 * f64::from(rng.gen_range(1..=3));
        let y = a + (b - a) * 0.25 * f64::from(rng.gen_range(1..=3));
        let set = variants[case % variants.len()].clone();
        let z = interleave(
            &[Gn::constant(x), Gn::constant(y)],
            &[set.clone(), set.complement()],
            params,
        )?;
        let w = member_strongly(&GPoint::new(vec![z])?, &u, params)?;
        prop.record(w.decision == Tri::True, || {
            json!({ "case": case, "interval": [a, b], "x": x, "y": y,
                    "decision": format!("{:?}", w.decision) })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("a two-piece union is not closed under interleaving");
    {
        let k = interval(&Gn::constant(-0.5), &Gn::constant(0.5), params)?;
        let h = interval(&Gn::constant(2.5), &Gn::constant(3.5), params)?;
        let union = interleaving_union(&k, &h, params)?;
        let blocks = IdempotentSet::alternating_blocks(1, 0)?;
        let hopper = interleave(
            &[Gn::constant(0.0), Gn::constant(3.0)],
            &[blocks.clone(), blocks.complement()],
            params,
        )?;
        let x = GPoint::new(vec![hopper])?;
        let in_union = member_internal(&x, union.set(), params)?;
        let u1 = StronglyInternalSet::open_interval(-0.5, 0.5, params)?;
        let u2 = StronglyInternalSet::open_interval(2.5, 3.5, params)?;
        let s1 = member_strongly(&x, &u1, params)?.decision;
        let s2 = member_strongly(&x, &u2, params)?.decision;
        let ok = in_union == Tri::True && s1 == Tri::False && s2 == Tri::False;
        prop.record(ok, || {
            json!({ "union_member": format!("{in_union:?}"),
                    "first_piece": format!("{s1:?}"), "second_piece": format!("{s2:?}") })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("exhaustions grow with their index");
    {
        let u = StronglyInternalSet::open_interval(-1.5, 2.0, params)?;
        let j0 = u.base_index();
        for step in 0..3 {
            let j = j0 + step;
            let small = exhaustion(&u, j, params)?;
            let large = exhaustion(&u, j + 1, params)?;
            for &x in &[-1.25, 0.0, 0.75, 1.75] {
                let p = GPoint::from_reals(&[x])?;
                let in_small = member_internal(&p, small.set(), params)?;
                let in_large = member_internal(&p, large.set(), params)?;
                let ok = in_small != Tri::True || in_large == Tri::True;
                prop.record(ok, || {
                    json!({ "index": j, "x": x,
                            "small": format!("{in_small:?}"), "large": format!("{in_large:?}") })
                });
            }
        }
    }
    props.push(prop);

    Ok(props)
}

// Support suite: extreme values, images, and support verification.

fn support_suite(seed: u64, params: &Params) -> CliResult<Vec<Prop>> {
    let s = SuiteName::Support;
    let mut props = Vec::new();

    let mut prop = Prop::new("extreme values sandwich every member evaluation");
    let mut rng = prop_rng(seed, s, 0);
    for case in 0..8 {
        let f = rand_combo(&mut rng);
        let gsf = combo_gsf(&f, params)?;
        let a = lattice(&mut rng, -2.5, -0.5);
        let b = a + 1.0 + lattice(&mut rng, 0.0, 2.0);
        let k = interval(&Gn::constant(a), &Gn::constant(b.min(2.5)), params)?;
        let b = b.min(2.5);
        let ext = extreme_values(&gsf, &k, params)?;
        let mut ok = true;
        let mut detail = json!(null);
        'points: for j in 1..=4 {
            let x = a + (b - a) * f64::from(j) / 5.0;
            let val = gsf.eval(&GPoint::from_reals(&[x])?, params)?;
            for i in params.grid.indices() {
                let lo = ext.min.value_at(&params.grid, i)?;
                let hi = ext.max.value_at(&params.grid, i)?;
                let v = val.coord(0).value_at(&params.grid, i)?;
                if !(lo - 1e-7 <= v && v <= hi + 1e-7) {
                    ok = false;
                    detail = json!({ "case": case, "f": f.to_string(), "x": x,
                                     "index": i, "value": v, "min": lo, "max": hi });
                    break 'points;
                }
            }
        }
        prop.record(ok, || detail);
    }
    props.push(prop);

    let mut prop = Prop::new("the image enclosure contains member images");
    let mut rng = prop_rng(seed, s, 1);
    for case in 0..4 {
        let f = rand_combo(&mut rng);
        let gsf = combo_gsf(&f, params)?;
        let k = interval(&Gn::constant(-1.0), &Gn::constant(1.5), params)?;
        let enc = image_enclosure(&gsf, &k, params)?;
        let mut ok = true;
        for &x in &[-0.75, 0.25, 1.0] {
            let y = gsf.eval(&GPoint::from_reals(&[x])?, params)?;
            if member_internal(&y, enc.set.set(), params)? == Tri::False {
                ok = false;
            }
        }
        prop.record(ok, || json!({ "case": case, "f": f.to_string() }));
    }
    props.push(prop);

    let mut prop = Prop::new("support verification is monotone in the witness");
    let mut rng = prop_rng(seed, s, 2);
    for case in 0..4 {
        let f = rand_combo(&mut rng);
        let small = combo_witness(params)?;
        let large = interval(&Gn::constant(-4.0), &Gn::constant(4.0), params)?;
        let on_small = supported_combo(&f, &small, 1, params).is_ok();
        let on_large = supported_combo(&f, &large, 1, params).is_ok();
        prop.record(on_small && on_large, || {
            json!({ "case": case, "f": f.to_string(),
                    "small": on_small, "large": on_large })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("derivatives keep the support witness");
    let mut rng = prop_rng(seed, s, 3);
    for case in 0..4 {
        let f = rand_combo(&mut rng);
        let k = combo_witness(params)?;
        let csg = supported_combo(&f, &k, 2, params)?;
        let d = csg.derivative(&[1], params)?;
        let reverified = match verify_compact_support(d.gsf(), d.witness(), 1, 6, params)? {
            SupportCheck::Verified(_) => true,
            SupportCheck::Counterexample(_) => false,
        };
        prop.record(d.verified_to_order() == 1 && reverified, || {
            json!({ "case": case, "f": f.to_string(),
                    "verified_to": d.verified_to_order() })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("the global extension agrees inside and vanishes far away");
    let mut rng = prop_rng(seed, s, 4);
    for case in 0..4 {
        let f = rand_combo(&mut rng);
        let k = combo_witness(params)?;
        let csg = supported_combo(&f, &k, 1, params)?;
        let ext = extend_global(&csg, params)?;
        let mut ok = true;
        for &x in &[-0.5, 0.0, 0.75] {
            let a = csg.eval(&GPoint::from_reals(&[x])?, params)?;
            let b = ext.eval(&GPoint::from_reals(&[x])?, params)?;
            for i in params.grid.indices() {
                let va = a.coord(0).value_at(&params.grid, i)?;
                let vb = b.coord(0).value_at(&params.grid, i)?;
                if (va - vb).abs() > 1e-9 * (1.0 + va.abs()) {
                    ok = false;
                }
            }
        }
        let far = ext.eval(&GPoint::from_reals(&[10.0])?, params)?;
        for i in params.grid.indices() {
            if far.coord(0).value_at(&params.grid, i)?.abs() > 1e-12 {
                ok = false;
            }
        }
        prop.record(ok, || json!({ "case": case, "f": f.to_string() }));
    }
    props.push(prop);

    let mut prop = Prop::new("detached witnesses are refuted where the function peaks");
    let mut rng = prop_rng(seed, s, 5);
    for case in 0..4 {
        use SmoothExpr as E;
        let spot = lattice(&mut rng, -1.0, 1.0);
        let f = E::mul(
            E::constant(1.5),
            E::Bump { order: 0, arg: Box::new(E::sub(E::var(0), E::constant(spot))) },
        );
        let gsf = combo_gsf(&f, params)?;
        let at_peak =
            support_positive_at(&gsf, &GPoint::from_reals(&[spot])?, params)?;
        let detached =
            interval(&Gn::constant(spot + 3.0), &Gn::constant(spot + 4.0), params)?;
        let refuted = match verify_compact_support(&gsf, &detached, 1, 6, params)? {
            SupportCheck::Verified(_) => false,
            SupportCheck::Counterexample(_) => true,
        };
        prop.record(at_peak == Tri::True && refuted, || {
            json!({ "case": case, "spot": spot,
                    "peak_detected": format!("{at_peak:?}"), "refuted": refuted })
        });
    }
    props.push(prop);

    Ok(props)
}

// Norms suite: the norm axioms at acceptance tolerances plus valuation
// behavior under sums and exact scalings.

fn norms_suite(seed: u64, params: &Params) -> CliResult<Vec<Prop>> {
    use SmoothExpr as E;
    let s = SuiteName::Norms;
    let heavy = accuracy_profile(params);
    let light = margin_profile(params);
    let k = combo_witness(&heavy)?;
    let mut props = Vec::new();

    let mut prop = Prop::new("triangle, homogeneity, and product bounds hold per grid point");
    let mut rng = prop_rng(seed, s, 0);
    for case in 0..200 {
        let m = case % 2;
        let f = rand_combo(&mut rng);
        let g = rand_combo(&mut rng);
        let mut c = f64::from(rng.gen_range(-11i32..=11)) / 4.0;
        if c == 0.0 {
            c = 1.75;
        }
        let nf = norm_samples(&f, m, &k, &heavy)?;
        let ng = norm_samples(&g, m, &k, &heavy)?;
        let ncf = norm_samples(&E::mul(E::constant(c), f.clone()), m, &k, &heavy)?;
        let nsum = norm_samples(&E::add(f.clone(), g.clone()), m, &k, &light)?;
        let nprod = norm_samples(&E::mul(f.clone(), g.clone()), m, &k, &light)?;
        let factor = f64::powi(2.0, m as i32);
        let mut ok = true;
        let mut leg = "";
        let mut at = 0;
        for i in 0..nf.len() {
            if nf[i] < 0.0 || ng[i] < 0.0 {
                ok = false;
                leg = "negative norm sample";
                at = i;
                break;
            }
            if nsum[i] > nf[i] + ng[i] + 1e-9 {
                ok = false;
                leg = "triangle inequality";
                at = i;
                break;
            }
            if (ncf[i] - c.abs() * nf[i]).abs() > 1e-6 * c.abs() * nf[i] + 1e-12 {
                ok = false;
                leg = "absolute homogeneity";
                at = i;
                break;
            }
            if nprod[i] > factor * nf[i] * ng[i] * (1.0 + 1e-6) + 1e-12 {
                ok = false;
                leg = "product bound";
                at = i;
                break;
            }
        }
        prop.record(ok, || {
            json!({ "case": case, "m": m, "f": f.to_string(), "g": g.to_string(),
                    "c": c, "leg": leg, "index": at })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("exact scalings shift the norm valuation");
    let mut rng = prop_rng(seed, s, 1);
    for case in 0..40 {
        let m = case % 2;
        let f = rand_combo(&mut rng);
        let a = 0.5 * f64::from(rng.gen_range(0..=6));
        let base = combo_gsf(&f, &light)?;
        let scaled = combo_gsf(&eps_scaled(a, f.clone()), &light)?;
        let (v0, r0) = finite_valuation(&norm_over(&base, &k, m, &light)?.value, &light)?;
        let (v1, r1) = finite_valuation(&norm_over(&scaled, &k, m, &light)?.value, &light)?;
        let ok = r0 && r1 && (v1 - v0 - a).abs() <= 0.1;
        prop.record(ok, || {
            json!({ "case": case, "m": m, "f": f.to_string(), "a": a,
                    "base": v0, "scaled": v1 })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("sum valuations stay above the minimum and the peak bound");
    let mut rng = prop_rng(seed, s, 2);
    for case in 0..40 {
        let m = case % 2;
        let a = 0.5 * f64::from(rng.gen_range(0..=4));
        let b = 0.5 * f64::from(rng.gen_range(0..=4));
        let f = eps_scaled(a, rand_combo(&mut rng));
        let g = eps_scaled(b, rand_combo(&mut rng));
        let nf = norm_over(&combo_gsf(&f, &light)?, &k, m, &light)?.value;
        let ng = norm_over(&combo_gsf(&g, &light)?, &k, m, &light)?.value;
        let nsum =
            norm_over(&combo_gsf(&E::add(f.clone(), g.clone()), &light)?, &k, m, &light)?.value;
        let (vf, rf) = finite_valuation(&nf, &light)?;
        let (vg, rg) = finite_valuation(&ng, &light)?;
        let (vs, rs) = finite_valuation(&nsum, &light)?;
        let peaks = ((-vf).exp(), (-vg).exp(), (-vs).exp());
        let ok = rf
            && rg
            && rs
            && vs >= vf.min(vg) - 0.1
            && peaks.2 <= peaks.0.max(peaks.1) * 1.1;
        prop.record(ok, || {
            json!({ "case": case, "m": m, "f": f.to_string(), "g": g.to_string(),
                    "v_f": vf, "v_g": vg, "v_sum": vs })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("the norm does not depend on the covering witness");
    let mut rng = prop_rng(seed, s, 3);
    let wide = interval(&Gn::constant(-4.0), &Gn::constant(4.0), &heavy)?;
    for case in 0..10 {
        let m = case % 2;
        let f = rand_combo(&mut rng);
        let on_k = norm_samples(&f, m, &k, &heavy)?;
        let on_wide = norm_samples(&f, m, &wide, &heavy)?;
        let mut ok = true;
        for i in 0..on_k.len() {
            if (on_k[i] - on_wide[i]).abs() > 1e-6 * on_k[i].max(on_wide[i]) + 1e-12 {
                ok = false;
            }
        }
        prop.record(ok, || json!({ "case": case, "m": m, "f": f.to_string() }));
    }
    props.push(prop);

    let mut prop = Prop::new("the zero function has negligible norm");
    {
        let zero = combo_gsf(&E::constant(0.0), &light)?;
        let n = norm_over(&zero, &k, 1, &light)?.value;
        prop.record(n.is_negligible(&light) == Tri::True, || json!({}));
    }
    props.push(prop);

    Ok(props)
}

// Topology suite: ball and C-set inclusions, convexity, and the scaled
// delta shadow.

fn topology_suite(seed: u64, params: &Params) -> CliResult<Vec<Prop>> {
    use SmoothExpr as E;
    let s = SuiteName::Topology;
    let k = combo_witness(params)?;
    let mut props = Vec::new();

    let mut incl_a = Prop::new("C-set membership implies ball membership at lower exponents");
    let mut incl_b = Prop::new("ball membership implies C-set membership at higher exponents");
    let mut nonvac = Prop::new("the inclusion premises trigger often enough");
    let mut hits_a = 0usize;
    let mut hits_b = 0usize;
    let mut rng = prop_rng(seed, s, 0);
    for case in 0..100 {
        let m = rng.gen_range(0..=1usize);
        let f0 = rand_combo(&mut rng);
        let h = rand_combo(&mut rng);
        let a = 0.5 * f64::from(rng.gen_range(1..=7));
        let rho_exp = 0.25 + f64::from(rng.gen_range(0..=3));
        let r = (-rho_exp).exp();
        let g_expr = E::add(f0.clone(), eps_scaled(a, h.clone()));
        let fc = supported_combo(&f0, &k, m, params)?;
        let gc = supported_combo(&g_expr, &k, m, params)?;

        let q = (rho_exp.floor() - f64::from(rng.gen_range(0..=2))).max(0.0);
        if c_set_member(&fc, &gc, m, r, params)? {
            hits_a += 1;
            let ball = ball_member(&fc, &gc, m, &Gn::eps_power(q), params)?;
            incl_a.record(ball == Tri::True, || {
                json!({ "case": case, "m": m, "a": a, "log_radius": rho_exp, "q": q,
                        "ball": format!("{ball:?}") })
            });
        }

        let sigma = rho_exp + 0.5 + f64::from(rng.gen_range(0..=1));
        let qb = sigma.ceil() + f64::from(rng.gen_range(0..=1));
        if ball_member(&fc, &gc, m, &Gn::eps_power(qb), params)? == Tri::True {
            hits_b += 1;
            let cs = c_set_member(&fc, &gc, m, r, params)?;
            incl_b.record(cs, || {
                json!({ "case": case, "m": m, "a": a, "log_radius": rho_exp,
                        "log_inner": sigma, "q": qb })
            });
        }
    }
    nonvac.record(hits_a >= 5 && hits_b >= 3, || {
        json!({ "premise_hits_forward": hits_a, "premise_hits_backward": hits_b })
    });
    props.push(incl_a);
    props.push(incl_b);
    props.push(nonvac);

    let mut prop = Prop::new("balls are convex over real blend weights");
    let mut rng = prop_rng(seed, s, 1);
    let zero = supported_combo(&E::constant(0.0), &k, 1, params)?;
    let rho = Gn::constant(5.0);
    for case in 0..25 {
        let m = case % 2;
        let f = E::mul(E::constant(0.25), rand_combo(&mut rng));
        let g = E::mul(E::constant(0.25), rand_combo(&mut rng));
        let t = 0.125 * f64::from(rng.gen_range(1..=7));
        let blend = E::add(
            E::mul(E::constant(t), f.clone()),
            E::mul(E::constant(1.0 - t), g.clone()),
        );
        let fc = supported_combo(&f, &k, m, params)?;
        let gc = supported_combo(&g, &k, m, params)?;
        let bc = supported_combo(&blend, &k, m, params)?;
        let inf = ball_member(&zero, &fc, m, &rho, params)?;
        let ing = ball_member(&zero, &gc, m, &rho, params)?;
        let inb = ball_member(&zero, &bc, m, &rho, params)?;
        let ok = inf == Tri::True && ing == Tri::True && inb == Tri::True;
        prop.record(ok, || {
            json!({ "case": case, "m": m, "t": t,
                    "f": format!("{inf:?}"), "g": format!("{ing:?}"),
                    "blend": format!("{inb:?}") })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("real scalings of the delta model stay below valuation minus one");
    {
        let delta_net = delta_embedding(1, 1.0, params)?.nets()[0].clone();
        let r = Gn::constant(2.0).mul(&Gn::eps_power(1.0), params)?;
        let tight = interval(&r.neg(), &r, params)?;
        for expo in -6..=6i32 {
            for sign in [-1.0, 1.0] {
                let lambda = sign * 10f64.powi(expo);
                let scaled = E::mul(E::constant(lambda), delta_net.clone());
                let gsf = combo_gsf(&scaled, params)?;
                let est = norm_over(&gsf, &tight, 0, params)?.value.valuation(params);
                let ok = match est.value {
                    Valuation::Finite(v) => est.reliable && v <= -0.95,
                    Valuation::PlusInfinity => false,
                };
                prop.record(ok, || {
                    json!({ "lambda": lambda, "estimate": format!("{:?}", est.value) })
                });
            }
        }
    }
    props.push(prop);

    Ok(props)
}

// Metric suite: equivalence of the two truncated metrics within their
// reported tails, plus the closed-form reference pair.

fn metric_suite(seed: u64, params: &Params) -> CliResult<Vec<Prop>> {
    use SmoothExpr as E;
    let s = SuiteName::Metric;
    let mut p = params.clone();
    p.max_derivative_order = 4;
    let k = combo_witness(&p)?;
    let mut props = Vec::new();

    let mut prop = Prop::new("both metrics respect their mutual tail bounds");
    let mut rng = prop_rng(seed, s, 0);
    for case in 0..100 {
        let f0 = rand_combo(&mut rng);
        let h = rand_combo(&mut rng);
        let a = 0.25 * f64::from(rng.gen_range(0..=8));
        let g_expr = E::add(f0.clone(), eps_scaled(a, h.clone()));
        let fc = supported_combo(&f0, &k, 1, &p)?;
        let gc = supported_combo(&g_expr, &k, 1, &p)?;
        let rep = metric(&fc, &gc, 20, &p)?;
        let mut ok = rep.within_tail_bounds()
            && rep.n_trunc == 4
            && rep.requested_trunc == 20
            && rep.d_e >= 0.0
            && rep.d_2 >= 0.0;
        let mut leg = if ok { "" } else { "tail bounds" };
        if ok && case % 5 == 0 {
            let swapped = metric(&gc, &fc, 20, &p)?;
            if swapped.d_e != rep.d_e || swapped.d_2 != rep.d_2 {
                ok = false;
                leg = "symmetry";
            }
        }
        if ok && case % 10 == 0 {
            let same = metric(&fc, &fc, 20, &p)?;
            if same.d_e != 0.0 || same.d_2 != 0.0 {
                ok = false;
                leg = "self distance";
            }
        }
        prop.record(ok, || {
            json!({ "case": case, "f": f0.to_string(), "a": a, "leg": leg,
                    "d_e": rep.d_e, "d_2": rep.d_2,
                    "tail_e": rep.tail_e, "tail_2": rep.tail_2 })
        });
    }
    props.push(prop);

    let mut prop = Prop::new("the order-two pair matches its closed-form metric");
    {
        let bump = E::Bump { order: 0, arg: Box::new(E::var(0)) };
        let g_expr = E::add(bump.clone(), E::mul(E::powf(E::eps(), 2.0), bump.clone()));
        let fc = supported_combo(&bump, &k, 1, &p)?;
        let gc = supported_combo(&g_expr, &k, 1, &p)?;
        let rep = metric(&fc, &gc, 20, &p)?;
        let closed_e = 2.0 * (-2.0f64).exp() + (-3.0f64).exp() / (1.0 - (-1.0f64).exp());
        let closed_2 = 0.5 * (-1.0f64).exp() + 0.5;
        let err_e = (rep.d_e + rep.tail_e - closed_e).abs();
        let err_2 = (rep.d_2 + rep.tail_2 - closed_2).abs();
        prop.record(err_e <= 1e-9 && err_2 <= 1e-9, || {
            json!({ "d_e_plus_tail": rep.d_e + rep.tail_e, "closed_e": closed_e,
                    "d_2_plus_tail": rep.d_2 + rep.tail_2, "closed_2": closed_2 })
        });
    }
    props.push(prop);

    Ok(props)
}
