//! Command implementations. Each returns the report body and exit code;
//! rendering happens in one place so both formats share the same tree.

use colombeau::{
    ball_member, c_set_member, extreme_values, member_exterior, member_internal, member_strongly,
    metric, norm_over, parse_exact_net, u_set_member, verify_compact_support, BoxNet,
    FunctionallyCompactSet, GBox, GPoint, GeneralizedNumber as Gn, Gsf, InternalSet, Params,
    StronglyInternalSet, SupportCheck,
};
use serde_json::{json, Value};

use crate::config::Config;
use crate::demos::{run_demo, DemoName};
use crate::error::{CliError, CliResult};
use crate::input;
use crate::report::{tri_exit, tri_json, valuation_json, Rendered};
use crate::verify::{run_suite, SuiteName};

fn top(command: &str, cfg: &Config, payload: Value) -> Value {
    let mut body = json!({ "command": command, "config": cfg.echo() });
    if let (Value::Object(out), Value::Object(extra)) = (&mut body, payload) {
        for (k, v) in extra {
            out.insert(k, v);
        }
    }
    body
}

fn gn_report(x: &Gn, params: &Params) -> CliResult<Value> {
    let est = x.valuation(params);
    let mut samples = Vec::with_capacity(params.grid.len());
    for i in params.grid.indices() {
        let ls = x.sample_log(&params.grid, i)?;
        let v = ls.value();
        samples.push(json!({
            "k": params.grid.k_at(i),
            "eps": params.grid.eps(i),
            "value": if v.is_finite() { json!(v) } else { json!(null) },
            "sign": ls.sign,
            "log_abs": if ls.log_abs.is_finite() { json!(ls.log_abs) } else { json!(null) },
        }));
    }
    let mut body = valuation_json(&est);
    body["e_norm"] = json!(est.value.e_norm());
    body["samples"] = json!(samples);
    Ok(body)
}

fn default_witness(dim: usize, params: &Params) -> CliResult<FunctionallyCompactSet> {
    let lo = vec![Gn::constant(-2.0); dim];
    let hi = vec![Gn::constant(2.0); dim];
    let b = GBox::new(lo, hi, params)?;
    let set: InternalSet = BoxNet::new(vec![b])?.into();
    Ok(FunctionallyCompactSet::new(set, params)?)
}

fn witness_or_default(
    set: Option<&str>,
    dim: usize,
    params: &Params,
) -> CliResult<FunctionallyCompactSet> {
    match set {
        Some(s) => input::parse_compact_set(s, params),
        None => default_witness(dim, params),
    }
}

fn supported(
    gsf: &Gsf,
    k: &FunctionallyCompactSet,
    order: usize,
    params: &Params,
) -> CliResult<colombeau::CompactlySupportedGsf> {
    match verify_compact_support(gsf, k, order, 6, params)? {
        SupportCheck::Verified(c) => Ok(c),
        SupportCheck::Counterexample(ce) => Err(CliError(format!(
            "support verification failed at derivative order {:?}; pass --set with a box that covers the support",
            ce.order
        ))),
    }
}

pub fn cmd_eval(exprs: &[String], at: &str, cfg: &Config) -> CliResult<Rendered> {
    let params = &cfg.params;
    let nets = input::parse_components(exprs)?;
    let point = input::parse_point(at)?;
    let needed = input::inferred_dim(&nets, 1);
    if needed > point.dim() {
        return Err(CliError(format!(
            "the expression uses x{needed} but the point has dimension {}",
            point.dim()
        )));
    }
    let gsf = input::build_gsf(nets, point.dim(), params)?;
    let value = gsf.eval(&point, params)?;
    let mut components = Vec::new();
    for d in 0..value.dim() {
        components.push(gn_report(value.coord(d), params)?);
    }
    Ok(Rendered::decided(top(
        "eval",
        cfg,
        json!({ "expr": exprs, "point": at, "components": components }),
    )))
}

pub fn cmd_norm(
    exprs: &[String],
    set: Option<&str>,
    order: usize,
    cfg: &Config,
) -> CliResult<Rendered> {
    let params = &cfg.params;
    let nets = input::parse_components(exprs)?;
    let dim = input::inferred_dim(&nets, 1);
    let k = witness_or_default(set, dim, params)?;
    let gsf = input::build_gsf(nets, dim, params)?;
    let nv = norm_over(&gsf, &k, order, params)?;
    let mut payload = json!({ "expr": exprs, "order": order, "dim": dim });
    payload["norm"] = gn_report(&nv.value, params)?;
    Ok(Rendered::decided(top("norm", cfg, payload)))
}

pub fn cmd_metric(
    f: &str,
    g: &str,
    trunc: usize,
    set: Option<&str>,
    cfg: &Config,
) -> CliResult<Rendered> {
    let params = &cfg.params;
    let fn_nets = input::parse_components(&[f.to_owned()])?;
    let gn_nets = input::parse_components(&[g.to_owned()])?;
    let dim = input::inferred_dim(&fn_nets, input::inferred_dim(&gn_nets, 1));
    let k = witness_or_default(set, dim, params)?;
    let fc = supported(&input::build_gsf(fn_nets, dim, params)?, &k, 1, params)?;
    let gc = supported(&input::build_gsf(gn_nets, dim, params)?, &k, 1, params)?;
    let rep = metric(&fc, &gc, trunc, params)?;
    let valuations: Vec<Value> = rep
        .valuations
        .iter()
        .enumerate()
        .map(|(idx, est)| {
            let mut v = valuation_json(est);
            v["n"] = json!(idx + 1);
            v
        })
        .collect();
    Ok(Rendered::decided(top(
        "metric",
        cfg,
        json!({
            "f": f,
            "g": g,
            "d_e": rep.d_e,
            "d_2": rep.d_2,
            "d_e_uncertainty": rep.d_e_uncertainty,
            "d_2_uncertainty": rep.d_2_uncertainty,
            "n_trunc": rep.n_trunc,
            "requested_trunc": rep.requested_trunc,
            "tail_e": rep.tail_e,
            "tail_2": rep.tail_2,
            "within_tail_bounds": rep.within_tail_bounds(),
            "valuations": valuations,
        }),
    )))
}

pub struct MemberArgs {
    pub internal: bool,
    pub exterior: bool,
    pub strongly: bool,
    pub ball: bool,
    pub cset: bool,
    pub uset: bool,
    pub point: Option<String>,
    pub set: Option<String>,
    pub f: Option<String>,
    pub g: Option<String>,
    pub order: usize,
    pub radius: Option<String>,
}

impl MemberArgs {
    fn mode(&self) -> CliResult<&'static str> {
        let picked: Vec<&'static str> = [
            (self.internal, "internal"),
            (self.exterior, "exterior"),
            (self.strongly, "strongly"),
            (self.ball, "ball"),
            (self.cset, "cset"),
            (self.uset, "uset"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, name)| *name)
        .collect();
        match picked.as_slice() {
            [one] => Ok(one),
            [] => Err(CliError(
                "pick one of --internal, --exterior, --strongly, --ball, --cset, --uset".into(),
            )),
            _ => Err(CliError("the membership modes are mutually exclusive".into())),
        }
    }
}

pub fn cmd_member(args: &MemberArgs, cfg: &Config) -> CliResult<Rendered> {
    let params = &cfg.params;
    let mode = args.mode()?;
    match mode {
        "internal" | "exterior" | "strongly" => {
            let point = args
                .point
                .as_deref()
                .ok_or_else(|| CliError("point membership needs --point".into()))?;
            let set = args
                .set
                .as_deref()
                .ok_or_else(|| CliError("point membership needs --set".into()))?;
            let x = input::parse_point(point)?;
            let (decision, witness) = match mode {
                "internal" => {
                    let net = input::parse_box_net(set, params)?;
                    let k: InternalSet = net.into();
                    (member_internal(&x, &k, params)?, None)
                }
                "exterior" => {
                    let k = input::parse_compact_set(set, params)?;
                    let w = member_exterior(&x, &k, params)?;
                    (w.decision, w.witness)
                }
                _ => {
                    let net = input::parse_box_net(set, params)?;
                    let u = StronglyInternalSet::new(net, params)?;
                    let w = member_strongly(&x, &u, params)?;
                    (w.decision, w.witness)
                }
            };
            let exit = tri_exit(decision);
            Ok(Rendered {
                json: top(
                    "member",
                    cfg,
                    json!({ "mode": mode, "point": point, "set": set,
                            "decision": tri_json(decision), "witness": witness }),
                ),
                exit,
            })
        }
        _ => {
            let f = args
                .f
                .as_deref()
                .ok_or_else(|| CliError("function membership needs --f".into()))?;
            let g = args
                .g
                .as_deref()
                .ok_or_else(|| CliError("function membership needs --g".into()))?;
            let radius = args
                .radius
                .as_deref()
                .ok_or_else(|| CliError("function membership needs --radius".into()))?;
            let fn_nets = input::parse_components(&[f.to_owned()])?;
            let gn_nets = input::parse_components(&[g.to_owned()])?;
            let dim = input::inferred_dim(&fn_nets, input::inferred_dim(&gn_nets, 1));
            let k = witness_or_default(args.set.as_deref(), dim, params)?;
            let order = args.order.min(params.max_derivative_order);
            let fc = supported(&input::build_gsf(fn_nets, dim, params)?, &k, order.min(1), params)?;
            let gc = supported(&input::build_gsf(gn_nets, dim, params)?, &k, order.min(1), params)?;
            let (decision_json, exit) = match mode {
                "ball" => {
                    let rho = Gn::Exact(parse_exact_net(radius)?);
                    let t = ball_member(&fc, &gc, args.order, &rho, params)?;
                    (tri_json(t), tri_exit(t))
                }
                "cset" => {
                    let r: f64 = radius
                        .parse()
                        .map_err(|_| CliError(format!("--radius {radius} is not a real number")))?;
                    let inside = c_set_member(&fc, &gc, args.order, r, params)?;
                    (json!(inside), 0)
                }
                _ => {
                    let rho = Gn::Exact(parse_exact_net(radius)?);
                    let t = u_set_member(&fc, &gc, args.order, &rho, params)?;
                    (tri_json(t), tri_exit(t))
                }
            };
            Ok(Rendered {
                json: top(
                    "member",
                    cfg,
                    json!({ "mode": mode, "f": f, "g": g, "order": args.order,
                            "radius": radius, "decision": decision_json }),
                ),
                exit,
            })
        }
    }
}

pub fn cmd_extreme(expr: &str, set: Option<&str>, cfg: &Config) -> CliResult<Rendered> {
    let params = &cfg.params;
    let nets = input::parse_components(&[expr.to_owned()])?;
    let dim = input::inferred_dim(&nets, 1);
    let k = witness_or_default(set, dim, params)?;
    let gsf = input::build_gsf(nets, dim, params)?;
    let ext = extreme_values(&gsf, &k, params)?;
    let arg_at = |p: &GPoint| -> CliResult<Vec<f64>> {
        (0..p.dim()).map(|d| Ok(p.coord(d).value_at(&params.grid, 0)?)).collect()
    };
    let mut payload = json!({
        "expr": expr,
        "argmin_at_largest_eps": arg_at(&ext.argmin)?,
        "argmax_at_largest_eps": arg_at(&ext.argmax)?,
    });
    payload["min"] = gn_report(&ext.min, params)?;
    payload["max"] = gn_report(&ext.max, params)?;
    Ok(Rendered::decided(top("extreme", cfg, payload)))
}

pub fn cmd_verify_support(
    exprs: &[String],
    set: &str,
    order: usize,
    budget: usize,
    cfg: &Config,
) -> CliResult<Rendered> {
    let params = &cfg.params;
    let nets = input::parse_components(exprs)?;
    let dim = input::inferred_dim(&nets, 1);
    let k = input::parse_compact_set(set, params)?;
    let gsf = input::build_gsf(nets, dim, params)?;
    let payload = match verify_compact_support(&gsf, &k, order, budget, params)? {
        SupportCheck::Verified(csg) => json!({
            "expr": exprs,
            "verified": true,
            "order": csg.verified_to_order(),
            "exterior_samples": csg.exterior_samples().len(),
        }),
        SupportCheck::Counterexample(ce) => {
            let coords: Vec<f64> = (0..ce.point.dim())
                .map(|d| ce.point.coord(d).value_at(&params.grid, 0))
                .collect::<colombeau::Result<_>>()?;
            json!({
                "expr": exprs,
                "verified": false,
                "counterexample": {
                    "point_at_largest_eps": coords,
                    "derivative_order": ce.order,
                },
            })
        }
    };
    Ok(Rendered::decided(top("verify-support", cfg, payload)))
}

pub fn cmd_demo(name: DemoName, cfg: &Config) -> CliResult<Rendered> {
    let rep = run_demo(name, &cfg.params)?;
    let exit = if rep.passed { 0 } else { 1 };
    Ok(Rendered { json: top("demo", cfg, rep.json), exit })
}

pub fn cmd_verify(suite: SuiteName, seed: Option<u64>, cfg: &Config) -> CliResult<Rendered> {
    let seed = seed.unwrap_or(cfg.params.seed);
    let out = run_suite(suite, seed, &cfg.params)?;
    Ok(Rendered::decided(top("verify", cfg, out.json)))
}
