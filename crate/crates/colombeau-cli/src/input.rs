//! Textual inputs: points as comma-separated exact nets, sets as JSON box
//! lists, functions as expression strings.
//!
//! A box net is a JSON list of boxes. Each box is a list of per-dimension
//! `[lo, hi]` pairs whose entries are numbers or exact-net strings. As a
//! shorthand, a box whose two entries are both scalars is read as a single
//! one-dimensional pair, so `[[-1, 1]]` is the unit interval.

use colombeau::{
    parse_exact_net, parse_expr, BoxNet, FunctionallyCompactSet, GBox, GPoint,
    GeneralizedNumber as Gn, Gsf, InternalSet, Params, SmoothExpr, StronglyInternalSet,
};
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Parses a point whose coordinates are exact-net expressions.
pub fn parse_point(s: &str) -> CliResult<GPoint> {
    let mut coords = Vec::new();
    for part in s.split(',') {
        coords.push(Gn::Exact(parse_exact_net(part.trim())?));
    }
    Ok(GPoint::new(coords)?)
}

fn corner(v: &Value) -> CliResult<Gn> {
    match v {
        Value::Number(n) => {
            let x = n
                .as_f64()
                .ok_or_else(|| CliError(format!("corner {n} is not a finite number")))?;
            Ok(Gn::constant(x))
        }
        Value::String(s) => Ok(Gn::Exact(parse_exact_net(s)?)),
        other => Err(CliError(format!(
            "a box corner must be a number or an exact-net string, got {other}"
        ))),
    }
}

fn is_scalar(v: &Value) -> bool {
    matches!(v, Value::Number(_) | Value::String(_))
}

fn parse_box(v: &Value, params: &Params) -> CliResult<GBox> {
    let entries = v
        .as_array()
        .ok_or_else(|| CliError(format!("a box must be a JSON list, got {v}")))?;
    if entries.len() == 2 && entries.iter().all(is_scalar) {
        let lo = corner(&entries[0])?;
        let hi = corner(&entries[1])?;
        return Ok(GBox::new(vec![lo], vec![hi], params)?);
    }
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for pair in entries {
        let pair = pair
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| CliError(format!("each dimension needs a [lo, hi] pair, got {pair}")))?;
        lo.push(corner(&pair[0])?);
        hi.push(corner(&pair[1])?);
    }
    Ok(GBox::new(lo, hi, params)?)
}

/// Parses a box net from its JSON encoding.
pub fn parse_box_net(s: &str, params: &Params) -> CliResult<BoxNet> {
    let v: Value = serde_json::from_str(s)
        .map_err(|e| CliError(format!("malformed set JSON: {e}")))?;
    let boxes = v
        .as_array()
        .ok_or_else(|| CliError(format!("a set must be a JSON list of boxes, got {v}")))?;
    if boxes.is_empty() {
        return Err(CliError("a set needs at least one box".into()));
    }
    let parsed = boxes.iter().map(|b| parse_box(b, params)).collect::<CliResult<Vec<_>>>()?;
    Ok(BoxNet::new(parsed)?)
}

/// Parses a set and wraps it as functionally compact, validating the
/// sharp-boundedness witness.
pub fn parse_compact_set(s: &str, params: &Params) -> CliResult<FunctionallyCompactSet> {
    let net = parse_box_net(s, params)?;
    let set: InternalSet = net.into();
    Ok(FunctionallyCompactSet::new(set, params)?)
}

/// Parses the expressions of a function, one string per component.
pub fn parse_components(exprs: &[String]) -> CliResult<Vec<SmoothExpr>> {
    if exprs.is_empty() {
        return Err(CliError("a function needs at least one component".into()));
    }
    exprs.iter().map(|e| Ok(parse_expr(e)?)).collect()
}

fn max_var(e: &SmoothExpr) -> usize {
    use SmoothExpr as E;
    match e {
        E::Var(i) => i + 1,
        E::Const(_) | E::Eps | E::EpsGate { .. } => 0,
        E::Add(a, b) | E::Sub(a, b) | E::Mul(a, b) | E::Div(a, b) => max_var(a).max(max_var(b)),
        E::Powi(a, _) | E::Powf(a, _) => max_var(a),
        E::Exp(a) | E::Log(a) | E::Sin(a) | E::Cos(a) | E::Tanh(a) => max_var(a),
        E::Bump { arg, .. } | E::Plateau { arg, .. } => max_var(arg),
    }
}

/// The smallest domain dimension covering every variable that occurs.
pub fn inferred_dim(nets: &[SmoothExpr], floor: usize) -> usize {
    nets.iter().map(max_var).max().unwrap_or(0).max(floor).max(1)
}

/// Builds a function over the full space of the inferred dimension.
pub fn build_gsf(nets: Vec<SmoothExpr>, dim: usize, params: &Params) -> CliResult<Gsf> {
    let domain = StronglyInternalSet::full_space(dim)?;
    Ok(Gsf::new(nets, domain, params)?)
}
