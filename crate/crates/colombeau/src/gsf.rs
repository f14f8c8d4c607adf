//! Functions given by nets of smooth expressions.
//!
//! A function carries one expression per codomain component, a strongly
//! internal domain, and a moderateness certificate sampled at construction.
//! Evaluation composes the expression with the point's per-grid samples in
//! the signed log encoding; polynomial expressions at exact points stay
//! exact. Extreme values and image boxes run the box optimizer per grid
//! point over a compact witness.
//!
//! Compact support is certified, not proved: the verifier samples exterior
//! points at powers-of-eps distances from the witness faces, a far point
//! beyond the sharp bound, and real-coordinate probes across a window
//! around the witness, then requires every derivative sample up to the
//! requested order to be negligible. Sampling finitely many points is a
//! semi-decision; the verified record logs exactly which points were
//! checked.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::ExactNet;
use crate::expr::SmoothExpr;
use crate::number::GeneralizedNumber as Gn;
use crate::optimize::{derive_seed, maximize_over_box, minimize_over_box};
use crate::params::{Params, VALUATION_MARGIN};
use crate::point::GPoint;
use crate::sampled::{LogSample, SampledNet, Valuation};
use crate::set::{
    assemble_net, eventual_max, eventual_min, find_covering_index, member_exterior,
    member_strongly, realize_at, sample_members, BoxNet, FunctionallyCompactSet, GBox,
    StronglyInternalSet,
};
use crate::tri::Tri;

use SmoothExpr as E;

/// Smoothing constant of the one-sided ramp used for mollified indicator
/// faces; it fixes where the flat-1 and flat-0 regions of a face end.
const RELU_SMOOTHING: f64 = 1.0 / 64.0;

const SALT_EXTREME_MAX: u64 = 0x6d61_7800;
const SALT_EXTREME_MIN: u64 = 0x6d69_6e00;
const SALT_EXTERIOR: u64 = 0x7665_7200;
const SALT_WITNESS_SUP: u64 = 0x7375_7000;

/// Record of the moderateness spot check run when a function is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeratenessCertificate {
    /// Highest total derivative order whose samples were checked.
    pub order: usize,
    /// Number of base points (or sup nets) the check evaluated.
    pub points: usize,
    /// True when the bound came from suprema over a support witness rather
    /// than from pointwise samples.
    pub from_witness_sup: bool,
}

/// A function defined by one smooth expression per codomain component.
#[derive(Debug, Clone)]
pub struct Gsf {
    nets: Vec<SmoothExpr>,
    domain: StronglyInternalSet,
    certificate: ModeratenessCertificate,
}

/// Evaluation result together with the domain membership decision; an
/// Undecidable check is a warning, not an error.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub value: GPoint,
    pub domain_check: Tri,
}

impl Gsf {
    /// Build a function and certify moderateness of every derivative net up
    /// to the configured order at the domain base points (box centers, or
    /// the origin for the full space).
    pub fn new(nets: Vec<SmoothExpr>, domain: StronglyInternalSet, params: &Params) -> Result<Gsf> {
        if nets.is_empty() {
            return Err(Error::PreconditionError(
                "a function needs at least one component".into(),
            ));
        }
        for net in &nets {
            net.check_orders()?;
            if let Some(v) = net.max_var() {
                if v >= domain.dim() {
                    return Err(Error::DimensionMismatch { expected: domain.dim(), got: v + 1 });
                }
            }
        }
        let base_points = certificate_points(&domain, params)?;
        let order = params.max_derivative_order;
        for net in &nets {
            for (_, deriv) in derivative_table(net, domain.dim(), order) {
                for x in &base_points {
                    if !eval_net(&deriv, x, params)?.is_moderate() {
                        return Err(Error::PreconditionError(
                            "a derivative net is immoderate at a domain base point".into(),
                        ));
                    }
                }
            }
        }
        let certificate =
            ModeratenessCertificate { order, points: base_points.len(), from_witness_sup: false };
        Ok(Gsf { nets, domain, certificate })
    }

    pub fn nets(&self) -> &[SmoothExpr] {
        &self.nets
    }

    pub fn domain(&self) -> &StronglyInternalSet {
        &self.domain
    }

    pub fn certificate(&self) -> ModeratenessCertificate {
        self.certificate
    }

    /// Domain dimension n.
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Codomain dimension d.
    pub fn codomain(&self) -> usize {
        self.nets.len()
    }

    /// The scalar function of one codomain component; the certificate
    /// carries over because its samples covered every component.
    pub fn component(&self, c: usize) -> Gsf {
        Gsf {
            nets: vec![self.nets[c].clone()],
            domain: self.domain.clone(),
            certificate: self.certificate,
        }
    }

    pub fn eval(&self, x: &GPoint, params: &Params) -> Result<GPoint> {
        Ok(self.eval_with_check(x, params)?.value)
    }

    /// Evaluate after the domain membership test; a decided False is an
    /// error, Undecidable is reported alongside the value.
    pub fn eval_with_check(&self, x: &GPoint, params: &Params) -> Result<EvalReport> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.dim() });
        }
        let domain_check = member_strongly(x, &self.domain, params)?.decision;
        if domain_check.is_false() {
            return Err(Error::PreconditionError(
                "the evaluation point is decidedly outside the domain".into(),
            ));
        }
        Ok(EvalReport { value: self.eval_unchecked(x, params)?, domain_check })
    }

    fn eval_unchecked(&self, x: &GPoint, params: &Params) -> Result<GPoint> {
        if self.nets.iter().all(|n| n.is_polynomial())
            && x.coords().iter().all(|c| c.as_exact().is_some())
        {
            let coords: Vec<ExactNet> =
                x.coords().iter().map(|c| c.as_exact().unwrap().clone()).collect();
            let comps = self
                .nets
                .iter()
                .map(|n| Ok(Gn::Exact(n.eval_exact(&coords)?)))
                .collect::<Result<Vec<_>>>()?;
            return GPoint::new(comps);
        }
        let comps = self
            .nets
            .iter()
            .map(|n| Ok(Gn::Sampled(eval_net(n, x, params)?)))
            .collect::<Result<Vec<_>>>()?;
        GPoint::new(comps)
    }

    /// Differentiate componentwise by the multi-index `alpha`.
    pub fn derivative(&self, alpha: &[u32], params: &Params) -> Result<Gsf> {
        if alpha.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: alpha.len() });
        }
        let total: u32 = alpha.iter().sum();
        if total as usize > params.max_derivative_order {
            return Err(Error::PreconditionError(format!(
                "derivative order {total} exceeds the configured cap {}",
                params.max_derivative_order
            )));
        }
        let nets: Vec<SmoothExpr> = self.nets.iter().map(|n| diff_multi(n, alpha)).collect();
        for net in &nets {
            net.check_orders()?;
        }
        Ok(Gsf { nets, domain: self.domain.clone(), certificate: self.certificate })
    }
}

/// A function whose vanishing outside a compact witness has been sampled.
#[derive(Debug, Clone)]
pub struct CompactlySupportedGsf {
    gsf: Gsf,
    witness: FunctionallyCompactSet,
    verified_to_order: usize,
    exterior_samples: Vec<ExteriorSample>,
}

/// One exterior point the support verifier accepted and checked.
#[derive(Debug, Clone)]
pub struct ExteriorSample {
    pub point: GPoint,
    /// Ring points sit eps^gap_exponent beyond a witness face; the far
    /// point records the negated exponent of its own magnitude.
    pub gap_exponent: i32,
}

/// First exterior point and derivative order whose samples were not
/// negligible.
#[derive(Debug, Clone)]
pub struct SupportCounterexample {
    pub point: GPoint,
    pub order: Vec<u32>,
}

/// Outcome of a support verification; a counterexample is a normal return.
#[derive(Debug, Clone)]
pub enum SupportCheck {
    Verified(CompactlySupportedGsf),
    Counterexample(SupportCounterexample),
}

impl CompactlySupportedGsf {
    pub fn gsf(&self) -> &Gsf {
        &self.gsf
    }

    pub fn witness(&self) -> &FunctionallyCompactSet {
        &self.witness
    }

    pub fn verified_to_order(&self) -> usize {
        self.verified_to_order
    }

    pub fn exterior_samples(&self) -> &[ExteriorSample] {
        &self.exterior_samples
    }

    pub fn eval(&self, x: &GPoint, params: &Params) -> Result<GPoint> {
        self.gsf.eval(x, params)
    }

    /// Differentiate; the support witness carries over with the verified
    /// order reduced by the total derivative order.
    pub fn derivative(&self, alpha: &[u32], params: &Params) -> Result<CompactlySupportedGsf> {
        let gsf = self.gsf.derivative(alpha, params)?;
        let spent: u32 = alpha.iter().sum();
        Ok(CompactlySupportedGsf {
            gsf,
            witness: self.witness.clone(),
            verified_to_order: self.verified_to_order.saturating_sub(spent as usize),
            exterior_samples: self.exterior_samples.clone(),
        })
    }
}

/// Componentwise extreme values of a scalar function over a compact set.
#[derive(Debug, Clone)]
pub struct Extremes {
    pub argmin: GPoint,
    pub argmax: GPoint,
    pub min: Gn,
    pub max: Gn,
}

/// Per grid point, minimize and maximize the expression over every realized
/// witness box and assemble the results into sampled nets.
pub fn extreme_values(f: &Gsf, k: &FunctionallyCompactSet, params: &Params) -> Result<Extremes> {
    if f.codomain() != 1 {
        return Err(Error::PreconditionError("extreme values need a scalar function".into()));
    }
    if k.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: k.dim() });
    }
    if k.set().is_empty_net() {
        return Err(Error::EmptySetError("extreme values over an empty set".into()));
    }
    ensure_inside_domain(k, f.domain(), params)?;
    let n = f.dim();
    let len = params.grid.len();
    let mut mins = Vec::with_capacity(len);
    let mut maxs = Vec::with_capacity(len);
    let mut argmins = vec![Vec::with_capacity(len); n];
    let mut argmaxs = vec![Vec::with_capacity(len); n];
    for i in params.grid.indices() {
        match optimize_index(&f.nets[0], k, i, params)? {
            Some(ex) => {
                mins.push(ex.min_value);
                maxs.push(ex.max_value);
                for d in 0..n {
                    argmins[d].push(LogSample::from_value(ex.min_arg[d])?);
                    argmaxs[d].push(LogSample::from_value(ex.max_arg[d])?);
                }
            }
            None => {
                mins.push(LogSample::zero());
                maxs.push(LogSample::zero());
                for d in 0..n {
                    argmins[d].push(LogSample::zero());
                    argmaxs[d].push(LogSample::zero());
                }
            }
        }
    }
    let assemble =
        |samples: Vec<LogSample>| Gn::Sampled(SampledNet::from_samples_in(params, samples));
    Ok(Extremes {
        argmin: GPoint::new(argmins.into_iter().map(&assemble).collect())?,
        argmax: GPoint::new(argmaxs.into_iter().map(&assemble).collect())?,
        min: assemble(mins),
        max: assemble(maxs),
    })
}

struct IndexExtremes {
    min_arg: Vec<f64>,
    min_value: LogSample,
    max_arg: Vec<f64>,
    max_value: LogSample,
}

fn optimize_index(
    net: &SmoothExpr,
    k: &FunctionallyCompactSet,
    i: usize,
    params: &Params,
) -> Result<Option<IndexExtremes>> {
    let boxes = realize_at(k.set().net(), &params.grid, i)?;
    if boxes.is_empty() {
        return Ok(None);
    }
    let eps = params.grid.eps(i);
    let log_eps = params.grid.log_eps(i);
    let mut objective = |xs: &[f64]| -> Result<LogSample> {
        let coords = xs.iter().map(|&v| LogSample::from_value(v)).collect::<Result<Vec<_>>>()?;
        net.eval_log(&coords, eps, log_eps)
    };
    let mut best: Option<IndexExtremes> = None;
    for (b, rb) in boxes.iter().enumerate() {
        let lo: Vec<f64> = rb.lo.iter().map(|s| s.value()).collect();
        let hi: Vec<f64> = rb.hi.iter().map(|s| s.value()).collect();
        let salt = ((i as u64) << 20) ^ ((b as u64) << 4);
        let mx = maximize_over_box(
            &mut objective,
            &lo,
            &hi,
            &params.opt,
            derive_seed(params.seed, SALT_EXTREME_MAX ^ salt),
        )?;
        let mn = minimize_over_box(
            &mut objective,
            &lo,
            &hi,
            &params.opt,
            derive_seed(params.seed, SALT_EXTREME_MIN ^ salt),
        )?;
        best = Some(match best {
            None => IndexExtremes {
                min_arg: mn.arg,
                min_value: mn.value,
                max_arg: mx.arg,
                max_value: mx.value,
            },
            Some(mut cur) => {
                if mn.value.cmp_signed(cur.min_value) == Ordering::Less {
                    cur.min_arg = mn.arg;
                    cur.min_value = mn.value;
                }
                if mx.value.cmp_signed(cur.max_value) == Ordering::Greater {
                    cur.max_arg = mx.arg;
                    cur.max_value = mx.value;
                }
                cur
            }
        });
    }
    Ok(best)
}

/// A compact box net containing the image f(K), componentwise [min, max].
#[derive(Debug, Clone)]
pub struct ImageEnclosure {
    pub set: FunctionallyCompactSet,
    /// True when the box is the image itself: one codomain component over a
    /// single connected witness box.
    pub exact: bool,
}

pub fn image_enclosure(
    f: &Gsf,
    k: &FunctionallyCompactSet,
    params: &Params,
) -> Result<ImageEnclosure> {
    let mut lows = Vec::with_capacity(f.codomain());
    let mut highs = Vec::with_capacity(f.codomain());
    for c in 0..f.codomain() {
        let ex = extreme_values(&f.component(c), k, params)?;
        lows.push(ex.min);
        highs.push(ex.max);
    }
    let gbox = GBox::new(lows, highs, params)?;
    let set = FunctionallyCompactSet::new(BoxNet::new(vec![gbox])?.into(), params)?;
    Ok(ImageEnclosure { set, exact: f.codomain() == 1 && k.set().net().boxes().len() == 1 })
}

/// Point test for the set generating the support: is |f(x)| strictly
/// positive? The closure itself is never computed.
pub fn support_positive_at(f: &Gsf, x: &GPoint, params: &Params) -> Result<Tri> {
    let report = f.eval_with_check(x, params)?;
    let magnitude = report.value.euclidean_abs(params)?;
    Ok(magnitude.strictly_positive(params)?.decision)
}

/// Sample exterior points of the witness and require every derivative net
/// up to `order` to be negligible at each of them.
pub fn verify_compact_support(
    f: &Gsf,
    k: &FunctionallyCompactSet,
    order: usize,
    budget: usize,
    params: &Params,
) -> Result<SupportCheck> {
    if order > params.max_derivative_order {
        return Err(Error::PreconditionError(format!(
            "verification order {order} exceeds the configured cap {}",
            params.max_derivative_order
        )));
    }
    if k.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: k.dim() });
    }
    ensure_inside_domain(k, f.domain(), params)?;
    let tables: Vec<Vec<(Vec<u32>, SmoothExpr)>> =
        f.nets.iter().map(|n| derivative_table(n, f.dim(), order)).collect();
    let mut logged = Vec::new();
    for (point, gap_exponent) in exterior_candidates(f, k, budget, params)? {
        for table in &tables {
            for (alpha, deriv) in table {
                let samples = eval_net(deriv, &point, params)?;
                if !Gn::Sampled(samples).is_negligible(params).is_true() {
                    return Ok(SupportCheck::Counterexample(SupportCounterexample {
                        point,
                        order: alpha.clone(),
                    }));
                }
            }
        }
        logged.push(ExteriorSample { point, gap_exponent });
    }
    Ok(SupportCheck::Verified(CompactlySupportedGsf {
        gsf: f.clone(),
        witness: k.clone(),
        verified_to_order: order,
        exterior_samples: logged,
    }))
}

/// Exterior test points: the far point beyond the sharp bound first (so a
/// globally nonvanishing net fails there), then rings at eps^q off random
/// witness faces, then real-coordinate probes across a window around the
/// witness. Candidates not decidedly exterior, or decidedly outside the
/// domain, are dropped.
fn exterior_candidates(
    f: &Gsf,
    k: &FunctionallyCompactSet,
    budget: usize,
    params: &Params,
) -> Result<Vec<(GPoint, i32)>> {
    let n = f.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, SALT_EXTERIOR));
    let mut accepted: Vec<(GPoint, i32)> = Vec::new();
    let empty = k.set().is_empty_net();
    let push = |accepted: &mut Vec<(GPoint, i32)>, point: GPoint, q: i32| -> Result<()> {
        if !empty && !member_exterior(&point, k, params)?.decision.is_true() {
            return Ok(());
        }
        if member_strongly(&point, f.domain(), params)?.decision.is_false() {
            return Ok(());
        }
        accepted.push((point, q));
        Ok(())
    };
    let far_exponent = k.sharp_bound() + 1;
    let far = GPoint::new(vec![Gn::eps_power(-(far_exponent as f64)); n])?;
    push(&mut accepted, far, -far_exponent)?;
    let boxes = k.set().net().boxes();
    if !boxes.is_empty() {
        let global_probes = budget / 3;
        for _ in 0..budget - global_probes {
            let b = &boxes[rng.gen_range(0..boxes.len())];
            let axis = rng.gen_range(0..n);
            let q = rng.gen_range(0..=params.m_max);
            let outward_hi = rng.gen::<bool>();
            let mut coords = Vec::with_capacity(n);
            for d in 0..n {
                if d == axis {
                    let off = Gn::eps_power(q as f64);
                    coords.push(if outward_hi {
                        b.hi()[d].add(&off, params)?
                    } else {
                        b.lo()[d].sub(&off, params)?
                    });
                } else {
                    let t = Gn::constant(rng.gen::<f64>());
                    let span = b.hi()[d].sub(&b.lo()[d], params)?;
                    coords.push(b.lo()[d].add(&span.mul(&t, params)?, params)?);
                }
            }
            push(&mut accepted, GPoint::new(coords)?, q)?;
        }
        let mut reach: f64 = 1.0;
        for b in boxes {
            for d in 0..n {
                reach = reach.max(b.lo()[d].value_at(&params.grid, 0)?.abs());
                reach = reach.max(b.hi()[d].value_at(&params.grid, 0)?.abs());
            }
        }
        let window = (2.0 * reach + 1.0).min(1e6);
        for _ in 0..global_probes {
            let coords: Vec<f64> =
                (0..n).map(|_| (rng.gen::<f64>() * 2.0 - 1.0) * window).collect();
            push(&mut accepted, GPoint::from_reals(&coords)?, 0)?;
        }
    }
    Ok(accepted)
}

/// Extend a verified function to the full space. The global moderateness
/// certificate comes from derivative suprema over the support witness: the
/// net vanishes outside it up to negligible terms, so the witness sup
/// bounds the global sup.
pub fn extend_global(f: &CompactlySupportedGsf, params: &Params) -> Result<Gsf> {
    let n = f.gsf.dim();
    let order = f.verified_to_order.min(2);
    let mut checked = 0usize;
    for alpha in multi_indices(n, order) {
        for net in &f.gsf.nets {
            let sup = witness_sup_net(&diff_multi(net, &alpha), &f.witness, params)?;
            if !sup.is_moderate() {
                return Err(Error::PreconditionError(
                    "a derivative sup over the support witness is immoderate".into(),
                ));
            }
            checked += 1;
        }
    }
    Ok(Gsf {
        nets: f.gsf.nets.clone(),
        domain: StronglyInternalSet::full_space(n)?,
        certificate: ModeratenessCertificate {
            order,
            points: checked,
            from_witness_sup: true,
        },
    })
}

/// Net of suprema of |expression| over the realized witness boxes.
pub(crate) fn witness_sup_net(
    net: &SmoothExpr,
    k: &FunctionallyCompactSet,
    params: &Params,
) -> Result<SampledNet> {
    assemble_net(params, |i| {
        let boxes = realize_at(k.set().net(), &params.grid, i)?;
        if boxes.is_empty() {
            return Ok(LogSample::zero());
        }
        let eps = params.grid.eps(i);
        let log_eps = params.grid.log_eps(i);
        let mut objective = |xs: &[f64]| -> Result<LogSample> {
            let coords =
                xs.iter().map(|&v| LogSample::from_value(v)).collect::<Result<Vec<_>>>()?;
            let v = net.eval_log(&coords, eps, log_eps)?;
            Ok(LogSample { sign: (v.sign != 0) as i8, log_abs: v.log_abs })
        };
        let mut best = LogSample::zero();
        for (b, rb) in boxes.iter().enumerate() {
            let lo: Vec<f64> = rb.lo.iter().map(|s| s.value()).collect();
            let hi: Vec<f64> = rb.hi.iter().map(|s| s.value()).collect();
            let seed =
                derive_seed(params.seed, SALT_WITNESS_SUP ^ ((i as u64) << 20) ^ (b as u64));
            let opt = maximize_over_box(&mut objective, &lo, &hi, &params.opt, seed)?;
            if best.cmp_signed(opt.value) == Ordering::Less {
                best = opt.value;
            }
        }
        Ok(best)
    })
}

/// Multiply a function defined near the origin-compatible boxes by a
/// plateau cutoff that is 1 wherever every coordinate stays within half the
/// scale, then verify compact support against the clipped witness.
pub fn cutoff_embed_cgf(f: &Gsf, scale: &Gn, params: &Params) -> Result<CompactlySupportedGsf> {
    ensure_divergent(scale, params)?;
    let exact = scale.as_exact().ok_or_else(|| {
        Error::PreconditionError("the cutoff scale needs an exact representative".into())
    })?;
    let n = f.dim();
    let scale_expr = expr_from_exact(exact);
    let mut cutoff = E::constant(1.0);
    for d in 0..n {
        cutoff = E::mul(cutoff, E::plateau(E::div(E::var(d), scale_expr.clone())));
    }
    let nets: Vec<SmoothExpr> =
        f.nets.iter().map(|v| E::mul(cutoff.clone(), v.clone())).collect();
    let witness = cutoff_witness(f.domain(), scale, params)?;
    let embedded = Gsf::new(nets, StronglyInternalSet::full_space(n)?, params)?;
    match verify_compact_support(&embedded, &witness, 2, 8, params)? {
        SupportCheck::Verified(csg) => Ok(csg),
        SupportCheck::Counterexample(ce) => Err(Error::PreconditionError(format!(
            "the cutoff embedding failed its own support check at order {:?}",
            ce.order
        ))),
    }
}

fn ensure_divergent(scale: &Gn, params: &Params) -> Result<()> {
    if !scale.strictly_positive(params)?.decision.is_true() {
        return Err(Error::PreconditionError(
            "the cutoff scale must be strictly positive".into(),
        ));
    }
    let est = scale.valuation(params);
    let diverges = match est.value {
        Valuation::Finite(v) => est.reliable && v < -VALUATION_MARGIN,
        Valuation::PlusInfinity => false,
    };
    if !diverges {
        return Err(Error::PreconditionError(
            "the cutoff scale must diverge on the grid (negative valuation)".into(),
        ));
    }
    Ok(())
}

/// The witness of a cutoff embedding: domain boxes clipped to the
/// coordinate box of the scale (the whole box for a full-space domain).
fn cutoff_witness(
    domain: &StronglyInternalSet,
    scale: &Gn,
    params: &Params,
) -> Result<FunctionallyCompactSet> {
    let n = domain.dim();
    let neg = scale.neg();
    let boxes = match domain {
        StronglyInternalSet::FullSpace { .. } => {
            vec![GBox::new(vec![neg.clone(); n], vec![scale.clone(); n], params)?]
        }
        StronglyInternalSet::Boxes { net, .. } => {
            let mut clipped = Vec::new();
            for b in net.boxes() {
                let mut lo = Vec::with_capacity(n);
                let mut hi = Vec::with_capacity(n);
                for d in 0..n {
                    lo.push(eventual_max(&b.lo()[d], &neg, params)?);
                    hi.push(eventual_min(&b.hi()[d], scale, params)?);
                }
                let mut nonempty = true;
                for d in 0..n {
                    nonempty = nonempty && lo[d].leq(&hi[d], params)? != Tri::False;
                }
                if nonempty {
                    clipped.push(GBox::new(lo, hi, params)?);
                }
            }
            clipped
        }
    };
    if boxes.is_empty() {
        return Err(Error::EmptySetError("the cutoff witness clipped to nothing".into()));
    }
    FunctionallyCompactSet::new(BoxNet::new(boxes)?.into(), params)
}

/// Replace the net by (smoothed indicator of the eps^a-fattened witness)
/// times the original net; the indicator is a closed-form tensor product of
/// per-face plateau steps with transition width about eps^a/2, so the new
/// support stays inside the witness fattened by eps^a.
pub fn mollified_representative(
    f: &CompactlySupportedGsf,
    a: f64,
    params: &Params,
) -> Result<CompactlySupportedGsf> {
    if !a.is_finite() {
        return Err(Error::PreconditionError("the fattening exponent must be finite".into()));
    }
    let j = find_covering_index(&f.witness, f.gsf.domain(), params)?;
    if a < j as f64 {
        return Err(Error::PreconditionError(format!(
            "fattening exponent {a} is below the covering index {j}"
        )));
    }
    let n = f.gsf.dim();
    let boxes = f.witness.set().net().boxes();
    let corner_expr = |c: &Gn| -> Result<SmoothExpr> {
        let e = c.as_exact().ok_or_else(|| {
            Error::PreconditionError(
                "mollified indicators need exact witness corners".into(),
            )
        })?;
        Ok(expr_from_exact(e))
    };
    let mut hole = E::constant(1.0);
    for b in boxes {
        let mut psi = E::constant(1.0);
        for d in 0..n {
            let lo = corner_expr(&b.lo()[d])?;
            let hi = corner_expr(&b.hi()[d])?;
            let eps_a = E::powf(E::eps(), a);
            let over = E::div(E::sub(E::var(d), hi), eps_a.clone());
            let under = E::div(E::sub(lo, E::var(d)), eps_a);
            psi = E::mul(psi, E::mul(face_step(over), face_step(under)));
        }
        hole = E::mul(hole, E::sub(E::constant(1.0), psi));
    }
    let indicator = E::sub(E::constant(1.0), hole);
    let nets: Vec<SmoothExpr> =
        f.gsf.nets.iter().map(|v| E::mul(indicator.clone(), v.clone())).collect();
    let fat = Gn::eps_power(a);
    let mut fattened = Vec::with_capacity(boxes.len());
    for b in boxes {
        let lo = b.lo().iter().map(|c| c.sub(&fat, params)).collect::<Result<Vec<_>>>()?;
        let hi = b.hi().iter().map(|c| c.add(&fat, params)).collect::<Result<Vec<_>>>()?;
        fattened.push(GBox::new(lo, hi, params)?);
    }
    let support = FunctionallyCompactSet::new(BoxNet::new(fattened)?.into(), params)?;
    let gsf = Gsf::new(nets, f.gsf.domain().clone(), params)?;
    match verify_compact_support(&gsf, &support, f.verified_to_order, 8, params)? {
        SupportCheck::Verified(csg) => Ok(csg),
        SupportCheck::Counterexample(ce) => Err(Error::PreconditionError(format!(
            "the mollified net failed its support check at order {:?}",
            ce.order
        ))),
    }
}

/// One-sided smooth step in a face offset measured in units of eps^a.
///
/// The ramp (u + sqrt(u^2 + c))/2 saturates to 0 for u far below 0, so the
/// even plateau kernel never sees its left shoulder: the factor is exactly
/// 1 for offsets <= (1-c)/2 and exactly 0 beyond 1 - c/4.
fn face_step(offset: SmoothExpr) -> SmoothExpr {
    let square = E::mul(offset.clone(), offset.clone());
    let ramp = E::mul(
        E::constant(0.5),
        E::add(offset, E::powf(E::add(square, E::constant(RELU_SMOOTHING)), 0.5)),
    );
    E::plateau(ramp)
}

/// The distributional spike: eps^{-n} on the coordinate box |x_d| <= p*eps,
/// vanishing beyond 2p*eps, smooth in between.
pub fn delta_embedding(n: usize, plateau_radius: f64, params: &Params) -> Result<Gsf> {
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    if !(plateau_radius > 0.0 && plateau_radius.is_finite()) {
        return Err(Error::PreconditionError("the plateau radius must be positive".into()));
    }
    let mut net = E::powi(E::eps(), -(n as i32));
    for d in 0..n {
        let arg = E::div(E::var(d), E::mul(E::constant(2.0 * plateau_radius), E::eps()));
        net = E::mul(net, E::plateau(arg));
    }
    Gsf::new(vec![net], StronglyInternalSet::full_space(n)?, params)
}

fn certificate_points(domain: &StronglyInternalSet, params: &Params) -> Result<Vec<GPoint>> {
    match domain {
        StronglyInternalSet::FullSpace { dim } => Ok(vec![GPoint::from_reals(&vec![0.0; *dim])?]),
        StronglyInternalSet::Boxes { net, .. } => {
            net.boxes().iter().map(|b| GPoint::new(b.center(params)?)).collect()
        }
    }
}

fn ensure_inside_domain(
    k: &FunctionallyCompactSet,
    domain: &StronglyInternalSet,
    params: &Params,
) -> Result<()> {
    if matches!(domain, StronglyInternalSet::FullSpace { .. }) {
        return Ok(());
    }
    for point in sample_members(k, params)? {
        if member_strongly(&point, domain, params)?.decision.is_false() {
            return Err(Error::PreconditionError(
                "a sampled member of the compact set leaves the function domain".into(),
            ));
        }
    }
    Ok(())
}

fn eval_net(net: &SmoothExpr, x: &GPoint, params: &Params) -> Result<SampledNet> {
    assemble_net(params, |i| {
        let coords = x
            .coords()
            .iter()
            .map(|c| c.sample_log(&params.grid, i))
            .collect::<Result<Vec<_>>>()?;
        net.eval_log(&coords, params.grid.eps(i), params.grid.log_eps(i))
    })
}

fn diff_multi(net: &SmoothExpr, alpha: &[u32]) -> SmoothExpr {
    let mut out = net.clone();
    for (d, &k) in alpha.iter().enumerate() {
        for _ in 0..k {
            out = out.diff(d);
        }
    }
    out
}

/// All multi-indices over n variables with total order at most `max_total`,
/// ordered by total then lexicographically; every index appears after the
/// one it extends.
fn multi_indices(n: usize, max_total: usize) -> Vec<Vec<u32>> {
    fn push_split(n: usize, remaining: u32, d: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if d + 1 == n {
            cur[d] = remaining;
            out.push(cur.clone());
            return;
        }
        for v in 0..=remaining {
            cur[d] = v;
            push_split(n, remaining - v, d + 1, cur, out);
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    for total in 0..=max_total as u32 {
        push_split(n, total, 0, &mut cur, &mut out);
    }
    out
}

/// Derivative expressions for every multi-index up to the total order, each
/// computed from the entry it extends by one more differentiation.
pub(crate) fn derivative_table(
    net: &SmoothExpr,
    n: usize,
    max_total: usize,
) -> Vec<(Vec<u32>, SmoothExpr)> {
    let mut out: Vec<(Vec<u32>, SmoothExpr)> = Vec::new();
    let mut index: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for alpha in multi_indices(n, max_total) {
        let expr = match alpha.iter().position(|&v| v > 0) {
            None => net.clone(),
            Some(d) => {
                let mut parent = alpha.clone();
                parent[d] -= 1;
                out[index[&parent]].1.diff(d)
            }
        };
        index.insert(alpha.clone(), out.len());
        out.push((alpha, expr));
    }
    out
}

fn expr_from_exact(net: &ExactNet) -> SmoothExpr {
    let mut out = E::constant(0.0);
    for t in net.terms() {
        let term = if t.expo == 0.0 {
            E::constant(t.coeff)
        } else {
            E::mul(E::constant(t.coeff), E::powf(E::eps(), t.expo))
        };
        out = E::add(out, term);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::{hausdorff_equal, interval, member_internal};

    fn p() -> Params {
        Params::default()
    }

    fn full(dim: usize) -> StronglyInternalSet {
        StronglyInternalSet::full_space(dim).unwrap()
    }

    fn bump_gsf(params: &Params) -> Gsf {
        Gsf::new(vec![E::bump(E::var(0))], full(1), params).unwrap()
    }

    fn real_interval(lo: f64, hi: f64, params: &Params) -> FunctionallyCompactSet {
        interval(&Gn::constant(lo), &Gn::constant(hi), params).unwrap()
    }

    #[test]
    fn polynomial_evaluation_takes_the_exact_path() {
        let p = p();
        let f = Gsf::new(vec![E::powi(E::var(0), 2)], full(1), &p).unwrap();
        let x = GPoint::new(vec![Gn::eps_power(1.0)]).unwrap();
        let y = f.eval(&x, &p).unwrap();
        assert_eq!(y.coord(0), &Gn::eps_power(2.0));
        assert!(!f.certificate().from_witness_sup);
        assert_eq!(f.certificate().order, p.max_derivative_order);
    }

    #[test]
    fn delta_embedding_spikes_at_the_origin() {
        let p = p();
        let delta = delta_embedding(1, 1.0, &p).unwrap();

        let at_zero = delta.eval(&GPoint::from_reals(&[0.0]).unwrap(), &p).unwrap();
        let v = at_zero.coord(0);
        for i in p.grid.indices() {
            let s = v.sample_log(&p.grid, i).unwrap();
            assert_eq!(s.sign, 1);
            assert_eq!(s.log_abs, -p.grid.log_eps(i));
        }
        let est = v.valuation(&p);
        assert!(est.reliable);
        assert!((est.value.finite().unwrap() + 1.0).abs() < 0.1);

        let at_one = delta.eval(&GPoint::from_reals(&[1.0]).unwrap(), &p).unwrap();
        for i in p.grid.indices() {
            assert_eq!(at_one.coord(0).sample_log(&p.grid, i).unwrap().sign, 0);
        }

        // Half the plateau radius inward: exactly eps^{-1} again.
        let x = GPoint::new(vec![Gn::eps_power(1.0).mul(&Gn::constant(0.5), &p).unwrap()])
            .unwrap();
        let inside = delta.eval(&x, &p).unwrap();
        for i in p.grid.indices() {
            let s = inside.coord(0).sample_log(&p.grid, i).unwrap();
            assert_eq!(s.sign, 1);
            assert_eq!(s.log_abs, -p.grid.log_eps(i));
        }
    }

    #[test]
    fn bump_vanishes_outside_its_support() {
        let p = p();
        let f = bump_gsf(&p);
        let y = f.eval(&GPoint::from_reals(&[2.0]).unwrap(), &p).unwrap();
        for i in p.grid.indices() {
            assert_eq!(y.coord(0).sample_log(&p.grid, i).unwrap().sign, 0);
        }
    }

    #[test]
    fn evaluation_is_gated_by_the_domain() {
        let p = p();
        let domain = StronglyInternalSet::open_interval(-1.0, 1.0, &p).unwrap();
        let f = Gsf::new(vec![E::var(0)], domain, &p).unwrap();
        assert!(matches!(
            f.eval(&GPoint::from_reals(&[2.0]).unwrap(), &p),
            Err(Error::PreconditionError(_))
        ));
        let inside = GPoint::from_reals(&[0.25]).unwrap();
        let report = f.eval_with_check(&inside, &p).unwrap();
        assert!(report.domain_check.is_true());
        assert_eq!(report.value.coord(0), &Gn::constant(0.25));
    }

    #[test]
    fn construction_rejects_immoderate_nets() {
        let p = p();
        assert!(matches!(
            Gsf::new(vec![E::powi(E::eps(), -15)], full(1), &p),
            Err(Error::PreconditionError(_))
        ));
    }

    #[test]
    fn derivatives_follow_the_chain_rule() {
        let p = p();
        // Polynomial: d(x^2)/dx at 3 is exactly 6.
        let square = Gsf::new(vec![E::powi(E::var(0), 2)], full(1), &p).unwrap();
        let slope = square.derivative(&[1], &p).unwrap();
        let y = slope.eval(&GPoint::from_reals(&[3.0]).unwrap(), &p).unwrap();
        assert_eq!(y.coord(0), &Gn::constant(6.0));

        // Constant: derivative is the zero net.
        let flat = Gsf::new(vec![E::constant(4.0)], full(1), &p).unwrap();
        assert!(flat.derivative(&[1], &p).unwrap().nets()[0].is_zero());

        // Spike derivative gains one inverse power of eps in its sup; the
        // sup is taken over the spike's own support box [-eps, eps].
        let spike = Gsf::new(
            vec![E::mul(E::powi(E::eps(), -1), E::bump(E::div(E::var(0), E::eps())))],
            full(1),
            &p,
        )
        .unwrap();
        let d = spike.derivative(&[1], &p).unwrap();
        let eps = Gn::eps_power(1.0);
        let k = interval(&eps.neg(), &eps, &p).unwrap();
        let ex = extreme_values(&d, &k, &p).unwrap();
        let est = ex.max.valuation(&p);
        assert!(est.reliable);
        assert!((est.value.finite().unwrap() + 2.0).abs() < 0.2);

        // The order cap is enforced.
        assert!(matches!(
            spike.derivative(&[p.max_derivative_order as u32 + 1], &p),
            Err(Error::PreconditionError(_))
        ));
    }

    #[test]
    fn extremes_locate_interior_and_boundary_optima() {
        let p = p();
        let k = real_interval(0.0, 1.0, &p);

        let identity = Gsf::new(vec![E::var(0)], full(1), &p).unwrap();
        let ex = extreme_values(&identity, &k, &p).unwrap();
        for i in p.grid.indices() {
            assert_eq!(ex.min.sample_log(&p.grid, i).unwrap().sign, 0);
            assert_eq!(ex.max.value_at(&p.grid, i).unwrap(), 1.0);
            assert_eq!(ex.argmin.coord(0).value_at(&p.grid, i).unwrap(), 0.0);
            assert_eq!(ex.argmax.coord(0).value_at(&p.grid, i).unwrap(), 1.0);
        }

        let hump =
            Gsf::new(vec![E::mul(E::var(0), E::sub(E::constant(1.0), E::var(0)))], full(1), &p)
                .unwrap();
        let ex = extreme_values(&hump, &k, &p).unwrap();
        for i in p.grid.indices() {
            assert!((ex.max.value_at(&p.grid, i).unwrap() - 0.25).abs() < 1e-6);
            assert!((ex.argmax.coord(0).value_at(&p.grid, i).unwrap() - 0.5).abs() < 1e-3);
        }

        // Sandwich guarantee at sampled members.
        for x in crate::set::sample_members(&k, &p).unwrap() {
            let v = hump.eval(&x, &p).unwrap();
            for i in p.grid.indices() {
                let fv = v.coord(0).value_at(&p.grid, i).unwrap();
                assert!(fv <= ex.max.value_at(&p.grid, i).unwrap() + 1e-6);
                assert!(fv >= ex.min.value_at(&p.grid, i).unwrap() - 1e-6);
            }
        }

        let empty_err = extreme_values(
            &identity,
            &FunctionallyCompactSet::new(BoxNet::empty(1).into(), &p).unwrap(),
            &p,
        );
        assert!(matches!(empty_err, Err(Error::EmptySetError(_))));
    }

    #[test]
    fn extremes_catch_the_delta_spike() {
        let p = p();
        let delta = delta_embedding(1, 1.0, &p).unwrap();
        let k = real_interval(-1.0, 1.0, &p);
        let ex = extreme_values(&delta, &k, &p).unwrap();
        let at_argmax = delta.eval(&ex.argmax, &p).unwrap();
        for i in p.grid.indices() {
            let s = ex.max.sample_log(&p.grid, i).unwrap();
            assert_eq!(s.sign, 1);
            assert_eq!(s.log_abs, -p.grid.log_eps(i));
            // The kernel tops out around 0 within its support of width
            // 2 eps, and the argmax attains the maximum exactly.
            let arg = ex.argmax.coord(0).value_at(&p.grid, i).unwrap();
            assert!(arg.abs() <= 2.0 * p.grid.eps(i));
            let v = at_argmax.coord(0).sample_log(&p.grid, i).unwrap();
            assert_eq!(v.sign, s.sign);
            assert_eq!(v.log_abs, s.log_abs);
        }
    }

    #[test]
    fn image_enclosures_match_reference_images() {
        let p = p();
        let k = real_interval(-1.0, 1.0, &p);

        let square = Gsf::new(vec![E::powi(E::var(0), 2)], full(1), &p).unwrap();
        let image = image_enclosure(&square, &k, &p).unwrap();
        assert!(image.exact);
        let expected = real_interval(0.0, 1.0, &p);
        assert!(hausdorff_equal(image.set.set(), expected.set(), &p).unwrap().is_true());

        let constant = Gsf::new(vec![E::constant(2.5)], full(1), &p).unwrap();
        let image = image_enclosure(&constant, &k, &p).unwrap();
        let expected = real_interval(2.5, 2.5, &p);
        assert!(hausdorff_equal(image.set.set(), expected.set(), &p).unwrap().is_true());

        let identity = Gsf::new(vec![E::var(0)], full(1), &p).unwrap();
        let seg = real_interval(0.25, 0.75, &p);
        let image = image_enclosure(&identity, &seg, &p).unwrap();
        assert!(hausdorff_equal(image.set.set(), seg.set(), &p).unwrap().is_true());

        // Functoriality: sampled values land inside the enclosure.
        let image = image_enclosure(&square, &k, &p).unwrap();
        for x in crate::set::sample_members(&k, &p).unwrap() {
            let v = square.eval(&x, &p).unwrap();
            let m = member_internal(&v, image.set.set(), &p).unwrap();
            assert!(!m.is_false());
        }
    }

    #[test]
    fn support_point_tests_match_the_reference_cases() {
        let p = p();
        let f = bump_gsf(&p);
        assert!(support_positive_at(&f, &GPoint::from_reals(&[0.0]).unwrap(), &p)
            .unwrap()
            .is_true());

        // A point hopping between 0 and eps^{-1} lands outside the bump's
        // support on alternating indices, so |f| has zero samples cofinally.
        let s = crate::idempotent::IdempotentSet::alternating_blocks(1, 0).unwrap();
        let hopper = crate::idempotent::interleave(
            &[Gn::eps_power(-1.0), Gn::zero()],
            &[s.clone(), s.complement()],
            &p,
        )
        .unwrap();
        let x = GPoint::new(vec![hopper]).unwrap();
        assert!(support_positive_at(&f, &x, &p).unwrap().is_false());

        let zero = Gsf::new(vec![E::constant(0.0)], full(1), &p).unwrap();
        assert!(support_positive_at(&zero, &GPoint::from_reals(&[0.3]).unwrap(), &p)
            .unwrap()
            .is_false());
    }

    #[test]
    fn verification_accepts_true_support_and_rejects_constants() {
        let p = p();
        let k = real_interval(-1.0, 1.0, &p);

        let f = bump_gsf(&p);
        let checked = verify_compact_support(&f, &k, 3, 12, &p).unwrap();
        let SupportCheck::Verified(csg) = checked else {
            panic!("the bump is compactly supported in [-1, 1]");
        };
        assert_eq!(csg.verified_to_order(), 3);
        assert!(!csg.exterior_samples().is_empty());
        // Converse of the support dichotomy: |f| is not strictly positive
        // at any logged exterior point.
        for s in csg.exterior_samples() {
            assert!(support_positive_at(&f, &s.point, &p).unwrap().is_false());
        }

        let one = Gsf::new(vec![E::constant(1.0)], full(1), &p).unwrap();
        let checked = verify_compact_support(&one, &k, 1, 12, &p).unwrap();
        let SupportCheck::Counterexample(ce) = checked else {
            panic!("a global constant has no compact support");
        };
        // The far point is checked first and already fails at order 0.
        assert_eq!(ce.order, vec![0]);
        let est = ce.point.coord(0).valuation(&p);
        assert!((est.value.finite().unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn verification_is_monotone_in_the_witness() {
        let p = p();
        let chi = Gsf::new(vec![E::plateau(E::var(0))], full(1), &p).unwrap();
        let wide = real_interval(-2.0, 2.0, &p);
        assert!(matches!(
            verify_compact_support(&chi, &wide, 2, 12, &p).unwrap(),
            SupportCheck::Verified(_)
        ));

        let f = bump_gsf(&p);
        let tight = real_interval(-1.0, 1.0, &p);
        assert!(matches!(
            verify_compact_support(&f, &tight, 2, 12, &p).unwrap(),
            SupportCheck::Verified(_)
        ));
        assert!(matches!(
            verify_compact_support(&f, &wide, 2, 12, &p).unwrap(),
            SupportCheck::Verified(_)
        ));
    }

    #[test]
    fn misplaced_witnesses_are_refuted_through_the_support_dichotomy() {
        let p = p();
        let f = bump_gsf(&p);
        let k = real_interval(2.0, 3.0, &p);
        let origin = GPoint::from_reals(&[0.0]).unwrap();
        assert!(support_positive_at(&f, &origin, &p).unwrap().is_true());
        assert!(member_exterior(&origin, &k, &p).unwrap().decision.is_true());
        let checked = verify_compact_support(&f, &k, 0, 24, &p).unwrap();
        assert!(matches!(checked, SupportCheck::Counterexample(_)));
    }

    #[test]
    fn derivative_closure_carries_the_witness() {
        let p = p();
        let f = bump_gsf(&p);
        let k = real_interval(-1.0, 1.0, &p);
        let SupportCheck::Verified(csg) = verify_compact_support(&f, &k, 3, 12, &p).unwrap()
        else {
            panic!("the bump is compactly supported in [-1, 1]");
        };
        let d = csg.derivative(&[2], &p).unwrap();
        assert_eq!(d.verified_to_order(), 1);
        assert_eq!(d.exterior_samples().len(), csg.exterior_samples().len());
        // Re-verifying the derivative at the reduced order succeeds too.
        assert!(matches!(
            verify_compact_support(d.gsf(), &k, 1, 12, &p).unwrap(),
            SupportCheck::Verified(_)
        ));
    }

    #[test]
    fn extension_evaluates_beyond_the_witness() {
        let p = p();
        let f = bump_gsf(&p);
        let k = real_interval(-1.0, 1.0, &p);
        let SupportCheck::Verified(csg) = verify_compact_support(&f, &k, 2, 12, &p).unwrap()
        else {
            panic!("the bump is compactly supported in [-1, 1]");
        };
        let ext = extend_global(&csg, &p).unwrap();
        assert!(ext.certificate().from_witness_sup);

        let far = GPoint::new(vec![Gn::eps_power(-5.0)]).unwrap();
        let y = ext.eval(&far, &p).unwrap();
        for i in p.grid.indices() {
            assert_eq!(y.coord(0).sample_log(&p.grid, i).unwrap().sign, 0);
        }

        // Restriction back to the original domain agrees everywhere.
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(p.seed, 0x1e57));
        for _ in 0..100 {
            let x = GPoint::from_reals(&[rng.gen::<f64>() * 4.0 - 2.0]).unwrap();
            let a = f.eval(&x, &p).unwrap();
            let b = ext.eval(&x, &p).unwrap();
            let d = a.coord(0).sub(b.coord(0), &p).unwrap();
            assert!(d.is_negligible(&p).is_true());
        }
    }

    #[test]
    fn cutoff_embedding_reproduces_compactly_supported_points() {
        let p = p();
        let one = Gsf::new(vec![E::constant(1.0)], full(1), &p).unwrap();
        let embedded = cutoff_embed_cgf(&one, &Gn::eps_power(-1.0), &p).unwrap();
        assert_eq!(embedded.verified_to_order(), 2);
        assert_eq!(embedded.witness().sharp_bound(), 1);

        // Any fixed real point is eventually within half the scale.
        let y = embedded.eval(&GPoint::from_reals(&[5.0]).unwrap(), &p).unwrap();
        for i in p.grid.indices() {
            assert_eq!(y.coord(0).value_at(&p.grid, i).unwrap(), 1.0);
        }

        // A point past the scale falls outside the cutoff support.
        let beyond = GPoint::new(vec![Gn::eps_power(-2.0)]).unwrap();
        let y = embedded.eval(&beyond, &p).unwrap();
        for i in p.grid.indices() {
            assert_eq!(y.coord(0).sample_log(&p.grid, i).unwrap().sign, 0);
        }

        // A bounded scale does not diverge.
        assert!(matches!(
            cutoff_embed_cgf(&one, &Gn::constant(3.0), &p),
            Err(Error::PreconditionError(_))
        ));
    }

    #[test]
    fn mollified_nets_agree_and_keep_a_fattened_support() {
        let p = p();
        let f = bump_gsf(&p);
        let k = real_interval(-1.0, 1.0, &p);
        let SupportCheck::Verified(csg) = verify_compact_support(&f, &k, 2, 12, &p).unwrap()
        else {
            panic!("the bump is compactly supported in [-1, 1]");
        };

        let smoothed = mollified_representative(&csg, 1.0, &p).unwrap();
        let eps = Gn::eps_power(1.0);
        let expected = interval(
            &Gn::constant(-1.0).sub(&eps, &p).unwrap(),
            &Gn::constant(1.0).add(&eps, &p).unwrap(),
            &p,
        )
        .unwrap();
        assert!(hausdorff_equal(smoothed.witness().set(), expected.set(), &p)
            .unwrap()
            .is_true());

        // The two representatives agree at random points and at a diverging
        // one: the indicator is 1 on the original support and both vanish
        // beyond it.
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(p.seed, 0x50f7));
        let mut probes: Vec<GPoint> = (0..50)
            .map(|_| GPoint::from_reals(&[rng.gen::<f64>() * 6.0 - 3.0]).unwrap())
            .collect();
        probes.push(GPoint::new(vec![Gn::eps_power(-1.0)]).unwrap());
        for x in &probes {
            let a = csg.eval(x, &p).unwrap();
            let b = smoothed.eval(x, &p).unwrap();
            let d = a.coord(0).sub(b.coord(0), &p).unwrap();
            assert!(d.is_negligible(&p).is_true());
        }

        // Exterior of the fattened support by a visible margin: exact zero.
        let outside = GPoint::new(vec![Gn::constant(1.0)
            .add(&eps, &p)
            .unwrap()
            .add(&Gn::eps_power(0.5), &p)
            .unwrap()])
        .unwrap();
        let y = smoothed.eval(&outside, &p).unwrap();
        for i in p.grid.indices() {
            assert_eq!(y.coord(0).sample_log(&p.grid, i).unwrap().sign, 0);
        }

        assert!(matches!(
            mollified_representative(&csg, -0.5, &p),
            Err(Error::PreconditionError(_))
        ));
    }

    #[test]
    fn multi_index_enumeration_is_ordered_by_total_then_lex() {
        assert_eq!(
            multi_indices(2, 2),
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![1, 0],
                vec![0, 2],
                vec![1, 1],
                vec![2, 0],
            ]
        );
        assert_eq!(multi_indices(1, 3).len(), 4);
    }
}
