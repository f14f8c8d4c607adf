//! Nets of compact sets and the membership calculus on them.
//!
//! A set net is a finite union of closed axis-aligned boxes per grid point;
//! corner coordinates are generalized numbers. Internal sets carry eventual
//! membership of representatives, strongly internal sets require a distance
//! gap below the complement, and functionally compact sets add a sharp
//! bound witness. Per-point geometry (distances, contractions, Hausdorff
//! suprema) runs in the signed log encoding, so features at scales like
//! e^{-1/eps} stay visible.
//!
//! Two geometric quantities are approximated for unions:
//! - distance to the complement is the largest single-box interior depth,
//!   which is the true distance when the boxes are pairwise disjoint and a
//!   lower bound otherwise; the negligibility refutation below only fires
//!   when the realized boxes are disjoint, so overlap can cost decisions
//!   but never fabricates one.
//! - the directed Hausdorff supremum over a box is evaluated on an
//!   arrangement grid of face coordinates and gap midpoints, exact in one
//!   dimension and for single-box targets, and a lower bound otherwise.

use std::cmp::Ordering;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as DeError;
use serde::ser::Error as SerError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::EpsilonGrid;
use crate::number::GeneralizedNumber as Gn;
use crate::optimize::derive_seed;
use crate::params::{Params, LOG_MAGNITUDE_BUDGET};
use crate::parse::parse_exact_net;
use crate::point::GPoint;
use crate::sampled::{LogSample, SampledNet, Valuation};
use crate::tri::{Tri, Witnessed};

/// Corners beyond this dimension are too many to enumerate; corner-based
/// routines fall back to per-axis bounds instead.
const MAX_CORNER_DIM: usize = 12;

/// One closed axis-aligned box with generalized-number corners.
#[derive(Debug, Clone, PartialEq)]
pub struct GBox {
    lo: Vec<Gn>,
    hi: Vec<Gn>,
}

impl GBox {
    /// A box from corner nets; rejects eventually empty boxes and corners
    /// that are not moderate.
    pub fn new(lo: Vec<Gn>, hi: Vec<Gn>, params: &Params) -> Result<GBox> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len().max(1), got: hi.len() });
        }
        for c in lo.iter().chain(hi.iter()) {
            if let Some(s) = c.as_sampled() {
                if !s.is_moderate() {
                    return Err(Error::PreconditionError(
                        "box corner net is not moderate".into(),
                    ));
                }
            }
        }
        for (l, h) in lo.iter().zip(&hi) {
            if l.leq(h, params)?.is_false() {
                return Err(Error::PreconditionError(
                    "box is eventually empty: lo > hi".into(),
                ));
            }
        }
        Ok(GBox { lo, hi })
    }

    /// A constant box from real corners.
    pub fn from_reals(lo: &[f64], hi: &[f64]) -> Result<GBox> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len().max(1), got: hi.len() });
        }
        for (d, (&l, &h)) in lo.iter().zip(hi).enumerate() {
            if !l.is_finite() || !h.is_finite() || l > h {
                return Err(Error::PreconditionError(format!(
                    "invalid box bounds [{l}, {h}] in dimension {d}"
                )));
            }
        }
        Ok(GBox {
            lo: lo.iter().map(|&v| Gn::constant(v)).collect(),
            hi: hi.iter().map(|&v| Gn::constant(v)).collect(),
        })
    }

    fn raw(lo: Vec<Gn>, hi: Vec<Gn>) -> GBox {
        GBox { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Gn] {
        &self.lo
    }

    pub fn hi(&self) -> &[Gn] {
        &self.hi
    }

    /// All corner points, lo/hi per coordinate.
    pub(crate) fn corners(&self) -> Vec<Vec<Gn>> {
        let n = self.dim();
        if n > MAX_CORNER_DIM {
            return vec![self.lo.clone(), self.hi.clone()];
        }
        (0..1u32 << n)
            .map(|mask| {
                (0..n)
                    .map(|d| {
                        if mask >> d & 1 == 1 { self.hi[d].clone() } else { self.lo[d].clone() }
                    })
                    .collect()
            })
            .collect()
    }

    pub(crate) fn center(&self, params: &Params) -> Result<Vec<Gn>> {
        let half = Gn::constant(0.5);
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| l.add(h, params)?.mul(&half, params))
            .collect()
    }
}

/// A finite union of boxes per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxNet {
    dim: usize,
    boxes: Vec<GBox>,
}

impl BoxNet {
    pub fn new(boxes: Vec<GBox>) -> Result<BoxNet> {
        let Some(first) = boxes.first() else {
            return Err(Error::EmptySetError(
                "a box net needs at least one box; use BoxNet::empty(dim)".into(),
            ));
        };
        let dim = first.dim();
        for b in &boxes {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: b.dim() });
            }
        }
        Ok(BoxNet { dim, boxes })
    }

    /// The net that is empty at every grid point.
    pub fn empty(dim: usize) -> BoxNet {
        BoxNet { dim: dim.max(1), boxes: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[GBox] {
        &self.boxes
    }
}

impl Serialize for BoxNet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut out: Vec<Vec<(String, String)>> = Vec::with_capacity(self.boxes.len());
        for b in &self.boxes {
            let mut dims = Vec::with_capacity(b.dim());
            for (l, h) in b.lo.iter().zip(&b.hi) {
                match (l.as_exact(), h.as_exact()) {
                    (Some(le), Some(he)) => dims.push((le.to_string(), he.to_string())),
                    _ => {
                        return Err(S::Error::custom(
                            "only exact corner nets have a textual form",
                        ))
                    }
                }
            }
            out.push(dims);
        }
        out.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BoxNet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<BoxNet, D::Error> {
        let raw: Vec<Vec<(String, String)>> = Vec::deserialize(deserializer)?;
        if raw.is_empty() {
            return Err(D::Error::custom("a box net needs at least one box"));
        }
        let mut boxes = Vec::with_capacity(raw.len());
        for dims in &raw {
            if dims.is_empty() {
                return Err(D::Error::custom("a box needs at least one dimension"));
            }
            let mut lo = Vec::with_capacity(dims.len());
            let mut hi = Vec::with_capacity(dims.len());
            for (ls, hs) in dims {
                let le = parse_exact_net(ls).map_err(D::Error::custom)?;
                let he = parse_exact_net(hs).map_err(D::Error::custom)?;
                if !le.leq(&he) {
                    return Err(D::Error::custom(format!(
                        "box is eventually empty: {ls} > {hs}"
                    )));
                }
                lo.push(Gn::Exact(le));
                hi.push(Gn::Exact(he));
            }
            boxes.push(GBox::raw(lo, hi));
        }
        BoxNet::new(boxes).map_err(D::Error::custom)
    }
}

/// The internal set [A_eps] of a box net: eventual membership semantics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InternalSet {
    net: BoxNet,
}

impl InternalSet {
    pub fn net(&self) -> &BoxNet {
        &self.net
    }

    pub fn dim(&self) -> usize {
        self.net.dim()
    }

    pub fn is_empty_net(&self) -> bool {
        self.net.boxes().is_empty()
    }
}

impl From<BoxNet> for InternalSet {
    fn from(net: BoxNet) -> InternalSet {
        InternalSet { net }
    }
}

/// An internal set with a sharp bound witness: sup |x| <= eps^-N eventually.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionallyCompactSet {
    set: InternalSet,
    sharp_bound: i32,
}

impl FunctionallyCompactSet {
    /// Wrap an internal set, computing the least sharp bound; rejected when
    /// no witness at most m_max exists.
    pub fn new(set: InternalSet, params: &Params) -> Result<FunctionallyCompactSet> {
        match is_functionally_compact(&set, params)? {
            Some(n) => Ok(FunctionallyCompactSet { set, sharp_bound: n }),
            None => Err(Error::PreconditionError(format!(
                "no sharp bound witness at most {} found",
                params.m_max
            ))),
        }
    }

    fn with_witness(set: InternalSet, sharp_bound: i32) -> FunctionallyCompactSet {
        FunctionallyCompactSet { set, sharp_bound }
    }

    pub fn set(&self) -> &InternalSet {
        &self.set
    }

    pub fn sharp_bound(&self) -> i32 {
        self.sharp_bound
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }
}

/// The strongly internal set <A_eps>: members keep an eps^q distance gap
/// to the complement. The whole space is its own variant since it has an
/// empty complement and no box description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StronglyInternalSet {
    Boxes { net: BoxNet, base_index: i32 },
    FullSpace { dim: usize },
}

impl StronglyInternalSet {
    /// Wrap a box net; the moderateness witness `base_index` is the least
    /// probed q for which some box center keeps the eps^q gap.
    pub fn new(net: BoxNet, params: &Params) -> Result<StronglyInternalSet> {
        if net.boxes().is_empty() {
            return Err(Error::EmptySetError(
                "a strongly internal set needs at least one box".into(),
            ));
        }
        let mut base: Option<i32> = None;
        for b in net.boxes() {
            let center = b.center(params)?;
            let d = complement_distance_net(&center, &net, params)?;
            let w = Gn::Sampled(d).strictly_positive(params)?;
            if let (Tri::True, Some(q)) = (w.decision, w.witness) {
                base = Some(base.map_or(q, |b: i32| b.min(q)));
            }
        }
        match base {
            Some(base_index) => Ok(StronglyInternalSet::Boxes { net, base_index }),
            None => Err(Error::PreconditionError(
                "no moderateness witness: no box center keeps a distance gap to the complement"
                    .into(),
            )),
        }
    }

    /// The open interval (lo, hi) as a one-dimensional strongly internal set.
    pub fn open_interval(lo: f64, hi: f64, params: &Params) -> Result<StronglyInternalSet> {
        StronglyInternalSet::new(BoxNet::new(vec![GBox::from_reals(&[lo], &[hi])?])?, params)
    }

    /// All of the n-dimensional space; complement empty, every point keeps
    /// an infinite gap.
    pub fn full_space(dim: usize) -> Result<StronglyInternalSet> {
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        Ok(StronglyInternalSet::FullSpace { dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            StronglyInternalSet::Boxes { net, .. } => net.dim(),
            StronglyInternalSet::FullSpace { dim } => *dim,
        }
    }

    pub fn base_index(&self) -> i32 {
        match self {
            StronglyInternalSet::Boxes { base_index, .. } => *base_index,
            StronglyInternalSet::FullSpace { .. } => 0,
        }
    }
}

// ---------------------------------------------------------------------------
// Realized per-grid-point geometry, in the signed log encoding.

/// One box realized at a single grid point.
pub(crate) struct RBox {
    pub(crate) lo: Vec<LogSample>,
    pub(crate) hi: Vec<LogSample>,
}

fn ls_sub(a: LogSample, b: LogSample) -> Result<LogSample> {
    a.add(b.neg())
}

fn ls_max(a: LogSample, b: LogSample) -> LogSample {
    if a.cmp_signed(b) == Ordering::Less {
        b
    } else {
        a
    }
}

fn ls_min(a: LogSample, b: LogSample) -> LogSample {
    if a.cmp_signed(b) == Ordering::Greater {
        b
    } else {
        a
    }
}

/// A stand-in for an infinite distance, at the top of the log budget.
fn ls_far() -> LogSample {
    LogSample { sign: 1, log_abs: LOG_MAGNITUDE_BUDGET }
}

/// Realize the boxes of a net at grid point `i`, dropping boxes that are
/// empty there.
pub(crate) fn realize_at(net: &BoxNet, grid: &EpsilonGrid, i: usize) -> Result<Vec<RBox>> {
    let mut out = Vec::with_capacity(net.boxes().len());
    'boxes: for b in net.boxes() {
        let mut lo = Vec::with_capacity(b.dim());
        let mut hi = Vec::with_capacity(b.dim());
        for (l, h) in b.lo().iter().zip(b.hi()) {
            let ls = l.sample_log(grid, i)?;
            let hs = h.sample_log(grid, i)?;
            if ls.cmp_signed(hs) == Ordering::Greater {
                continue 'boxes;
            }
            lo.push(ls);
            hi.push(hs);
        }
        out.push(RBox { lo, hi });
    }
    Ok(out)
}

/// Euclidean distance from a point to one box (zero inside).
fn dist_to_box(x: &[LogSample], b: &RBox) -> Result<LogSample> {
    let mut sumsq = LogSample::zero();
    for d in 0..x.len() {
        let below = ls_sub(b.lo[d], x[d])?;
        let above = ls_sub(x[d], b.hi[d])?;
        let excess = ls_max(ls_max(below, above), LogSample::zero());
        sumsq = sumsq.add(excess.mul(excess)?)?;
    }
    sumsq.powf(0.5)
}

/// Euclidean distance from a point to a box union; far when the union is
/// empty at this grid point.
fn dist_to_union(x: &[LogSample], boxes: &[RBox]) -> Result<LogSample> {
    let mut best: Option<LogSample> = None;
    for b in boxes {
        let d = dist_to_box(x, b)?;
        best = Some(match best {
            None => d,
            Some(cur) => ls_min(cur, d),
        });
    }
    Ok(best.unwrap_or_else(ls_far))
}

/// Interior depth of a point in one box: the smallest margin to a face,
/// clamped to zero outside.
fn interior_depth(x: &[LogSample], b: &RBox) -> Result<LogSample> {
    let mut depth: Option<LogSample> = None;
    for d in 0..x.len() {
        let lo_margin = ls_sub(x[d], b.lo[d])?;
        let hi_margin = ls_sub(b.hi[d], x[d])?;
        let m = ls_min(lo_margin, hi_margin);
        depth = Some(match depth {
            None => m,
            Some(cur) => ls_min(cur, m),
        });
    }
    Ok(ls_max(depth.unwrap_or_else(LogSample::zero), LogSample::zero()))
}

/// Distance from a point to the complement of a box union, as the largest
/// single-box interior depth. Exact for pairwise disjoint boxes.
fn complement_distance(x: &[LogSample], boxes: &[RBox]) -> Result<LogSample> {
    let mut best = LogSample::zero();
    for b in boxes {
        best = ls_max(best, interior_depth(x, b)?);
    }
    Ok(best)
}

fn boxes_pairwise_disjoint(boxes: &[RBox]) -> bool {
    for (i, a) in boxes.iter().enumerate() {
        for b in &boxes[i + 1..] {
            let separated = (0..a.lo.len()).any(|d| {
                a.hi[d].cmp_signed(b.lo[d]) == Ordering::Less
                    || b.hi[d].cmp_signed(a.lo[d]) == Ordering::Less
            });
            if !separated {
                return false;
            }
        }
    }
    true
}

/// Assemble a sampled net from a per-grid-point computation.
pub(crate) fn assemble_net(
    params: &Params,
    mut f: impl FnMut(usize) -> Result<LogSample>,
) -> Result<SampledNet> {
    let mut samples = Vec::with_capacity(params.grid.len());
    for i in params.grid.indices() {
        samples.push(f(i)?);
    }
    Ok(SampledNet::from_samples_in(params, samples))
}

fn point_samples(x: &GPoint, grid: &EpsilonGrid, i: usize) -> Result<Vec<LogSample>> {
    x.coords().iter().map(|c| c.sample_log(grid, i)).collect()
}

/// The net of distances from a point to a box-union net.
fn union_distance_net(x: &GPoint, net: &BoxNet, params: &Params) -> Result<SampledNet> {
    assemble_net(params, |i| {
        let xs = point_samples(x, &params.grid, i)?;
        dist_to_union(&xs, &realize_at(net, &params.grid, i)?)
    })
}

/// The net of distances from a point (given as coordinate nets) to the
/// complement of a box-union net.
fn complement_distance_net(coords: &[Gn], net: &BoxNet, params: &Params) -> Result<SampledNet> {
    assemble_net(params, |i| {
        let xs: Vec<LogSample> =
            coords.iter().map(|c| c.sample_log(&params.grid, i)).collect::<Result<_>>()?;
        complement_distance(&xs, &realize_at(net, &params.grid, i)?)
    })
}

// ---------------------------------------------------------------------------
// Eventual comparisons on corner nets.

/// The eventually larger of two numbers; pointwise on samples when the
/// order does not decide.
pub(crate) fn eventual_max(a: &Gn, b: &Gn, params: &Params) -> Result<Gn> {
    match a.leq(b, params)? {
        Tri::True => Ok(b.clone()),
        Tri::False => Ok(a.clone()),
        Tri::Undecidable => {
            let sa = a.to_sampled(params)?;
            let sb = b.to_sampled(params)?;
            Ok(Gn::Sampled(sa.map2(&sb, params, |p, q| Ok(ls_max(p, q)))?))
        }
    }
}

pub(crate) fn eventual_min(a: &Gn, b: &Gn, params: &Params) -> Result<Gn> {
    match a.leq(b, params)? {
        Tri::True => Ok(a.clone()),
        Tri::False => Ok(b.clone()),
        Tri::Undecidable => {
            let sa = a.to_sampled(params)?;
            let sb = b.to_sampled(params)?;
            Ok(Gn::Sampled(sa.map2(&sb, params, |p, q| Ok(ls_min(p, q)))?))
        }
    }
}

// ---------------------------------------------------------------------------
// Membership.

/// Eventual membership x in [K_eps]: some box contains the point
/// componentwise, or the distance to the union is negligible. Refuted by a
/// witnessed positive distance, or by a distance clearing eps^v_cut at some
/// tail grid point, which is incompatible with eventual membership at the
/// working resolution.
pub fn member_internal(x: &GPoint, k: &InternalSet, params: &Params) -> Result<Tri> {
    if x.dim() != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: x.dim() });
    }
    if k.is_empty_net() {
        return Ok(Tri::False);
    }
    for b in k.net().boxes() {
        let mut inside = Tri::True;
        for (d, c) in x.coords().iter().enumerate() {
            inside = inside.and(b.lo()[d].leq(c, params)?);
            inside = inside.and(c.leq(&b.hi()[d], params)?);
            if inside.is_false() {
                break;
            }
        }
        if inside.is_true() {
            return Ok(Tri::True);
        }
    }
    let dist_net = union_distance_net(x, k.net(), params)?;
    let dist = Gn::Sampled(dist_net);
    if dist.is_negligible(params).is_true() {
        return Ok(Tri::True);
    }
    let samples = dist.as_sampled().expect("built sampled");
    for i in params.grid.tail() {
        let s = samples.sample(i);
        if s.sign > 0 && s.log_abs > params.v_cut * params.grid.log_eps(i) {
            return Ok(Tri::False);
        }
    }
    if dist.strictly_positive(params)?.decision.is_true() {
        return Ok(Tri::False);
    }
    Ok(Tri::Undecidable)
}

/// Exterior membership: the distance from x to K_eps clears eps^q on the
/// tail for some probed q (returned as the witness). A negligible distance
/// refutes it.
pub fn member_exterior(
    x: &GPoint,
    k: &FunctionallyCompactSet,
    params: &Params,
) -> Result<Witnessed> {
    if x.dim() != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: x.dim() });
    }
    if k.set().is_empty_net() {
        return Err(Error::EmptySetError(
            "exterior membership needs an eventually nonempty set".into(),
        ));
    }
    let dist = Gn::Sampled(union_distance_net(x, k.set().net(), params)?);
    let w = dist.strictly_positive(params)?;
    if w.decision.is_true() {
        return Ok(w);
    }
    if dist.is_negligible(params).is_true() {
        return Ok(Witnessed::decided_false());
    }
    Ok(Witnessed::undecidable())
}

/// Strong membership x in <A_eps>: the distance to the complement clears
/// eps^q on the tail (witnessed). Refuted when the point sits visibly
/// outside the closure at some tail grid point, or when the gap net is
/// negligible while the realized boxes are disjoint.
pub fn member_strongly(
    x: &GPoint,
    u: &StronglyInternalSet,
    params: &Params,
) -> Result<Witnessed> {
    if x.dim() != u.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), got: x.dim() });
    }
    let net = match u {
        StronglyInternalSet::FullSpace { .. } => return Ok(Witnessed::decided_true(0)),
        StronglyInternalSet::Boxes { net, .. } => net,
    };
    let gap = Gn::Sampled(complement_distance_net(x.coords(), net, params)?);
    let w = gap.strictly_positive(params)?;
    if w.decision.is_true() {
        return Ok(w);
    }
    let mut always_disjoint = true;
    for i in params.grid.tail() {
        let xs = point_samples(x, &params.grid, i)?;
        let boxes = realize_at(net, &params.grid, i)?;
        always_disjoint &= boxes_pairwise_disjoint(&boxes);
        let outside = dist_to_union(&xs, &boxes)?;
        if outside.sign > 0 && outside.log_abs > params.v_cut * params.grid.log_eps(i) {
            return Ok(Witnessed::decided_false());
        }
    }
    if always_disjoint && gap.is_negligible(params).is_true() {
        return Ok(Witnessed::decided_false());
    }
    Ok(Witnessed::undecidable())
}

// ---------------------------------------------------------------------------
// Sharp bounds and constructors.

/// The Euclidean magnitude bound of one box: per coordinate the larger
/// absolute corner, combined across coordinates.
fn box_magnitude(b: &GBox, params: &Params) -> Result<Gn> {
    let mut mags = Vec::with_capacity(b.dim());
    for (l, h) in b.lo().iter().zip(b.hi()) {
        mags.push(eventual_max(&l.abs(), &h.abs(), params)?);
    }
    if mags.len() == 1 {
        return Ok(mags.pop().expect("nonempty"));
    }
    let mut sumsq = Gn::zero();
    for m in &mags {
        sumsq = sumsq.add(&m.mul(m, params)?, params)?;
    }
    sumsq.sqrt(params)
}

/// Decide sharp boundedness of an internal set and return the least
/// witness N >= 0 with sup |x| <= eps^-N eventually, or None when no
/// witness at most m_max exists. Exact corner nets decide exactly.
pub fn is_functionally_compact(k: &InternalSet, params: &Params) -> Result<Option<i32>> {
    if k.is_empty_net() {
        return Ok(Some(0));
    }
    let mags: Vec<Gn> =
        k.net().boxes().iter().map(|b| box_magnitude(b, params)).collect::<Result<_>>()?;
    if mags.iter().all(|m| m.as_exact().is_some()) {
        let n = mags
            .iter()
            .map(|m| m.as_exact().expect("checked").least_sharp_bound())
            .max()
            .expect("nonempty");
        return Ok(if n <= params.m_max { Some(n) } else { None });
    }
    for n in 0..=params.m_max {
        let bound = Gn::eps_power(-f64::from(n));
        let mut all = true;
        for m in &mags {
            if !m.leq(&bound, params)?.is_true() {
                all = false;
                break;
            }
        }
        if all {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// The closed interval [a, b] as a one-box compact net; the order a <= b
/// must decide true.
pub fn interval(a: &Gn, b: &Gn, params: &Params) -> Result<FunctionallyCompactSet> {
    if !a.leq(b, params)?.is_true() {
        return Err(Error::PreconditionError(
            "interval endpoints must satisfy a <= b decidedly".into(),
        ));
    }
    let net = BoxNet::new(vec![GBox::new(vec![a.clone()], vec![b.clone()], params)?])?;
    FunctionallyCompactSet::new(net.into(), params)
}

/// The interleaving [K_eps union H_eps]: the union net, box lists
/// concatenated. It contains every pointwise interleave of members.
pub fn interleaving_union(
    k: &FunctionallyCompactSet,
    h: &FunctionallyCompactSet,
    params: &Params,
) -> Result<FunctionallyCompactSet> {
    if k.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: h.dim() });
    }
    let mut boxes = k.set().net().boxes().to_vec();
    boxes.extend_from_slice(h.set().net().boxes());
    let set: InternalSet = BoxNet::new(boxes)?.into();
    let n = is_functionally_compact(&set, params)?
        .unwrap_or_else(|| k.sharp_bound().max(h.sharp_bound()));
    Ok(FunctionallyCompactSet::with_witness(set, n))
}

/// The intersection [K_eps intersect H_eps]: pairwise box intersections,
/// eventually empty pairs dropped.
pub fn intersection(
    k: &FunctionallyCompactSet,
    h: &FunctionallyCompactSet,
    params: &Params,
) -> Result<FunctionallyCompactSet> {
    if k.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: h.dim() });
    }
    let dim = k.dim();
    let mut boxes = Vec::new();
    'pairs: for bk in k.set().net().boxes() {
        for bh in h.set().net().boxes() {
            let mut lo = Vec::with_capacity(dim);
            let mut hi = Vec::with_capacity(dim);
            for d in 0..dim {
                let l = eventual_max(&bk.lo()[d], &bh.lo()[d], params)?;
                let h2 = eventual_min(&bk.hi()[d], &bh.hi()[d], params)?;
                if l.leq(&h2, params)?.is_false() {
                    continue 'pairs;
                }
                lo.push(l);
                hi.push(h2);
            }
            boxes.push(GBox::raw(lo, hi));
        }
    }
    let set: InternalSet = if boxes.is_empty() {
        BoxNet::empty(dim).into()
    } else {
        BoxNet::new(boxes)?.into()
    };
    let n = is_functionally_compact(&set, params)?
        .unwrap_or_else(|| k.sharp_bound().min(h.sharp_bound()));
    Ok(FunctionallyCompactSet::with_witness(set, n))
}

/// The product [K_eps x H_eps] in dimension n + d.
pub fn product(
    k: &FunctionallyCompactSet,
    h: &FunctionallyCompactSet,
    params: &Params,
) -> Result<FunctionallyCompactSet> {
    let mut boxes = Vec::new();
    for bk in k.set().net().boxes() {
        for bh in h.set().net().boxes() {
            let mut lo = bk.lo().to_vec();
            lo.extend_from_slice(bh.lo());
            let mut hi = bk.hi().to_vec();
            hi.extend_from_slice(bh.hi());
            boxes.push(GBox::raw(lo, hi));
        }
    }
    let set: InternalSet = if boxes.is_empty() {
        BoxNet::empty(k.dim() + h.dim()).into()
    } else {
        BoxNet::new(boxes)?.into()
    };
    let n = is_functionally_compact(&set, params)?
        .unwrap_or_else(|| k.sharp_bound().max(h.sharp_bound()) + 1);
    Ok(FunctionallyCompactSet::with_witness(set, n))
}

// ---------------------------------------------------------------------------
// Hausdorff distance.

/// Dedup a coordinate pool under the signed order.
fn dedup_pool(pool: &mut Vec<LogSample>) {
    pool.sort_by(|a, b| a.cmp_signed(*b));
    pool.dedup_by(|a, b| a.sign == b.sign && a.log_abs == b.log_abs);
}

/// sup over `from` of the distance to `to`, over the arrangement grid of
/// `to` face coordinates and gap midpoints clamped into each `from` box.
fn directed_sup(from: &[RBox], to: &[RBox]) -> Result<LogSample> {
    if from.is_empty() {
        return Ok(LogSample::zero());
    }
    if to.is_empty() {
        return Ok(ls_far());
    }
    let dim = from[0].lo.len();
    let half = LogSample::from_value(0.5).expect("finite");
    let mut pools: Vec<Vec<LogSample>> = vec![Vec::new(); dim];
    for (d, pool) in pools.iter_mut().enumerate() {
        for b in to {
            pool.push(b.lo[d]);
            pool.push(b.hi[d]);
        }
        dedup_pool(pool);
        let mids: Vec<LogSample> = pool
            .windows(2)
            .map(|w| w[0].add(w[1])?.mul(half))
            .collect::<Result<_>>()?;
        pool.extend(mids);
        dedup_pool(pool);
    }

    let mut sup = LogSample::zero();
    let mut coords: Vec<Vec<LogSample>> = vec![Vec::new(); dim];
    for b in from {
        for d in 0..dim {
            coords[d].clear();
            coords[d].push(b.lo[d]);
            coords[d].push(b.hi[d]);
            for &c in &pools[d] {
                coords[d].push(ls_min(ls_max(c, b.lo[d]), b.hi[d]));
            }
            dedup_pool(&mut coords[d]);
        }
        let mut idx = vec![0usize; dim];
        let mut x = vec![LogSample::zero(); dim];
        'product: loop {
            for d in 0..dim {
                x[d] = coords[d][idx[d]];
            }
            sup = ls_max(sup, dist_to_union(&x, to)?);
            let mut d = 0;
            loop {
                if d == dim {
                    break 'product;
                }
                idx[d] += 1;
                if idx[d] < coords[d].len() {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }
    Ok(sup)
}

/// The Hausdorff distance net between two internal sets, per grid point.
pub fn hausdorff_distance(k: &InternalSet, l: &InternalSet, params: &Params) -> Result<Gn> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: l.dim() });
    }
    let net = assemble_net(params, |i| {
        let kb = realize_at(k.net(), &params.grid, i)?;
        let lb = realize_at(l.net(), &params.grid, i)?;
        if kb.is_empty() && lb.is_empty() {
            return Ok(LogSample::zero());
        }
        Ok(ls_max(directed_sup(&kb, &lb)?, directed_sup(&lb, &kb)?))
    })?;
    Ok(Gn::Sampled(net))
}

/// Whether two internal sets are equal up to negligible Hausdorff distance.
pub fn hausdorff_equal(k: &InternalSet, l: &InternalSet, params: &Params) -> Result<Tri> {
    Ok(hausdorff_distance(k, l, params)?.is_negligible(params))
}

// ---------------------------------------------------------------------------
// Exhaustion and covering.

/// The j-th exhaustion step of a strongly internal set: every box pulled in
/// by eps^j and clipped to the coordinate box of radius eps^-j.
pub fn exhaustion(
    u: &StronglyInternalSet,
    j: i32,
    params: &Params,
) -> Result<FunctionallyCompactSet> {
    if j < u.base_index() {
        return Err(Error::PreconditionError(format!(
            "exhaustion index {j} is below the moderateness witness {}",
            u.base_index()
        )));
    }
    let clip_hi = Gn::eps_power(-f64::from(j));
    let clip_lo = clip_hi.neg();
    let net = match u {
        StronglyInternalSet::FullSpace { dim } => {
            let b = GBox::raw(vec![clip_lo; *dim], vec![clip_hi; *dim]);
            BoxNet::new(vec![b])?
        }
        StronglyInternalSet::Boxes { net, .. } => {
            let margin = Gn::eps_power(f64::from(j));
            let mut boxes = Vec::new();
            'boxes: for b in net.boxes() {
                let mut lo = Vec::with_capacity(b.dim());
                let mut hi = Vec::with_capacity(b.dim());
                for d in 0..b.dim() {
                    let l =
                        eventual_max(&b.lo()[d].add(&margin, params)?, &clip_lo, params)?;
                    let h =
                        eventual_min(&b.hi()[d].sub(&margin, params)?, &clip_hi, params)?;
                    if l.leq(&h, params)?.is_false() {
                        continue 'boxes;
                    }
                    lo.push(l);
                    hi.push(h);
                }
                boxes.push(GBox::raw(lo, hi));
            }
            if boxes.is_empty() {
                BoxNet::empty(net.dim())
            } else {
                BoxNet::new(boxes)?
            }
        }
    };
    let set: InternalSet = net.into();
    let n = is_functionally_compact(&set, params)?.unwrap_or(j.max(0));
    Ok(FunctionallyCompactSet::with_witness(set, n))
}

/// Sample member points of a compact net: corners, centers, and a few
/// seeded random interior points per box.
pub(crate) fn sample_members(k: &FunctionallyCompactSet, params: &Params) -> Result<Vec<GPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, 0x5e75));
    let mut out = Vec::new();
    for b in k.set().net().boxes() {
        for corner in b.corners() {
            out.push(GPoint::new(corner)?);
        }
        out.push(GPoint::new(b.center(params)?)?);
        for _ in 0..4 {
            let mut coords = Vec::with_capacity(b.dim());
            for d in 0..b.dim() {
                let t = Gn::constant(rng.gen::<f64>());
                let span = b.hi()[d].sub(&b.lo()[d], params)?;
                coords.push(b.lo()[d].add(&span.mul(&t, params)?, params)?);
            }
            out.push(GPoint::new(coords)?);
        }
    }
    Ok(out)
}

/// Distance from a corner point (coordinate nets) to the complement of a
/// box union, evaluated with eventual corner arithmetic so exact nets stay
/// exact.
fn corner_complement_margin(coords: &[Gn], net: &BoxNet, params: &Params) -> Result<Gn> {
    let mut best: Option<Gn> = None;
    for b in net.boxes() {
        let mut depth: Option<Gn> = None;
        for (d, c) in coords.iter().enumerate() {
            let lo_margin = c.sub(&b.lo()[d], params)?;
            let hi_margin = b.hi()[d].sub(c, params)?;
            let m = eventual_min(&lo_margin, &hi_margin, params)?;
            depth = Some(match depth {
                None => m,
                Some(cur) => eventual_min(&cur, &m, params)?,
            });
        }
        let depth = depth.expect("boxes have at least one dimension");
        best = Some(match best {
            None => depth,
            Some(cur) => eventual_max(&cur, &depth, params)?,
        });
    }
    best.ok_or_else(|| Error::EmptySetError("no boxes in the target set".into()))
}

/// Find j with K contained in the j-th exhaustion of U: the largest of the
/// distance-gap index, the sharp bound of K, and the moderateness witness
/// of U. The containment precondition is spot-checked on sampled members.
pub fn find_covering_index(
    k: &FunctionallyCompactSet,
    u: &StronglyInternalSet,
    params: &Params,
) -> Result<i32> {
    if k.dim() != u.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), got: k.dim() });
    }
    for m in sample_members(k, params)? {
        if member_strongly(&m, u, params)?.decision.is_false() {
            return Err(Error::ContainmentError(
                "a sampled member of K is not strongly inside U".into(),
            ));
        }
    }
    let j1 = match u {
        StronglyInternalSet::FullSpace { .. } => None,
        StronglyInternalSet::Boxes { net, .. } => {
            let mut margin: Option<Gn> = None;
            for b in k.set().net().boxes() {
                for corner in b.corners() {
                    let m = corner_complement_margin(&corner, net, params)?;
                    margin = Some(match margin {
                        None => m,
                        Some(cur) => eventual_min(&cur, &m, params)?,
                    });
                }
            }
            match margin {
                None => None,
                Some(m) => Some(gap_index(&m, params)?),
            }
        }
    };
    Ok([j1, Some(k.sharp_bound()), Some(u.base_index())]
        .into_iter()
        .flatten()
        .max()
        .expect("sharp bound always present"))
}

/// Least j >= 0 with eps^j <= margin eventually.
fn gap_index(margin: &Gn, params: &Params) -> Result<i32> {
    if let Some(e) = margin.as_exact() {
        return e.least_power_below().ok_or_else(|| {
            Error::ContainmentError("the distance margin is not eventually positive".into())
        });
    }
    for j in params.witness_range() {
        if Gn::eps_power(f64::from(j)).leq(margin, params)?.is_true() {
            return Ok(j);
        }
    }
    let est = margin.valuation(params);
    match (est.value, est.reliable) {
        (Valuation::Finite(v), true) => Ok((v.ceil() as i32).max(0)),
        _ => Err(Error::PreconditionError(
            "distance margin valuation is unreliable; no covering index found".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactNet;
    use crate::sampled::SampledNet;

    fn params() -> Params {
        Params::default()
    }

    fn unit_interval_set(p: &Params) -> FunctionallyCompactSet {
        interval(&Gn::constant(-1.0), &Gn::constant(1.0), p).unwrap()
    }

    fn point1(x: Gn) -> GPoint {
        GPoint::new(vec![x]).unwrap()
    }

    /// 1 + e^{-1/eps}: the excess sits below every power of eps.
    fn one_plus_rapidly_vanishing(p: &Params) -> Gn {
        Gn::Sampled(
            SampledNet::from_log_fn(p, |eps, _| (1, (-1.0 / eps).exp().ln_1p())).unwrap(),
        )
    }

    #[test]
    fn internal_membership_matches_the_reference_cases() {
        let p = params();
        let k = unit_interval_set(&p);
        assert!(member_internal(&point1(Gn::zero()), k.set(), &p).unwrap().is_true());
        assert!(member_internal(&point1(Gn::constant(2.0)), k.set(), &p).unwrap().is_false());
        let squeezed = point1(one_plus_rapidly_vanishing(&p));
        assert!(member_internal(&squeezed, k.set(), &p).unwrap().is_true());
    }

    #[test]
    fn exterior_membership_witnesses_the_distance_gap() {
        let p = params();
        let k = unit_interval_set(&p);
        let far = member_exterior(&point1(Gn::constant(2.0)), &k, &p).unwrap();
        assert!(far.decision.is_true());

        let near = point1(Gn::Exact(ExactNet::from_terms(vec![(1.0, 0.0), (1.0, 1.0)]).unwrap()));
        let w = member_exterior(&near, &k, &p).unwrap();
        assert!(w.decision.is_true());
        assert_eq!(w.witness, Some(2));

        let squeezed = point1(one_plus_rapidly_vanishing(&p));
        assert!(member_exterior(&squeezed, &k, &p).unwrap().decision.is_false());
    }

    #[test]
    fn sharp_bounds_come_from_corner_magnitudes() {
        let p = params();
        assert_eq!(unit_interval_set(&p).sharp_bound(), 0);

        let k = interval(
            &Gn::Exact(ExactNet::from_terms(vec![(-1.0, -2.0)]).unwrap()),
            &Gn::Exact(ExactNet::from_terms(vec![(1.0, -3.0)]).unwrap()),
            &p,
        )
        .unwrap();
        assert_eq!(k.sharp_bound(), 3);

        assert!(interval(&Gn::constant(1.0), &Gn::constant(0.0), &p).is_err());
    }

    #[test]
    fn immoderate_corners_are_rejected_at_construction() {
        let p = params();
        let blow_up = SampledNet::from_log_fn(&p, |_, le| (1, -15.0 * le)).unwrap();
        assert!(!blow_up.is_moderate());
        let err = GBox::new(vec![Gn::zero()], vec![Gn::Sampled(blow_up)], &p).unwrap_err();
        assert!(matches!(err, Error::PreconditionError(_)));
    }

    #[test]
    fn intersection_and_product_follow_box_arithmetic() {
        let p = params();
        let a = interval(&Gn::constant(0.0), &Gn::constant(2.0), &p).unwrap();
        let b = interval(&Gn::constant(1.0), &Gn::constant(3.0), &p).unwrap();
        let meet = intersection(&a, &b, &p).unwrap();
        let expected = interval(&Gn::constant(1.0), &Gn::constant(2.0), &p).unwrap();
        assert!(hausdorff_equal(meet.set(), expected.set(), &p).unwrap().is_true());

        let c = interval(&Gn::constant(2.0), &Gn::constant(3.0), &p).unwrap();
        let touching = intersection(&a, &c, &p).unwrap();
        assert!(!touching.set().is_empty_net());
        assert!(member_internal(&point1(Gn::constant(2.0)), touching.set(), &p)
            .unwrap()
            .is_true());
        let d = interval(&Gn::constant(4.0), &Gn::constant(5.0), &p).unwrap();
        let really_empty = intersection(&a, &d, &p).unwrap();
        assert!(really_empty.set().is_empty_net());

        let rect = product(&a, &b, &p).unwrap();
        assert_eq!(rect.dim(), 2);
        let inside = GPoint::from_reals(&[0.5, 2.5]).unwrap();
        let outside = GPoint::from_reals(&[0.5, 4.0]).unwrap();
        assert!(member_internal(&inside, rect.set(), &p).unwrap().is_true());
        assert!(member_internal(&outside, rect.set(), &p).unwrap().is_false());
    }

    #[test]
    fn interleaving_union_contains_the_alternating_point() {
        let p = params();
        let k = interval(&Gn::constant(-0.5), &Gn::constant(0.5), &p).unwrap();
        let h = interval(&Gn::constant(2.5), &Gn::constant(3.5), &p).unwrap();
        let union = interleaving_union(&k, &h, &p).unwrap();

        let blocks = crate::idempotent::IdempotentSet::alternating_blocks(1, 0).unwrap();
        let hopper = crate::idempotent::interleave(
            &[Gn::constant(0.0), Gn::constant(3.0)],
            &[blocks.clone(), blocks.complement()],
            &p,
        )
        .unwrap();
        let x = point1(hopper);
        assert!(member_internal(&x, union.set(), &p).unwrap().is_true());
        assert!(member_internal(&x, k.set(), &p).unwrap().is_false());

        assert!(member_internal(&point1(Gn::zero()), union.set(), &p).unwrap().is_true());

        let same = interleaving_union(&k, &k, &p).unwrap();
        assert!(hausdorff_equal(same.set(), k.set(), &p).unwrap().is_true());
    }

    #[test]
    fn strong_membership_requires_a_distance_gap() {
        let p = params();
        let u = StronglyInternalSet::open_interval(-1.0, 1.0, &p).unwrap();
        assert_eq!(u.base_index(), 1);

        let w = member_strongly(&point1(Gn::zero()), &u, &p).unwrap();
        assert!(w.decision.is_true());
        assert_eq!(w.witness, Some(1));

        let near_edge =
            point1(Gn::Exact(ExactNet::from_terms(vec![(1.0, 0.0), (-1.0, 1.0)]).unwrap()));
        let w = member_strongly(&near_edge, &u, &p).unwrap();
        assert!(w.decision.is_true());
        assert_eq!(w.witness, Some(2));

        // On the boundary the complement gap vanishes.
        assert!(member_strongly(&point1(Gn::constant(1.0)), &u, &p).unwrap().decision.is_false());
        // Outside by a visible margin.
        assert!(member_strongly(&point1(Gn::constant(2.0)), &u, &p).unwrap().decision.is_false());

        // Squeezed against the boundary: gap e^{-1/eps}, below every power.
        let squeezed = Gn::Sampled(
            SampledNet::from_log_fn(&p, |eps, _| (1, (-(-1.0f64 / eps).exp()).ln_1p())).unwrap(),
        );
        assert!(member_strongly(&point1(squeezed), &u, &p).unwrap().decision.is_false());

        let full = StronglyInternalSet::full_space(1).unwrap();
        let w = member_strongly(&point1(Gn::constant(9.0)), &full, &p).unwrap();
        assert!(w.decision.is_true());
    }

    #[test]
    fn alternating_point_fails_both_components_of_a_split_union() {
        let p = params();
        let blocks = crate::idempotent::IdempotentSet::alternating_blocks(1, 0).unwrap();
        let hopper = crate::idempotent::interleave(
            &[Gn::constant(0.0), Gn::constant(3.0)],
            &[blocks.clone(), blocks.complement()],
            &p,
        )
        .unwrap();
        let x = point1(hopper);

        let u1 = StronglyInternalSet::open_interval(-0.5, 0.5, &p).unwrap();
        let u2 = StronglyInternalSet::open_interval(2.5, 3.5, &p).unwrap();
        assert!(member_strongly(&x, &u1, &p).unwrap().decision.is_false());
        assert!(member_strongly(&x, &u2, &p).unwrap().decision.is_false());

        // Yet the interleaving of the closures does contain the point, so
        // the union of the two strongly internal sets is strictly smaller
        // than the interleaving of the union net.
        let k = interval(&Gn::constant(-0.5), &Gn::constant(0.5), &p).unwrap();
        let h = interval(&Gn::constant(2.5), &Gn::constant(3.5), &p).unwrap();
        let union = interleaving_union(&k, &h, &p).unwrap();
        assert!(member_internal(&x, union.set(), &p).unwrap().is_true());
    }

    #[test]
    fn hausdorff_equality_ignores_rapidly_vanishing_holes() {
        let p = params();
        let k: InternalSet = BoxNet::new(vec![GBox::from_reals(&[-1.0], &[1.0]).unwrap()])
            .unwrap()
            .into();
        assert!(hausdorff_equal(&k, &k, &p).unwrap().is_true());

        let hole = Gn::Sampled(SampledNet::from_log_fn(&p, |eps, _| (1, -1.0 / eps)).unwrap());
        let punctured: InternalSet = BoxNet::new(vec![
            GBox::new(vec![Gn::constant(-1.0)], vec![hole.neg()], &p).unwrap(),
            GBox::new(vec![hole.clone()], vec![Gn::constant(1.0)], &p).unwrap(),
        ])
        .unwrap()
        .into();
        assert!(hausdorff_equal(&k, &punctured, &p).unwrap().is_true());

        let widened: InternalSet = BoxNet::new(vec![GBox::new(
            vec![Gn::constant(-1.0)],
            vec![Gn::Exact(ExactNet::from_terms(vec![(1.0, 0.0), (1.0, 1.0)]).unwrap())],
            &p,
        )
        .unwrap()])
        .unwrap()
        .into();
        assert!(hausdorff_equal(&k, &widened, &p).unwrap().is_false());
        let d = hausdorff_distance(&k, &widened, &p).unwrap();
        let v = d.valuation(&p);
        assert!(v.reliable);
        assert!((v.value.finite().unwrap() - 1.0).abs() < 0.05);
    }

    #[test]
    fn exhaustion_contracts_boxes_by_the_probe_power() {
        let p = params();
        let u = StronglyInternalSet::open_interval(-1.0, 1.0, &p).unwrap();
        let k1 = exhaustion(&u, 1, &p).unwrap();
        let expected = interval(
            &Gn::Exact(ExactNet::from_terms(vec![(-1.0, 0.0), (1.0, 1.0)]).unwrap()),
            &Gn::Exact(ExactNet::from_terms(vec![(1.0, 0.0), (-1.0, 1.0)]).unwrap()),
            &p,
        )
        .unwrap();
        assert!(hausdorff_equal(k1.set(), expected.set(), &p).unwrap().is_true());

        assert!(exhaustion(&u, 0, &p).is_err());

        // Monotone: members of K_j stay members of K_{j+1}.
        let k2 = exhaustion(&u, 2, &p).unwrap();
        for x in [-0.9, -0.3, 0.0, 0.4, 0.8] {
            let pt = point1(Gn::constant(x));
            if member_internal(&pt, k1.set(), &p).unwrap().is_true() {
                assert!(member_internal(&pt, k2.set(), &p).unwrap().is_true());
            }
        }

        let full = StronglyInternalSet::full_space(1).unwrap();
        let ball = exhaustion(&full, 3, &p).unwrap();
        assert_eq!(ball.sharp_bound(), 3);
        let giant = point1(Gn::Exact(ExactNet::from_terms(vec![(1.0, -2.0)]).unwrap()));
        assert!(member_internal(&giant, ball.set(), &p).unwrap().is_true());
    }

    #[test]
    fn covering_index_matches_the_reference_cases() {
        let p = params();
        let u = StronglyInternalSet::open_interval(-1.0, 1.0, &p).unwrap();

        let half = interval(&Gn::constant(-0.5), &Gn::constant(0.5), &p).unwrap();
        let j = find_covering_index(&half, &u, &p).unwrap();
        assert_eq!(j, 1);

        let tight = interval(
            &Gn::Exact(ExactNet::from_terms(vec![(-1.0, 0.0), (1.0, 2.0)]).unwrap()),
            &Gn::Exact(ExactNet::from_terms(vec![(1.0, 0.0), (-1.0, 2.0)]).unwrap()),
            &p,
        )
        .unwrap();
        let j = find_covering_index(&tight, &u, &p).unwrap();
        assert_eq!(j, 2);

        let full = StronglyInternalSet::full_space(1).unwrap();
        let wide = interval(
            &Gn::constant(0.0),
            &Gn::Exact(ExactNet::from_terms(vec![(1.0, -3.0)]).unwrap()),
            &p,
        )
        .unwrap();
        assert_eq!(find_covering_index(&wide, &full, &p).unwrap(), 3);

        // K reaching outside U is caught by the containment spot check.
        let too_big = interval(&Gn::constant(-2.0), &Gn::constant(2.0), &p).unwrap();
        assert!(matches!(
            find_covering_index(&too_big, &u, &p),
            Err(Error::ContainmentError(_))
        ));
    }

    #[test]
    fn covering_index_guarantees_membership_in_the_exhaustion() {
        let p = params();
        let u = StronglyInternalSet::open_interval(-1.0, 1.0, &p).unwrap();
        let tight = interval(
            &Gn::Exact(ExactNet::from_terms(vec![(-1.0, 0.0), (1.0, 2.0)]).unwrap()),
            &Gn::Exact(ExactNet::from_terms(vec![(1.0, 0.0), (-1.0, 2.0)]).unwrap()),
            &p,
        )
        .unwrap();
        let j = find_covering_index(&tight, &u, &p).unwrap();
        let kj = exhaustion(&u, j, &p).unwrap();
        for m in sample_members(&tight, &p).unwrap() {
            assert!(
                member_internal(&m, kj.set(), &p).unwrap().is_true(),
                "member not covered at j = {j}"
            );
        }
    }

    #[test]
    fn box_net_json_round_trips_exact_corners() {
        let p = params();
        let k = interval(
            &Gn::Exact(ExactNet::from_terms(vec![(-1.0, 0.0), (1.0, 2.0)]).unwrap()),
            &Gn::constant(1.0),
            &p,
        )
        .unwrap();
        let json = serde_json::to_string(k.set().net()).unwrap();
        assert_eq!(json, r#"[[["-1 + eps^2","1"]]]"#);
        let back: BoxNet = serde_json::from_str(&json).unwrap();
        assert_eq!(&back, k.set().net());

        let bad: std::result::Result<BoxNet, _> = serde_json::from_str(r#"[[["1","0"]]]"#);
        assert!(bad.is_err());
    }
}
