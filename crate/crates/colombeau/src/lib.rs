//! Computable Colombeau-style generalized numbers and functions.
//!
//! The crate models elements of the ring of generalized numbers (nets of
//! reals indexed by eps in (0, 1], up to negligible differences) with two
//! backends: exact finite power sums in eps, and grid samples in signed log
//! magnitude. On top of the ring it builds internal and functionally compact
//! sets from box nets, generalized smooth functions given by symbolic
//! expression nets, compact-support verification, sharp norms, and the
//! metrics that generate the sharp topology on compactly supported
//! generalized functions.
//!
//! Everything sampled is semi-decidable by nature: decisions come back as
//! three-valued [`Tri`] answers with explicit exponent witnesses, and
//! valuation estimates carry their fit diagnostics.

pub mod error;
pub mod exact;
pub mod expr;
pub mod grid;
pub mod gsf;
pub mod idempotent;
pub mod kernels;
pub mod norms;
pub mod number;
pub mod optimize;
pub mod params;
pub mod parse;
pub mod point;
pub mod sampled;
pub mod set;
pub mod tri;

pub use error::{Error, Result};
pub use exact::{AsymptoticTerm, ExactNet};
pub use expr::SmoothExpr;
pub use grid::EpsilonGrid;
pub use gsf::{
    cutoff_embed_cgf, delta_embedding, extend_global, extreme_values, image_enclosure,
    mollified_representative, support_positive_at, verify_compact_support,
    CompactlySupportedGsf, EvalReport, ExteriorSample, Extremes, Gsf, ImageEnclosure,
    ModeratenessCertificate, SupportCheck, SupportCounterexample,
};
pub use idempotent::{interleave, IdempotentSet};
pub use norms::{
    absorbent_witness, ball_member, c_set_member, cauchy_limit, metric, norm_m, norm_m_global,
    norm_over, p_m, u_set_member, v_m, AbsorbentWitness, CauchyLimit, CauchyTailCheck,
    MetricReport, NormValue,
};
pub use number::GeneralizedNumber;
pub use optimize::{derive_seed, maximize_over_box, minimize_over_box, BoxOptimum};
pub use params::{OptimizerConfig, Params};
pub use parse::{parse_exact_net, parse_expr};
pub use point::{ball_member_point, GPoint};
pub use sampled::{LogSample, SampledNet, Valuation, ValuationEstimate};
pub use set::{
    exhaustion, find_covering_index, hausdorff_distance, hausdorff_equal, interleaving_union,
    intersection, interval, is_functionally_compact, member_exterior, member_internal,
    member_strongly, product, BoxNet, FunctionallyCompactSet, GBox, InternalSet,
    StronglyInternalSet,
};
pub use tri::{Tri, Witnessed};
