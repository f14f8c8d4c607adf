//! Idempotent elements e_S and interleaving along grid partitions.
//!
//! An idempotent is the class of a 0/1-valued net: 1 on a subset S of the
//! eps-axis, 0 elsewhere. Only representable families are supported, so
//! whether S (or its complement) accumulates at eps = 0 stays decidable:
//! e_S is nonzero in the ring exactly when S accumulates at 0.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::EpsilonGrid;
use crate::number::GeneralizedNumber;
use crate::params::Params;
use crate::sampled::{LogSample, SampledNet};

/// A representable subset of the eps-axis, identified with the grid indices
/// it captures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum IdempotentSet {
    /// The whole axis.
    Full,
    /// The empty set.
    Empty,
    /// Finitely many grid indices; bounded away from 0, hence negligible.
    FiniteIndices { indices: BTreeSet<usize> },
    /// All grid indices except finitely many.
    CofiniteIndices { excluded: BTreeSet<usize> },
    /// A finite union of closed eps-intervals inside [0, 1].
    EpsIntervals { intervals: Vec<(f64, f64)>, complemented: bool },
    /// Blocks of `block_len` consecutive grid indices, alternating in and
    /// out; `offset` selects which parity is in. Both the set and its
    /// complement accumulate at 0.
    AlternatingBlocks { block_len: usize, offset: usize },
}

impl IdempotentSet {
    pub fn eps_intervals(intervals: Vec<(f64, f64)>) -> Result<IdempotentSet> {
        for &(lo, hi) in &intervals {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi && hi <= 1.0) {
                return Err(Error::PreconditionError(format!(
                    "eps interval [{lo}, {hi}] must satisfy 0 <= lo <= hi <= 1"
                )));
            }
        }
        Ok(IdempotentSet::EpsIntervals { intervals, complemented: false })
    }

    pub fn alternating_blocks(block_len: usize, offset: usize) -> Result<IdempotentSet> {
        if block_len == 0 || offset > 1 {
            return Err(Error::PreconditionError(
                "alternating blocks need block_len >= 1 and offset in {0, 1}".into(),
            ));
        }
        Ok(IdempotentSet::AlternatingBlocks { block_len, offset })
    }

    pub fn complement(&self) -> IdempotentSet {
        match self {
            IdempotentSet::Full => IdempotentSet::Empty,
            IdempotentSet::Empty => IdempotentSet::Full,
            IdempotentSet::FiniteIndices { indices } => {
                IdempotentSet::CofiniteIndices { excluded: indices.clone() }
            }
            IdempotentSet::CofiniteIndices { excluded } => {
                IdempotentSet::FiniteIndices { indices: excluded.clone() }
            }
            IdempotentSet::EpsIntervals { intervals, complemented } => IdempotentSet::EpsIntervals {
                intervals: intervals.clone(),
                complemented: !complemented,
            },
            IdempotentSet::AlternatingBlocks { block_len, offset } => {
                IdempotentSet::AlternatingBlocks { block_len: *block_len, offset: offset ^ 1 }
            }
        }
    }

    /// Whether grid index i belongs to S.
    pub fn contains(&self, grid: &EpsilonGrid, i: usize) -> bool {
        match self {
            IdempotentSet::Full => true,
            IdempotentSet::Empty => false,
            IdempotentSet::FiniteIndices { indices } => indices.contains(&i),
            IdempotentSet::CofiniteIndices { excluded } => !excluded.contains(&i),
            IdempotentSet::EpsIntervals { intervals, complemented } => {
                let eps = grid.eps(i);
                let inside = intervals.iter().any(|&(lo, hi)| lo <= eps && eps <= hi);
                inside != *complemented
            }
            IdempotentSet::AlternatingBlocks { block_len, offset } => {
                (i / block_len) % 2 == *offset
            }
        }
    }

    /// Whether S accumulates at eps = 0, which is exactly when e_S is
    /// nonzero in the ring.
    pub fn zero_in_closure(&self) -> bool {
        match self {
            IdempotentSet::Full => true,
            IdempotentSet::Empty => false,
            IdempotentSet::FiniteIndices { .. } => false,
            IdempotentSet::CofiniteIndices { .. } => true,
            IdempotentSet::EpsIntervals { intervals, complemented } => {
                let touches = intervals.iter().any(|&(lo, _)| lo == 0.0);
                touches != *complemented
            }
            IdempotentSet::AlternatingBlocks { .. } => true,
        }
    }

    /// The idempotent e_S as a sampled 0/1 net on the configured grid.
    pub fn idempotent(&self, params: &Params) -> GeneralizedNumber {
        let samples = params
            .grid
            .indices()
            .map(|i| {
                if self.contains(&params.grid, i) {
                    LogSample { sign: 1, log_abs: 0.0 }
                } else {
                    LogSample::zero()
                }
            })
            .collect();
        GeneralizedNumber::Sampled(SampledNet::from_samples_in(params, samples))
    }
}

/// The interleaving sum over a partition: the number equal to a_j on S_j.
///
/// The parts must tile the grid indices exactly, each index covered once.
pub fn interleave(
    points: &[GeneralizedNumber],
    parts: &[IdempotentSet],
    params: &Params,
) -> Result<GeneralizedNumber> {
    if points.len() != parts.len() {
        return Err(Error::PartitionError(format!(
            "{} points against {} parts",
            points.len(),
            parts.len()
        )));
    }
    if parts.is_empty() {
        return Err(Error::PartitionError("empty partition".into()));
    }
    let grid = &params.grid;
    let mut samples = Vec::with_capacity(grid.len());
    for i in grid.indices() {
        let mut owner = None;
        for (j, part) in parts.iter().enumerate() {
            if part.contains(grid, i) {
                if owner.is_some() {
                    return Err(Error::PartitionError(format!(
                        "grid index {i} covered by more than one part"
                    )));
                }
                owner = Some(j);
            }
        }
        let Some(j) = owner else {
            return Err(Error::PartitionError(format!("grid index {i} not covered")));
        };
        samples.push(points[j].sample_log(grid, i)?);
    }
    Ok(GeneralizedNumber::Sampled(SampledNet::from_samples_in(params, samples)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tri::Tri;

    fn p() -> Params {
        Params::default()
    }

    fn alt(offset: usize) -> IdempotentSet {
        IdempotentSet::alternating_blocks(1, offset).unwrap()
    }

    #[test]
    fn idempotents_square_to_themselves_pointwise() {
        let p = p();
        for set in [
            IdempotentSet::Full,
            alt(0),
            IdempotentSet::eps_intervals(vec![(0.0, 0.01)]).unwrap(),
            IdempotentSet::FiniteIndices { indices: [0, 3].into_iter().collect() },
        ] {
            let e = set.idempotent(&p);
            let sq = e.mul(&e, &p).unwrap();
            for i in p.grid.indices() {
                assert_eq!(
                    sq.sample_log(&p.grid, i).unwrap(),
                    e.sample_log(&p.grid, i).unwrap()
                );
            }
        }
    }

    #[test]
    fn complementary_idempotents_sum_to_one() {
        let p = p();
        let s = alt(0);
        let sum = s.idempotent(&p).add(&s.complement().idempotent(&p), &p).unwrap();
        for i in p.grid.indices() {
            assert_eq!(sum.value_at(&p.grid, i).unwrap(), 1.0);
        }
    }

    #[test]
    fn trivial_partition_is_identity() {
        let p = p();
        let x = GeneralizedNumber::Exact(
            crate::exact::ExactNet::from_terms(vec![(2.0, 0.0), (1.0, 1.0)]).unwrap(),
        );
        let y = interleave(&[x.clone()], &[IdempotentSet::Full], &p).unwrap();
        for i in p.grid.indices() {
            let a = x.sample_log(&p.grid, i).unwrap();
            let b = y.sample_log(&p.grid, i).unwrap();
            assert_eq!(a.sign, b.sign);
            assert!((a.log_abs - b.log_abs).abs() < 1e-12);
        }
    }

    #[test]
    fn alternating_interleave_hops_between_values() {
        let p = p();
        let x = interleave(
            &[GeneralizedNumber::constant(0.0), GeneralizedNumber::constant(3.0)],
            &[alt(0), alt(1)],
            &p,
        )
        .unwrap();
        for i in p.grid.indices() {
            let want = if i % 2 == 0 { 0.0 } else { 3.0 };
            assert!((x.value_at(&p.grid, i).unwrap() - want).abs() < 1e-12);
        }
        // The hopping number is a zero divisor: neither negligible nor
        // invertible, and e_S <= 1 still holds.
        assert!(x.is_negligible(&p).is_false());
        assert_eq!(x.is_invertible(&p).unwrap(), Tri::False);
        let e = alt(0).idempotent(&p);
        assert_eq!(e.leq(&GeneralizedNumber::constant(1.0), &p).unwrap(), Tri::True);
    }

    #[test]
    fn partition_violations_are_rejected() {
        let p = p();
        let pts = [GeneralizedNumber::constant(1.0), GeneralizedNumber::constant(2.0)];
        // Overlap: both parts full.
        let overlap = interleave(&pts, &[IdempotentSet::Full, IdempotentSet::Full], &p);
        assert!(matches!(overlap, Err(Error::PartitionError(_))));
        // Gap: both parts empty.
        let gap = interleave(&pts, &[IdempotentSet::Empty, IdempotentSet::Empty], &p);
        assert!(matches!(gap, Err(Error::PartitionError(_))));
        // Length mismatch.
        let short = interleave(&pts, &[IdempotentSet::Full], &p);
        assert!(matches!(short, Err(Error::PartitionError(_))));
    }

    #[test]
    fn closure_flags_decide_ring_vanishing() {
        let p = p();
        let finite = IdempotentSet::FiniteIndices { indices: [1, 2].into_iter().collect() };
        assert!(!finite.zero_in_closure());
        assert!(finite.complement().zero_in_closure());
        assert!(finite.idempotent(&p).is_negligible(&p).is_true());

        let blocks = alt(0);
        assert!(blocks.zero_in_closure());
        assert!(blocks.complement().zero_in_closure());
        assert!(blocks.idempotent(&p).is_negligible(&p).is_false());

        let away = IdempotentSet::eps_intervals(vec![(0.25, 1.0)]).unwrap();
        assert!(!away.zero_in_closure());
        assert!(away.complement().zero_in_closure());

        let touching = IdempotentSet::eps_intervals(vec![(0.0, 0.5)]).unwrap();
        assert!(touching.zero_in_closure());
        assert!(!touching.complement().zero_in_closure());
    }
}
