//! Deterministic box optimization for sup-on-compact evaluations.
//!
//! The maximizer scans a dense product grid over the box, then refines from
//! the best scan point plus seeded random starts with a compass search that
//! halves its step whenever no axis move strictly improves. Objectives are
//! evaluated in the signed log encoding so magnitudes far outside float
//! range still compare correctly. Points where the objective faults are
//! skipped; the run fails only if no candidate at all evaluates.
//!
//! Ties, including fully flat objectives, resolve to the lexicographically
//! smallest argument so repeated runs and platform changes agree.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::params::OptimizerConfig;
use crate::sampled::LogSample;

/// Location and signed log value of a box extremum.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxOptimum {
    pub arg: Vec<f64>,
    pub value: LogSample,
}

/// Mix a salt into a base seed so per-index optimizer calls decorrelate
/// while staying reproducible.
pub fn derive_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct Search<'a, F> {
    f: F,
    lo: &'a [f64],
    hi: &'a [f64],
    best: Option<BoxOptimum>,
    first_err: Option<Error>,
}

impl<'a, F: FnMut(&[f64]) -> Result<LogSample>> Search<'a, F> {
    /// Evaluate one point and fold it into the incumbent.
    fn visit(&mut self, x: &[f64]) -> bool {
        let v = match (self.f)(x) {
            Ok(v) => v,
            Err(e) => {
                self.first_err.get_or_insert(e);
                return false;
            }
        };
        let better = match &self.best {
            None => true,
            Some(b) => match v.cmp_signed(b.value) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => lex_less(x, &b.arg),
            },
        };
        if better {
            self.best = Some(BoxOptimum { arg: x.to_vec(), value: v });
        }
        better
    }

    fn scan(&mut self, per_dim: usize) {
        let n = self.lo.len();
        let mut idx = vec![0usize; n];
        let mut x = vec![0.0; n];
        loop {
            for d in 0..n {
                let t = if per_dim == 1 { 0.5 } else { idx[d] as f64 / (per_dim - 1) as f64 };
                x[d] = self.lo[d] + t * (self.hi[d] - self.lo[d]);
            }
            self.visit(&x);
            let mut d = 0;
            loop {
                if d == n {
                    return;
                }
                idx[d] += 1;
                if idx[d] < per_dim {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }

    fn refine(&mut self, start: &[f64], iters: usize) {
        let n = self.lo.len();
        let mut x = start.to_vec();
        let mut fx = match (self.f)(&x) {
            Ok(v) => v,
            Err(_) => return,
        };
        self.visit(&x);
        let mut h: Vec<f64> = (0..n).map(|d| (self.hi[d] - self.lo[d]) / 8.0).collect();
        for _ in 0..iters {
            let mut moved = false;
            for d in 0..n {
                if h[d] == 0.0 {
                    continue;
                }
                for s in [1.0, -1.0] {
                    let cand = (x[d] + s * h[d]).clamp(self.lo[d], self.hi[d]);
                    if cand == x[d] {
                        continue;
                    }
                    let saved = x[d];
                    x[d] = cand;
                    match (self.f)(&x) {
                        Ok(v) if v.cmp_signed(fx) == std::cmp::Ordering::Greater => {
                            fx = v;
                            self.visit(&x);
                            moved = true;
                        }
                        _ => x[d] = saved,
                    }
                }
            }
            if !moved {
                let mut all_tiny = true;
                for d in 0..n {
                    h[d] *= 0.5;
                    if h[d] > (self.hi[d] - self.lo[d]) * f64::EPSILON {
                        all_tiny = false;
                    }
                }
                if all_tiny {
                    return;
                }
            }
        }
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x < y;
        }
    }
    false
}

fn check_box(lo: &[f64], hi: &[f64]) -> Result<()> {
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
    Ok(())
}

/// Points per dimension for the dense scan: the configured count, reduced
/// so the product stays near the square of that count in high dimensions.
fn scan_points_per_dim(cfg: &OptimizerConfig, n: usize) -> usize {
    let budget = (cfg.grid_points * cfg.grid_points).max(4) as f64;
    let per_dim = budget.powf(1.0 / n as f64).floor() as usize;
    per_dim.clamp(2, cfg.grid_points.max(2))
}

/// Maximize the signed objective over the box `[lo, hi]`.
pub fn maximize_over_box<F>(
    mut f: F,
    lo: &[f64],
    hi: &[f64],
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<BoxOptimum>
where
    F: FnMut(&[f64]) -> Result<LogSample>,
{
    check_box(lo, hi)?;
    let n = lo.len();
    let mut search = Search { f: &mut f, lo, hi, best: None, first_err: None };
    search.scan(scan_points_per_dim(cfg, n));
    let center: Vec<f64> = (0..n).map(|d| lo[d] + 0.5 * (hi[d] - lo[d])).collect();
    search.visit(&center);
    if n <= 12 {
        let mut corner = vec![0.0; n];
        for mask in 0..(1u32 << n) {
            for d in 0..n {
                corner[d] = if mask >> d & 1 == 1 { hi[d] } else { lo[d] };
            }
            search.visit(&corner);
        }
    }

    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(cfg.starts);
    if let Some(b) = &search.best {
        starts.push(b.arg.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while starts.len() < cfg.starts {
        starts.push((0..n).map(|d| lo[d] + rng.gen::<f64>() * (hi[d] - lo[d])).collect());
    }
    for start in starts {
        search.refine(&start, cfg.iters);
    }

    match search.best {
        Some(b) => Ok(b),
        None => Err(search.first_err.unwrap_or_else(|| {
            Error::PreconditionError("objective was undefined at every probed point".into())
        })),
    }
}

/// Minimize the signed objective over the box `[lo, hi]`.
pub fn minimize_over_box<F>(
    mut f: F,
    lo: &[f64],
    hi: &[f64],
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<BoxOptimum>
where
    F: FnMut(&[f64]) -> Result<LogSample>,
{
    let flipped = maximize_over_box(|x| f(x).map(LogSample::neg), lo, hi, cfg, seed)?;
    Ok(BoxOptimum { arg: flipped.arg, value: flipped.value.neg() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> OptimizerConfig {
        OptimizerConfig::default()
    }

    fn quad(center: &[f64]) -> impl FnMut(&[f64]) -> Result<LogSample> + '_ {
        move |x: &[f64]| {
            let s: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
            LogSample::from_value(1.0 - s)
        }
    }

    #[test]
    fn finds_interior_maximum_of_a_paraboloid() {
        let m = maximize_over_box(quad(&[0.3]), &[-1.0], &[1.0], &cfg(), 7).unwrap();
        assert!((m.arg[0] - 0.3).abs() < 1e-6, "arg {}", m.arg[0]);
        assert!((m.value.value() - 1.0).abs() < 1e-9);

        let m = maximize_over_box(quad(&[0.25, -0.5]), &[-1.0, -1.0], &[1.0, 1.0], &cfg(), 7)
            .unwrap();
        assert!((m.arg[0] - 0.25).abs() < 1e-6);
        assert!((m.arg[1] + 0.5).abs() < 1e-6);
    }

    #[test]
    fn boundary_ties_resolve_to_the_smallest_argument() {
        let m = maximize_over_box(
            |x| LogSample::from_value(x[0] * x[0]),
            &[-1.0],
            &[1.0],
            &cfg(),
            11,
        )
        .unwrap();
        assert_eq!(m.arg[0], -1.0);
        assert!((m.value.value() - 1.0).abs() < 1e-12);

        let flat = maximize_over_box(|_| LogSample::from_value(4.0), &[-2.0, 0.5], &[3.0, 2.0], &cfg(), 11)
            .unwrap();
        assert_eq!(flat.arg, vec![-2.0, 0.5]);
    }

    #[test]
    fn minimize_mirrors_maximize() {
        let m = minimize_over_box(quad(&[0.3]), &[-1.0], &[1.0], &cfg(), 5).unwrap();
        assert_eq!(m.arg[0], -1.0);
        assert!((m.value.value() - (1.0 - 1.69)).abs() < 1e-9);
    }

    #[test]
    fn faulting_regions_are_skipped() {
        let m = maximize_over_box(
            |x| {
                if x[0] <= 0.0 {
                    return Err(Error::EvalDomainError("log of a nonpositive value".into()));
                }
                LogSample::from_value(x[0].ln())
            },
            &[-1.0],
            &[1.0],
            &cfg(),
            3,
        )
        .unwrap();
        assert_eq!(m.arg[0], 1.0);
        assert_eq!(m.value.value(), 0.0);

        let all_bad = maximize_over_box(
            |_| Err::<LogSample, _>(Error::EvalDomainError("nope".into())),
            &[0.0],
            &[1.0],
            &cfg(),
            3,
        );
        assert!(all_bad.is_err());
    }

    #[test]
    fn runs_are_deterministic_per_seed() {
        let wiggly = |x: &[f64]| LogSample::from_value((7.0 * x[0]).sin() + 0.3 * x[0]);
        let a = maximize_over_box(wiggly, &[-3.0], &[3.0], &cfg(), 42).unwrap();
        let b = maximize_over_box(wiggly, &[-3.0], &[3.0], &cfg(), 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.arg[0].to_bits(), b.arg[0].to_bits());
    }

    #[test]
    fn degenerate_point_boxes_work() {
        let m = maximize_over_box(quad(&[0.0]), &[0.5], &[0.5], &cfg(), 1).unwrap();
        assert_eq!(m.arg, vec![0.5]);
        assert!((m.value.value() - 0.75).abs() < 1e-12);
    }
}
