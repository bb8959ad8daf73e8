//! The product-set measure as a function of the contraction ratio:
//! pointwise truncated values, certified enclosures over ratio grids, and
//! reports on monotonicity and uniform-approximation bounds.

use rayon::prelude::*;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed};

use crate::cantor::{certified_lower_bound, Mode, Params};
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::product::{error_bound, measure_enclosure, raw_hat_count, tail_bound};
use crate::rational::{format_rat, rat_pow, Rat};

/// Measure of the doubly-truncated structure with both truncations set to
/// `n` (rank and rescaling depth alike). Nondecreasing in `n`.
pub fn phi_n(p: &Params, n: u32, budget: &Budget) -> Result<Rat> {
    Ok(measure_enclosure(p, n, n, budget)?.lower)
}

/// One evaluated grid point. `met_target` records whether the requested
/// enclosure width was actually achieved or the point is best-effort under
/// the budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvePoint {
    pub lambda: Rat,
    pub lower: Rat,
    pub upper: Rat,
    pub rank_k: u32,
    pub depth_n: u32,
    pub certified: bool,
    pub met_target: bool,
}

/// Hard ceilings for the truncation search; reached only for absurd target
/// errors, where the budget clamp takes over anyway.
const MAX_RANK: u32 = 512;
const MAX_DEPTH: u32 = 512;

/// Smallest (k, N) predicted to achieve `target_err`, splitting the error
/// budget evenly between the rank term and the rescaling tail.
fn invert_error_targets(p: &Params, target_err: &Rat) -> (u32, u32) {
    let half = target_err / Rat::from_integer(2.into());
    let mut n = 0u32;
    while n < MAX_DEPTH && tail_bound(p, n) > half {
        n += 1;
    }
    // error_bound(k)·Σλⁿ ≤ error_bound(k)/(1−λ): invert against the safe side
    let geom_all = Rat::one() / (Rat::one() - p.lambda());
    let mut k = 0u32;
    while k < MAX_RANK && error_bound(p, k) * &geom_all > half {
        k += 1;
    }
    (k, n)
}

/// Smallest (rank, depth) predicted to achieve `target_err`, with the rank
/// clamped down so its enumeration stays inside `budget`. Best effort: the
/// clamped rank may not reach the target.
pub fn resolve_truncation(p: &Params, target_err: &Rat, budget: &Budget) -> Result<(u32, u32)> {
    if !target_err.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "target error {} must be positive",
            format_rat(target_err)
        )));
    }
    let (mut k, n) = invert_error_targets(p, target_err);
    while k > 0 && raw_hat_count(p.m(), k) > budget.max_product_intervals as u128 {
        k -= 1;
    }
    Ok((k, n))
}

fn curve_point(
    m: u32,
    lambda: &Rat,
    target_err: &Rat,
    budget: &Budget,
) -> Result<CurvePoint> {
    let p = Params::new(m, lambda.clone(), Mode::Certified)?;
    let (mut k, n) = resolve_truncation(&p, target_err, budget)?;
    loop {
        match measure_enclosure(&p, k, n, budget) {
            Ok(enc) => {
                let met_target = enc.width() <= *target_err;
                return Ok(CurvePoint {
                    lambda: lambda.clone(),
                    lower: enc.lower,
                    upper: enc.upper,
                    rank_k: k,
                    depth_n: n,
                    certified: enc.certified,
                    met_target,
                });
            }
            // Per-point budget pressure is expected near the right end of the
            // grid: back the rank off and emit best-effort rather than fail.
            Err(Error::ResourceBudgetExceeded(_)) if k > 0 => k -= 1,
            Err(e) => return Err(e),
        }
    }
}

/// Evaluates certified enclosures over a ratio grid. Each point selects its
/// own truncation from `target_err`, falling back to the best affordable
/// rank under `budget` (flagged via `met_target`). Points are independent
/// and evaluated in parallel; output order follows the grid.
pub fn curve(m: u32, grid: &[Rat], target_err: &Rat, budget: &Budget) -> Result<Vec<CurvePoint>> {
    if !target_err.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "target error {} must be positive",
            format_rat(target_err)
        )));
    }
    let top = Rat::new(BigInt::one(), BigInt::from(m));
    for l in grid {
        if l < &certified_lower_bound(m) || l >= &top {
            return Err(Error::GridOutOfRange {
                m,
                lambda: format_rat(l),
            });
        }
    }
    grid.par_iter()
        .map(|l| curve_point(m, l, target_err, budget))
        .collect()
}

/// The standard 64-point grid for the binary system: equally spaced exact
/// rationals from 1/3 to 63/128 inclusive (step 61/24192), keeping a margin
/// below the right end of the valid range.
pub fn default_grid_m2() -> Vec<Rat> {
    grid_linspace(&Rat::new(BigInt::one(), 3.into()), &Rat::new(63.into(), 128.into()), 64)
        .expect("constants are well-formed")
}

/// `steps` equally spaced rationals from `start` to `end` inclusive
/// (`steps = 1` degenerates to `[start]`, requiring `start = end`).
pub fn grid_linspace(start: &Rat, end: &Rat, steps: u32) -> Result<Vec<Rat>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("grid needs at least one point".into()));
    }
    if start > end {
        return Err(Error::InvalidArgument(format!(
            "grid start {} exceeds end {}",
            format_rat(start),
            format_rat(end)
        )));
    }
    if steps == 1 {
        if start != end {
            return Err(Error::InvalidArgument(
                "single-point grid requires start = end".into(),
            ));
        }
        return Ok(vec![start.clone()]);
    }
    let span = end - start;
    let denom = Rat::from_integer(BigInt::from(steps - 1));
    Ok((0..steps)
        .map(|j| start + &span * Rat::from_integer(BigInt::from(j)) / &denom)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub is_consistent_with_increasing: bool,
    /// Index pairs (i, j), i < j, whose enclosures are disjoint in reversed
    /// order — a certified decrease. Overlapping enclosures never witness
    /// anything either way.
    pub violating_pairs: Vec<(usize, usize)>,
}

/// Scans all point pairs for certified decreases. This reports evidence
/// about monotonicity; it cannot confirm it, only fail to refute it.
pub fn monotonicity_report(points: &[CurvePoint]) -> Result<MonotonicityReport> {
    if points.windows(2).any(|w| w[0].lambda >= w[1].lambda) {
        return Err(Error::UnsortedInput);
    }
    let mut violating_pairs = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if points[i].lower > points[j].upper {
                violating_pairs.push((i, j));
            }
        }
    }
    Ok(MonotonicityReport {
        is_consistent_with_increasing: violating_pairs.is_empty(),
        violating_pairs,
    })
}

/// Uniform bound on the distance between the depth-`n` truncated value and
/// the limit measure, valid for every ratio up to `1/m − alpha`:
/// `m^{−n−1}/(1−λ) + 3(1−mα)^{n+1}/((1−λ)(1−mλ))`.
pub fn uniform_bound(p: &Params, n: u32, alpha: &Rat) -> Result<Rat> {
    let top = Rat::new(BigInt::one(), BigInt::from(p.m()));
    if !alpha.is_positive() || p.lambda() > &(top - alpha) {
        return Err(Error::AlphaOutOfRange(format_rat(alpha)));
    }
    let one_minus_lambda = Rat::one() - p.lambda();
    let m_big = BigInt::from(p.m());
    let first = Rat::new(BigInt::one(), m_big.clone().pow(n + 1)) / &one_minus_lambda;
    let ml = Rat::from_integer(m_big.clone()) * p.lambda();
    let shrink = Rat::one() - Rat::from_integer(m_big) * alpha;
    debug_assert!(shrink.is_positive());
    let second = Rat::from_integer(3.into()) * rat_pow(&shrink, n + 1)
        / (&one_minus_lambda * (Rat::one() - ml));
    Ok(first + second)
}
