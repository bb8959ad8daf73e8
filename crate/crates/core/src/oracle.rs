//! Brute-force cross-checks, deliberately built on a different route than
//! the streaming structure code: plain rational arithmetic over explicitly
//! materialized interval lists, canonicalized by the sort-based
//! [`union_merge`]. Agreement between the two routes is the main internal
//! consistency evidence.

use crate::cantor::{basic_interval, enumerate_admissible, Params};
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::product::{measure_enclosure, rank_truncated_core};
use crate::rational::{Rat, RatInterval};
use crate::sweep::{union_merge, IntervalSet};

/// All `m^n` depth-`n` branch intervals, as a canonical set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementLevel {
    pub level: u32,
    pub cover: IntervalSet,
}

pub fn level_count(m: u32, n: u32) -> u128 {
    (m as u128).checked_pow(n).unwrap_or(u128::MAX)
}

pub fn level_intervals(p: &Params, n: u32) -> Vec<RatInterval> {
    // Left endpoints by repeated branching: a ↦ a + i·δ·λʲ.
    let mut los = vec![Rat::from_integer(0.into())];
    for j in 0..n {
        let offsets: Vec<Rat> = (0..p.m())
            .map(|i| Rat::from_integer(i.into()) * p.step() * p.lambda_pow(j))
            .collect();
        let mut next = Vec::with_capacity(los.len() * p.m() as usize);
        for a in &los {
            for off in &offsets {
                next.push(a + off);
            }
        }
        los = next;
    }
    let len = p.lambda_pow(n);
    los.into_iter()
        .map(|lo| {
            let hi = &lo + &len;
            RatInterval::new(lo, hi)
        })
        .collect()
}

/// The depth-`n` cover of the base set itself (every branch, including the
/// first): a nested sequence of outer approximations.
pub fn refinement_cover(p: &Params, n: u32, budget: &Budget) -> Result<RefinementLevel> {
    let count = level_count(p.m(), n);
    if count > budget.max_oracle_pairs as u128 {
        return Err(Error::ResourceBudgetExceeded(format!(
            "depth-{n} cover has {count} intervals; budget allows {}",
            budget.max_oracle_pairs
        )));
    }
    Ok(RefinementLevel {
        level: n,
        cover: union_merge(level_intervals(p, n)),
    })
}

/// Measure of the union of all pairwise products of depth-`n` branch
/// intervals — an upper bound on the product set's measure, nonincreasing
/// in `n`. Unordered pairs (including squares) suffice since multiplication
/// is commutative.
pub fn brute_outer_measure(p: &Params, n: u32, budget: &Budget) -> Result<Rat> {
    let count = level_count(p.m(), n);
    let pairs = count
        .checked_mul(count + 1)
        .map(|x| x / 2)
        .unwrap_or(u128::MAX);
    if pairs > budget.max_oracle_pairs as u128 {
        return Err(Error::ResourceBudgetExceeded(format!(
            "depth-{n} outer cover multiplies {pairs} interval pairs; budget allows {}",
            budget.max_oracle_pairs
        )));
    }
    let base = level_intervals(p, n);
    let mut products = Vec::with_capacity(pairs as usize);
    for (i, a) in base.iter().enumerate() {
        for b in &base[i..] {
            products.push(RatInterval::new(a.lo() * b.lo(), a.hi() * b.hi()));
        }
    }
    Ok(union_merge(products).total_length())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SandwichReport {
    pub lower: Rat,
    pub outer: Rat,
    pub ok: bool,
}

/// The structural lower bound must sit below the brute-force outer bound;
/// the true measure lies between them. A failure here is an implementation
/// bug by construction.
pub fn sandwich_check(
    p: &Params,
    n: u32,
    k: u32,
    n_scales: u32,
    budget: &Budget,
) -> Result<SandwichReport> {
    let lower = measure_enclosure(p, k, n_scales, budget)?.lower;
    let outer = brute_outer_measure(p, n, budget)?;
    let ok = lower <= outer;
    Ok(SandwichReport { lower, outer, ok })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointProductReport {
    pub pairs_tested: u64,
    pub all_absorbed: bool,
    pub witnesses_of_failure: Vec<(Rat, Rat)>,
}

const MAX_WITNESSES: usize = 16;

/// Exhaustively multiplies distinct endpoints of the depth-`level` branch
/// intervals lying in the upper part (first digit ≥ 1) and verifies each
/// product lands inside the rank-`k` core. Equal factors are excluded: the
/// squares are exactly the points the interval structure does not claim.
pub fn endpoint_product_check(
    p: &Params,
    level: u32,
    k: u32,
    budget: &Budget,
) -> Result<EndpointProductReport> {
    if k < level {
        return Err(Error::InvalidArgument(format!(
            "endpoint depth {level} exceeds core rank {k}"
        )));
    }
    let mut points: Vec<Rat> = Vec::new();
    for w in enumerate_admissible(p, level) {
        if w.rank() == level && !w.is_empty() {
            let iv = basic_interval(p, &w)?;
            let (lo, hi) = iv.into_parts();
            points.push(lo);
            points.push(hi);
        }
    }
    let v = points.len() as u128;
    let pairs = v * v.saturating_sub(1) / 2;
    if pairs > budget.max_oracle_pairs as u128 {
        return Err(Error::ResourceBudgetExceeded(format!(
            "depth-{level} endpoint check needs {pairs} products; budget allows {}",
            budget.max_oracle_pairs
        )));
    }
    let core = rank_truncated_core(p, k, budget)?;
    let mut witnesses = Vec::new();
    let mut tested = 0u64;
    for (i, x) in points.iter().enumerate() {
        for y in &points[i + 1..] {
            debug_assert!(x != y, "distinct branch intervals share no endpoints");
            tested += 1;
            let z = x * y;
            if !core.contains_point(&z) && witnesses.len() < MAX_WITNESSES {
                witnesses.push((x.clone(), y.clone()));
            }
        }
    }
    Ok(EndpointProductReport {
        pairs_tested: tested,
        all_absorbed: witnesses.is_empty(),
        witnesses_of_failure: witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::cantor::Mode;
    use crate::rational::rq;

    fn params(m: u32, n: i64, d: i64) -> Params {
        Params::new(m, rq(n, d), Mode::Certified).unwrap()
    }

    #[test]
    fn outer_cover_known_values() {
        let b = Budget::default();
        let p = params(2, 1, 3);
        assert_eq!(brute_outer_measure(&p, 0, &b).unwrap(), Rat::one());
        assert_eq!(brute_outer_measure(&p, 1, &b).unwrap(), rq(8, 9));
        let level2 = brute_outer_measure(&p, 2, &b).unwrap();
        assert_eq!(level2, rq(68, 81));
        assert!(level2 < rq(8, 9));
    }

    #[test]
    fn covers_nest() {
        let b = Budget::default();
        let p = params(3, 1, 4);
        let outer = refinement_cover(&p, 1, &b).unwrap();
        let inner = refinement_cover(&p, 2, &b).unwrap();
        assert_eq!(outer.cover.len(), 3);
        assert_eq!(inner.cover.len(), 9);
        for iv in inner.cover.intervals() {
            assert!(outer
                .cover
                .intervals()
                .iter()
                .any(|o| o.lo() <= iv.lo() && iv.hi() <= o.hi()));
        }
    }

    #[test]
    fn sandwich_small() {
        let b = Budget::default();
        let p = params(2, 1, 3);
        let r = sandwich_check(&p, 0, 0, 0, &b).unwrap();
        assert_eq!(r.lower, rq(0, 1));
        assert_eq!(r.outer, Rat::one());
        assert!(r.ok);

        let r = sandwich_check(&p, 1, 2, 1, &b).unwrap();
        assert_eq!(r.lower, rq(25, 81) * rq(4, 3));
        assert_eq!(r.outer, rq(8, 9));
        assert!(r.ok);
    }

    #[test]
    fn endpoint_products_absorbed() {
        let b = Budget::default();
        // two admissible depth-2 words ("10", "11") → 4 endpoints → 6 pairs
        let r = endpoint_product_check(&params(2, 1, 3), 2, 2, &b).unwrap();
        assert_eq!(r.pairs_tested, 6);
        assert!(r.all_absorbed);

        let r = endpoint_product_check(&params(3, 1, 4), 2, 3, &b).unwrap();
        assert_eq!(r.pairs_tested, 12 * 11 / 2); // 6 words → 12 endpoints
        assert!(r.all_absorbed);
    }

    #[test]
    fn level_or_budget_violations() {
        let b = Budget::default();
        assert!(matches!(
            endpoint_product_check(&params(2, 1, 3), 3, 2, &b),
            Err(Error::InvalidArgument(_))
        ));
        let tiny = Budget {
            max_product_intervals: 1_000,
            max_oracle_pairs: 3,
        };
        assert!(matches!(
            brute_outer_measure(&params(2, 1, 3), 4, &tiny),
            Err(Error::ResourceBudgetExceeded(_))
        ));
    }
}
