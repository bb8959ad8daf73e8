//! Cross-route consistency: the streaming integer pipeline, the plain
//! rational route, and the brute-force oracle must tell the same story on
//! every path through the dispatch (small/huge denominators, disjoint and
//! interacting rescaled copies).

use proptest::prelude::*;

use cantorprod_core::{
    brute_outer_measure, enumerate_admissible, full_product_approx, grid_linspace, hat_intervals,
    measure_enclosure, phi_n, rank_truncated_core, rq, uniform_bound, union_merge, Budget,
    IntervalSet, Mode, Params, Rat, RatInterval,
};

fn params(m: u32, lambda: Rat) -> Params {
    Params::new(m, lambda, Mode::Certified).unwrap()
}

/// Deliberately naive reference: enumerate every pair-product interval as a
/// rational, scale each copy, and canonicalize in one sort-based pass.
fn rational_route(p: &Params, k: u32, n_scales: u32) -> IntervalSet {
    let mut all: Vec<RatInterval> = Vec::new();
    for w in enumerate_admissible(p, k) {
        for iv in hat_intervals(p, &w).unwrap() {
            for n in 0..=n_scales {
                let f = p.lambda_pow(n);
                all.push(RatInterval::new(iv.lo() * &f, iv.hi() * &f));
            }
        }
    }
    union_merge(all)
}

#[test]
fn huge_denominator_interacting_copies_match_reference() {
    // 24^9-scale endpoint denominators push the common-denominator route
    // beyond machine words; copies overlap at this ratio.
    let p = params(3, rq(7, 24));
    let b = Budget::default();
    let reference = rational_route(&p, 8, 12);
    let enc = measure_enclosure(&p, 8, 12, &b).unwrap();
    assert_eq!(enc.lower, reference.total_length());
    let (set, enc2) = full_product_approx(&p, 8, 12, &b).unwrap();
    assert_eq!(enc2, enc);
    assert_eq!(set.intervals(), reference.intervals());
}

#[test]
fn huge_denominator_disjoint_copies_match_reference() {
    // Same scale of denominators, but the rescaled copies stay pairwise
    // disjoint, exercising the other dispatch arm.
    let p = params(2, rq(163, 486));
    let b = Budget::default();
    let reference = rational_route(&p, 12, 6);
    let enc = measure_enclosure(&p, 12, 6, &b).unwrap();
    assert_eq!(enc.lower, reference.total_length());
    let (set, enc2) = full_product_approx(&p, 12, 6, &b).unwrap();
    assert_eq!(enc2, enc);
    assert_eq!(set.intervals(), reference.intervals());
}

#[test]
fn materialized_and_streamed_enclosures_agree() {
    let b = Budget::default();
    for (m, l, k, n) in [
        (2, rq(1, 3), 8, 3),
        (2, rq(9, 20), 6, 4),
        (3, rq(1, 4), 5, 5),
        (3, rq(7, 24), 5, 2),
    ] {
        let p = params(m, l);
        let (set, enc_full) = full_product_approx(&p, k, n, &b).unwrap();
        let enc = measure_enclosure(&p, k, n, &b).unwrap();
        assert_eq!(enc_full, enc);
        assert_eq!(set.total_length(), enc.lower);
    }
}

#[test]
fn truncated_value_sits_under_richer_enclosures_within_uniform_bound() {
    let b = Budget::default();
    let p = params(2, rq(1, 3));
    let n = 4;
    let phi = phi_n(&p, n, &b).unwrap();
    let rich = measure_enclosure(&p, 16, 16, &b).unwrap();
    assert!(phi <= rich.lower);
    let alpha = rq(1, 6); // the largest margin this ratio admits
    let bound = uniform_bound(&p, n, &alpha).unwrap();
    assert!(&rich.lower - &phi <= bound);
}

#[test]
fn adjacent_ratio_enclosures_show_no_certified_jump() {
    let b = Budget::default();
    let grid = grid_linspace(&rq(1, 3), &rq(9, 20), 8).unwrap();
    let alpha = rq(1, 20);
    let n = 6;
    let encs: Vec<_> = grid
        .iter()
        .map(|l| measure_enclosure(&params(2, l.clone()), 12, 12, &b).unwrap())
        .collect();
    for (l, pair) in grid.windows(2).zip(encs.windows(2)) {
        let (a, c) = (&pair[0], &pair[1]);
        let gap = if a.upper < c.lower {
            &c.lower - &a.upper
        } else if c.upper < a.lower {
            &a.lower - &c.upper
        } else {
            Rat::from_integer(0.into())
        };
        let allowance = uniform_bound(&params(2, l[0].clone()), n, &alpha).unwrap()
            + uniform_bound(&params(2, l[1].clone()), n, &alpha).unwrap()
            + a.width()
            + c.width();
        assert!(gap <= allowance);
    }
}

/// Ratio grid inside the certified range for a given m, indexed 0..64.
fn lambda_at(m: u32, i: u32) -> Rat {
    let lo = Rat::new(1.into(), (m + 1).into());
    let span = Rat::new(1.into(), (m * (m + 1)).into()); // 1/m − 1/(m+1)
    lo + span * rq(i as i64, 64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn merged_pair_products_fit_rank_budget(
        m in 2u32..=4,
        i in 0u32..64,
        first in 1u8..=3,
        rest in proptest::collection::vec(0u8..4, 0..4),
    ) {
        let p = params(m, lambda_at(m, i));
        let mut digits = vec![first.min(m as u8 - 1)];
        digits.extend(rest.iter().map(|d| d % m as u8));
        let w = cantorprod_core::Word::from_digits(digits);
        let merged = union_merge(hat_intervals(&p, &w).unwrap());
        let budget = rq(3, 1) * p.lambda_pow(w.rank());
        prop_assert!(merged.total_length() <= budget);
    }

    #[test]
    fn core_grows_with_rank(m in 2u32..=3, i in 0u32..64, k in 0u32..=4) {
        let p = params(m, lambda_at(m, i));
        let b = Budget::default();
        let small = rank_truncated_core(&p, k, &b).unwrap();
        let big = rank_truncated_core(&p, k + 1, &b).unwrap();
        prop_assert!(small.total_length() <= big.total_length());
        for iv in small.intervals() {
            prop_assert!(big.contains_point(iv.lo()));
            prop_assert!(big.contains_point(iv.hi()));
        }
    }

    #[test]
    fn structural_lower_bound_stays_under_brute_outer_cover(
        m in 2u32..=3,
        i in 0u32..64,
    ) {
        let p = params(m, lambda_at(m, i));
        let b = Budget::default();
        let lower = measure_enclosure(&p, 4, 4, &b).unwrap().lower;
        let outer = brute_outer_measure(&p, 2, &b).unwrap();
        prop_assert!(lower <= outer);
    }
}
