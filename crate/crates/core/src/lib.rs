//! Certified computation of products of uniform middle-gap Cantor sets.
//!
//! The library builds the finite-rank interval structure of the product set
//! `K·K` exactly over the rationals, computes two-sided enclosures of its
//! Lebesgue measure with certified error bounds, and cross-checks the fast
//! path against an independent brute-force oracle.

pub mod cantor;
pub mod config;
pub mod error;
pub mod oracle;
pub mod phi;
pub mod product;
pub mod rational;
pub mod sweep;

pub use cantor::{
    admissible_count_at_rank, basic_interval, certified_lower_bound, children,
    enumerate_admissible, in_certified_range, membership, Membership, Mode, Params, Word,
};
pub use config::Budget;
pub use error::{Error, Result};
pub use oracle::{
    brute_outer_measure, endpoint_product_check, level_count, level_intervals, refinement_cover,
    sandwich_check, EndpointProductReport, RefinementLevel, SandwichReport,
};
pub use phi::{
    curve, default_grid_m2, grid_linspace, monotonicity_report, phi_n, resolve_truncation,
    uniform_bound, CurvePoint, MonotonicityReport,
};
pub use product::{
    error_bound, error_bound_refined, full_product_approx, hat_intervals, measure_enclosure,
    measure_enclosure_with, rank_truncated_core, near_half_coverage_check, square_membership, tail_bound,
    verify_chain_conditions, ChainConditionReport, CoverageCheck, EnclosureOptions,
    MeasureEnclosure,
};
pub use rational::{decimal_sig, format_rat, parse_rat, rq, Rat, RatInterval, Round};
pub use sweep::{union_merge, ComponentsReport, IntervalSet};
