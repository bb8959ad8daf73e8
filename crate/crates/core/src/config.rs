//! Resource budgets for the expensive enumeration paths.
//!
//! Exact arithmetic makes runaway parameter choices expensive in memory
//! rather than merely slow, so every operation that materializes interval
//! lists checks a budget up front and refuses early instead of thrashing.

/// Caps applied to materializing operations. Streaming/folding paths that
/// hold only O(1) state ignore `max_product_intervals`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    /// Upper bound on raw product-structure intervals a single operation may
    /// enumerate into memory.
    pub max_product_intervals: u64,
    /// Upper bound on point pairs the brute-force check may multiply.
    pub max_oracle_pairs: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_product_intervals: 50_000_000,
            max_oracle_pairs: 4_000_000,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            max_product_intervals: u64::MAX,
            max_oracle_pairs: u64::MAX,
        }
    }
}
