//! Canonical interval-union machinery. Everything downstream that says
//! "measure of a union" funnels through here.
//!
//! The canonical form is: sorted by left endpoint, pairwise disjoint,
//! touching intervals merged, zero-length inputs dropped (counted).
//! Large inputs are not sorted wholesale: they are split into chunks,
//! each chunk sorted, and the sorted chunks merged with a k-way heap.
//! The same k-way driver also consumes pre-sorted generator streams, which
//! is how the product-structure pipeline avoids materializing its raw
//! interval lists.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::{self, Write};

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{decimal_sig, floor_log10, format_rat, Rat, RatInterval, Round};

/// Merge streams of `(lo, hi)` pairs, each already sorted by `(lo, hi)`,
/// into canonical components, invoking `emit` once per component.
/// Returns the number of degenerate (zero-length) inputs dropped.
pub(crate) fn kway_union<T, I, F>(streams: Vec<I>, mut emit: F) -> u64
where
    T: Ord,
    I: Iterator<Item = (T, T)>,
    F: FnMut(T, T),
{
    let mut streams = streams;
    let mut heap: BinaryHeap<Reverse<(T, T, usize)>> = BinaryHeap::with_capacity(streams.len());
    for (i, s) in streams.iter_mut().enumerate() {
        if let Some((lo, hi)) = s.next() {
            heap.push(Reverse((lo, hi, i)));
        }
    }
    let mut dropped = 0u64;
    let mut cur: Option<(T, T)> = None;
    while let Some(Reverse((lo, hi, i))) = heap.pop() {
        if let Some((nlo, nhi)) = streams[i].next() {
            debug_assert!(nlo >= lo, "stream {i} not sorted");
            heap.push(Reverse((nlo, nhi, i)));
        }
        if lo == hi {
            dropped += 1;
            continue;
        }
        match cur.take() {
            None => cur = Some((lo, hi)),
            Some((clo, chi)) => {
                if lo <= chi {
                    cur = Some((clo, if hi > chi { hi } else { chi }));
                } else {
                    emit(clo, chi);
                    cur = Some((lo, hi));
                }
            }
        }
    }
    if let Some((clo, chi)) = cur {
        emit(clo, chi);
    }
    dropped
}

/// Chunk size for the sort stage of [`union_merge`]. Bounds peak comparison
/// cost per chunk; chunks are then heap-merged.
const SORT_CHUNK: usize = 1 << 20;

/// Merge an arbitrary collection of intervals into canonical form.
/// Input order is irrelevant; overlapping and touching intervals coalesce.
pub fn union_merge(items: Vec<RatInterval>) -> IntervalSet {
    let data: Vec<(Rat, Rat)> = items.into_iter().map(RatInterval::into_parts).collect();
    let mut chunks: Vec<Vec<(Rat, Rat)>> = if data.len() <= SORT_CHUNK {
        vec![data]
    } else {
        data.chunks(SORT_CHUNK).map(<[_]>::to_vec).collect()
    };
    chunks.par_iter_mut().for_each(|c| c.sort_unstable());
    let streams: Vec<_> = chunks.into_iter().map(Vec::into_iter).collect();
    let mut out = Vec::new();
    let dropped = kway_union(streams, |lo, hi| out.push(RatInterval::new(lo, hi)));
    IntervalSet {
        intervals: out,
        degenerate_dropped: dropped,
    }
}

/// A finite union of intervals in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSet {
    intervals: Vec<RatInterval>,
    degenerate_dropped: u64,
}

impl IntervalSet {
    pub fn empty() -> IntervalSet {
        IntervalSet {
            intervals: Vec::new(),
            degenerate_dropped: 0,
        }
    }

    /// Wraps components that are already canonical (ascending, disjoint,
    /// non-touching, positive length). Checked in debug builds.
    pub(crate) fn from_canonical(intervals: Vec<RatInterval>, degenerate_dropped: u64) -> Self {
        let set = IntervalSet {
            intervals,
            degenerate_dropped,
        };
        debug_assert!(set.is_canonical());
        set
    }

    fn is_canonical(&self) -> bool {
        self.intervals.iter().all(|iv| !iv.is_degenerate())
            && self
                .intervals
                .windows(2)
                .all(|w| w[0].hi() < w[1].lo())
    }

    pub fn intervals(&self) -> &[RatInterval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Zero-length inputs discarded on the way into canonical form.
    pub fn degenerate_dropped(&self) -> u64 {
        self.degenerate_dropped
    }

    pub fn min(&self) -> Option<&Rat> {
        self.intervals.first().map(RatInterval::lo)
    }

    pub fn max(&self) -> Option<&Rat> {
        self.intervals.last().map(RatInterval::hi)
    }

    /// Total Lebesgue measure: the sum of component lengths.
    pub fn total_length(&self) -> Rat {
        let mut acc = Rat::zero();
        for iv in &self.intervals {
            acc += iv.length();
        }
        acc
    }

    pub fn contains_point(&self, x: &Rat) -> bool {
        let idx = self.intervals.partition_point(|iv| iv.hi() < x);
        self.intervals.get(idx).is_some_and(|iv| iv.contains(x))
    }

    /// Pointwise scaling by a positive factor; preserves canonical form.
    pub fn scale(&self, factor: &Rat) -> Result<IntervalSet> {
        if !(factor > &Rat::zero()) {
            return Err(Error::NonpositiveFactor(format_rat(factor)));
        }
        let intervals = self
            .intervals
            .iter()
            .map(|iv| RatInterval::new(iv.lo() * factor, iv.hi() * factor))
            .collect();
        Ok(IntervalSet {
            intervals,
            degenerate_dropped: self.degenerate_dropped,
        })
    }

    pub fn components_report(&self, max_listed: usize) -> ComponentsReport {
        let take = max_listed.min(self.intervals.len());
        let first = self.intervals[..take].to_vec();
        let last = self.intervals[self.intervals.len() - take..].to_vec();
        let mut histogram: Vec<(i64, u64)> = Vec::new();
        for iv in &self.intervals {
            let bucket = floor_log10(&iv.length());
            match histogram.binary_search_by_key(&bucket, |&(b, _)| b) {
                Ok(i) => histogram[i].1 += 1,
                Err(i) => histogram.insert(i, (bucket, 1)),
            }
        }
        ComponentsReport {
            count: self.intervals.len() as u64,
            total_length: self.total_length(),
            degenerate_dropped: self.degenerate_dropped,
            first,
            last,
            length_histogram: histogram,
        }
    }

    /// CSV rows `lo_decimal,hi_decimal,inexact` at 17 significant digits
    /// (round-to-nearest); `inexact` warns that digits were discarded.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "lo_decimal,hi_decimal,inexact")?;
        for iv in &self.intervals {
            let (lo, lo_exact) = decimal_sig(iv.lo(), 17, Round::Nearest);
            let (hi, hi_exact) = decimal_sig(iv.hi(), 17, Round::Nearest);
            writeln!(w, "{lo},{hi},{}", !(lo_exact && hi_exact))?;
        }
        Ok(())
    }
}

/// Structural summary of a canonical set: component count, measure, the
/// outermost components, and a histogram of component lengths bucketed by
/// decimal magnitude (bucket b counts lengths in [10^b, 10^(b+1))).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentsReport {
    pub count: u64,
    pub total_length: Rat,
    pub degenerate_dropped: u64,
    pub first: Vec<RatInterval>,
    pub last: Vec<RatInterval>,
    pub length_histogram: Vec<(i64, u64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rq;
    use proptest::prelude::*;

    fn iv(a: (i64, i64), b: (i64, i64)) -> RatInterval {
        RatInterval::new(rq(a.0, a.1), rq(b.0, b.1))
    }

    #[test]
    fn merge_overlap_touch_degenerate() {
        let set = union_merge(vec![
            iv((2, 3), (1, 1)),
            iv((0, 1), (1, 3)),
            iv((1, 4), (1, 2)),
            iv((1, 2), (1, 2)),
        ]);
        assert_eq!(set.intervals(), &[iv((0, 1), (1, 2)), iv((2, 3), (1, 1))]);
        assert_eq!(set.degenerate_dropped(), 1);
        assert_eq!(set.total_length(), rq(5, 6));

        // touching intervals coalesce
        let set = union_merge(vec![iv((0, 1), (1, 2)), iv((1, 2), (3, 4))]);
        assert_eq!(set.intervals(), &[iv((0, 1), (3, 4))]);
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn empty_and_all_degenerate() {
        assert!(union_merge(vec![]).is_empty());
        let set = union_merge(vec![iv((1, 3), (1, 3)), iv((1, 2), (1, 2))]);
        assert!(set.is_empty());
        assert_eq!(set.degenerate_dropped(), 2);
        assert_eq!(set.total_length(), rq(0, 1));
    }

    #[test]
    fn scaling() {
        let set = union_merge(vec![iv((1, 3), (1, 2)), iv((2, 3), (1, 1))]);
        let scaled = set.scale(&rq(1, 3)).unwrap();
        assert_eq!(scaled.intervals(), &[iv((1, 9), (1, 6)), iv((2, 9), (1, 3))]);
        assert_eq!(scaled.total_length(), set.total_length() * rq(1, 3));
        assert!(matches!(set.scale(&rq(0, 1)), Err(Error::NonpositiveFactor(_))));
        assert!(matches!(set.scale(&rq(-2, 1)), Err(Error::NonpositiveFactor(_))));
    }

    #[test]
    fn point_queries() {
        let set = union_merge(vec![iv((0, 1), (1, 3)), iv((2, 3), (1, 1))]);
        assert!(set.contains_point(&rq(0, 1)));
        assert!(set.contains_point(&rq(1, 3)));
        assert!(set.contains_point(&rq(2, 3)));
        assert!(!set.contains_point(&rq(1, 2)));
        assert!(!set.contains_point(&rq(5, 4)));
    }

    #[test]
    fn report_shape() {
        let set = union_merge(vec![
            iv((0, 1), (1, 100)),
            iv((1, 2), (1, 2)),
            iv((3, 4), (7, 8)),
        ]);
        let rep = set.components_report(1);
        assert_eq!(rep.count, 2);
        assert_eq!(rep.degenerate_dropped, 1);
        assert_eq!(rep.first, vec![iv((0, 1), (1, 100))]);
        assert_eq!(rep.last, vec![iv((3, 4), (7, 8))]);
        // lengths 1/100 and 1/8 land in buckets -2 and -1
        assert_eq!(rep.length_histogram, vec![(-2, 1), (-1, 1)]);
        assert_eq!(rep.total_length, rq(1, 100) + rq(1, 8));
    }

    #[test]
    fn csv_output() {
        let set = union_merge(vec![iv((1, 4), (1, 3))]);
        let mut buf = Vec::new();
        set.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "lo_decimal,hi_decimal,inexact\n0.25000000000000000,0.33333333333333333,true\n"
        );
    }

    fn rat_strategy() -> impl Strategy<Value = Rat> {
        (-48i64..48, 1i64..12).prop_map(|(n, d)| rq(n, d))
    }

    fn interval_strategy() -> impl Strategy<Value = RatInterval> {
        (rat_strategy(), rat_strategy()).prop_map(|(a, b)| {
            if a <= b {
                RatInterval::new(a, b)
            } else {
                RatInterval::new(b, a)
            }
        })
    }

    proptest! {
        #[test]
        fn canonical_and_order_independent(items in prop::collection::vec(interval_strategy(), 0..40)) {
            let forward = union_merge(items.clone());
            // canonical: sorted, disjoint, non-touching, positive lengths
            for w in forward.intervals().windows(2) {
                prop_assert!(w[0].hi() < w[1].lo());
            }
            for c in forward.intervals() {
                prop_assert!(!c.is_degenerate());
            }
            let mut rev = items.clone();
            rev.reverse();
            prop_assert_eq!(&forward, &union_merge(rev));
            // idempotent
            let again = union_merge(forward.intervals().to_vec());
            prop_assert_eq!(forward.intervals(), again.intervals());
        }

        #[test]
        fn measure_is_subadditive_and_covers_inputs(items in prop::collection::vec(interval_strategy(), 0..40)) {
            let set = union_merge(items.clone());
            let raw_sum: Rat = items.iter().map(RatInterval::length).sum();
            prop_assert!(set.total_length() <= raw_sum);
            // every nondegenerate input lies inside a single component
            for it in &items {
                if !it.is_degenerate() {
                    let hit = set.intervals().iter().any(|c| c.lo() <= it.lo() && it.hi() <= c.hi());
                    prop_assert!(hit);
                }
            }
        }

        #[test]
        fn scale_multiplies_measure(items in prop::collection::vec(interval_strategy(), 0..20),
                                    f in (1i64..20, 1i64..20)) {
            let factor = rq(f.0, f.1);
            let set = union_merge(items);
            let scaled = set.scale(&factor).unwrap();
            prop_assert_eq!(scaled.total_length(), set.total_length() * &factor);
            prop_assert_eq!(scaled.len(), set.len());
        }
    }
}
