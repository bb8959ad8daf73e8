//! The product-set structure: pair-product intervals, their rank-truncated
//! union (the "core"), geometric rescalings of that core, and certified
//! two-sided Lebesgue-measure enclosures.
//!
//! For a branch word `w` and two distinct child indices `a < b`, the product
//! of the two child intervals is again an interval,
//! `[lo_a·lo_b, hi_a·hi_b]` — a *pair-product interval*. The rank-`k` core
//! is the union of these over all admissible words of rank ≤ `k` (top-level
//! pairs must avoid the first branch). The full structure is the union of
//! `λⁿ`-rescalings of the core, and its total length is a lower bound for
//! the measure of the product set; `error_bound` and `tail_bound` supply the
//! matching certified upper bound.
//!
//! Performance shape: the number of raw pair-product intervals grows like
//! `mᵏ`, so nothing here builds a big `Vec<Rat>` and sorts it. Within one
//! (rank, child-pair) slice the intervals are already produced in increasing
//! order, so the canonical union falls out of a k-way heap merge over a few
//! hundred lazy streams, in O(heap) memory. Endpoints are integers over a
//! common power-of-`q` denominator (`λ = p/q`), carried as `u128` when they
//! fit and as `BigInt` otherwise.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cantor::{children, membership, Membership, Params, Word};
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::rational::{format_rat, rat_pow, rq, Rat, RatInterval};
use crate::sweep::{kway_union, union_merge, IntervalSet};

/// Hard cap on integer endpoint pairs held in memory during a fold pass.
/// Exceeding it silently degrades to re-enumeration (measure paths) or
/// errors (materializing paths); it exists so exact-arithmetic runs degrade
/// predictably instead of exhausting memory.
const FOLD_COMPONENT_CAP: usize = 2_000_000;

/// Hard cap on rational components returned to callers by materializing
/// operations, independent of the enumeration budget.
const MATERIALIZE_COMPONENT_CAP: u64 = 4_000_000;

// ---------------------------------------------------------------------------
// Certified bounds
// ---------------------------------------------------------------------------

/// Certified bound on the measure of the product structure missed by
/// truncating the core at rank `k`: `3(mλ)^{k+1}/(1−mλ)`.
pub fn error_bound(p: &Params, k: u32) -> Rat {
    let ml = Rat::from_integer(BigInt::from(p.m())) * p.lambda();
    rq(3, 1) * rat_pow(&ml, k + 1) / (Rat::one() - ml)
}

/// Tighter variant of [`error_bound`], smaller by a factor `(m−1)/m`.
/// Derived here rather than quoted; off by default.
pub fn error_bound_refined(p: &Params, k: u32) -> Rat {
    error_bound(p, k) * Rat::new(BigInt::from(p.m() - 1), BigInt::from(p.m()))
}

/// Bound on the total measure of all rescaled copies beyond depth
/// `n_scales`: `λ^{N+1}/(1−λ)`.
pub fn tail_bound(p: &Params, n_scales: u32) -> Rat {
    p.lambda_pow(n_scales + 1) / (Rat::one() - p.lambda())
}

/// `Σ_{i=0}^{n} λⁱ`, exactly.
pub(crate) fn geom_sum(p: &Params, n: u32) -> Rat {
    (Rat::one() - p.lambda_pow(n + 1)) / (Rat::one() - p.lambda())
}

// ---------------------------------------------------------------------------
// Pair-product intervals, one word at a time (rational reference path)
// ---------------------------------------------------------------------------

/// The pair-product intervals of a single admissible word, in child-pair
/// order. Empty words pair only children off the first branch; that is what
/// makes the rescaling decomposition non-redundant. For `m = 2` the empty
/// word therefore contributes nothing.
pub fn hat_intervals(p: &Params, w: &Word) -> Result<Vec<RatInterval>> {
    if !w.is_admissible() {
        return Err(Error::NotInFamilyA(w.to_string()));
    }
    let kids = children(p, w)?;
    let amin = if w.is_empty() { 1 } else { 0 };
    let m = p.m() as usize;
    let mut out = Vec::new();
    for a in amin..m {
        for b in (a + 1)..m {
            out.push(RatInterval::new(
                kids[a].lo() * kids[b].lo(),
                kids[a].hi() * kids[b].hi(),
            ));
        }
    }
    Ok(out)
}

/// Count of raw pair-product intervals at ranks `0..=k` (saturating).
pub(crate) fn raw_hat_count(m: u32, k: u32) -> u128 {
    let m = m as u128;
    let pairs = m * (m - 1) / 2;
    let top_pairs = (m - 1) * (m - 2) / 2;
    let mut total = top_pairs;
    let mut pow = 1u128; // m^{r−1}
    for r in 1..=k {
        if r > 1 {
            pow = pow.saturating_mul(m);
        }
        total = total.saturating_add((m - 1).saturating_mul(pow).saturating_mul(pairs));
    }
    total
}

// ---------------------------------------------------------------------------
// Integer endpoint streams
// ---------------------------------------------------------------------------

/// Integer kernel shared by the `u128` fast path and the `BigInt` fallback.
pub(crate) trait Scalar: Clone + Ord {
    fn from_big(v: &BigInt) -> Self;
    fn to_big(&self) -> BigInt;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
}

impl Scalar for u128 {
    fn from_big(v: &BigInt) -> Self {
        v.to_u128().expect("scalar width checked before dispatch")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Scalar for BigInt {
    fn from_big(v: &BigInt) -> Self {
        v.clone()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

fn fits_u128(x: &BigInt) -> bool {
    x.to_u128().is_some()
}

/// `((m−1)·q^{k+1})²` — the common denominator for rank-≤k pair products.
fn core_denom_sq(p: &Params, k: u32) -> BigInt {
    let e = BigInt::from(p.m() - 1) * p.lambda().denom().pow(k + 1);
    (&e) * (&e)
}

/// Lazily yields the pair-product intervals of one (rank, child-pair) slice
/// as integer endpoints over the shared denominator, in increasing order.
/// Words advance odometer-style (first digit stays ≥ 1), and the word's left
/// endpoint is maintained incrementally, so each interval costs O(1) big-int
/// operations.
struct HatStream<T> {
    m: u8,
    digits: Vec<u8>,
    base: T,       // current word's left endpoint, over denominator E
    da: T,         // offset of child `a`'s left endpoint
    db: T,         // offset of child `b`'s left endpoint
    cl: T,         // child interval length
    mult: T,       // post-product multiplier (rescaling copies)
    wsteps: Vec<T>, // base increment when digit j steps by one
    resets: Vec<T>, // base decrement when digit j wraps m−1 → 0
    done: bool,
}

impl<T: Scalar> Iterator for HatStream<T> {
    type Item = (T, T);

    fn next(&mut self) -> Option<(T, T)> {
        if self.done {
            return None;
        }
        let fa = self.base.add(&self.da);
        let fb = self.base.add(&self.db);
        let lo = fa.mul(&fb).mul(&self.mult);
        let hi = fa.add(&self.cl).mul(&fb.add(&self.cl)).mul(&self.mult);
        self.advance();
        Some((lo, hi))
    }
}

impl<T: Scalar> HatStream<T> {
    fn advance(&mut self) {
        for j in (0..self.digits.len()).rev() {
            if self.digits[j] + 1 < self.m {
                self.digits[j] += 1;
                self.base = self.base.add(&self.wsteps[j]);
                return;
            }
            if j == 0 {
                break; // first digit exhausted at m−1: no admissible successor
            }
            self.base = self.base.sub(&self.resets[j]);
            self.digits[j] = 0;
        }
        self.done = true;
    }
}

/// One stream per (copy multiplier, rank, child pair), every stream sorted.
fn make_streams<T: Scalar>(p: &Params, k: u32, mults: &[BigInt]) -> Vec<HatStream<T>> {
    let m = p.m();
    let pn = p.lambda().numer();
    let qd = p.lambda().denom();
    let diff = qd - pn;
    // Step of digit position j is rank-independent once scaled to the shared
    // denominator: (q−p)·pʲ·q^{k−j}.
    let wsteps_big: Vec<BigInt> = (0..k).map(|j| &diff * pn.pow(j) * qd.pow(k - j)).collect();
    let resets_big: Vec<BigInt> = wsteps_big.iter().map(|w| w * BigInt::from(m - 1)).collect();

    let mut out = Vec::new();
    for mult in mults {
        let mult_t = T::from_big(mult);
        for r in 0..=k {
            let dstep = &diff * pn.pow(r) * qd.pow(k - r);
            let clen = BigInt::from(m - 1) * pn.pow(r + 1) * qd.pow(k - r);
            let cl = T::from_big(&clen);
            let wsteps: Vec<T> = wsteps_big[..r as usize].iter().map(T::from_big).collect();
            let resets: Vec<T> = resets_big[..r as usize].iter().map(T::from_big).collect();
            let (digits, base) = if r == 0 {
                (Vec::new(), T::from_big(&BigInt::zero()))
            } else {
                let mut d = vec![0u8; r as usize];
                d[0] = 1;
                (d, T::from_big(&wsteps_big[0]))
            };
            let amin = if r == 0 { 1 } else { 0 };
            for a in amin..m {
                for b in (a + 1)..m {
                    out.push(HatStream {
                        m: m as u8,
                        digits: digits.clone(),
                        base: base.clone(),
                        da: T::from_big(&(BigInt::from(a) * &dstep)),
                        db: T::from_big(&(BigInt::from(b) * &dstep)),
                        cl: cl.clone(),
                        mult: mult_t.clone(),
                        wsteps: wsteps.clone(),
                        resets: resets.clone(),
                        done: false,
                    });
                }
            }
        }
    }
    out
}

struct FoldOutcome<T> {
    components: u64,
    dropped: u64,
    total: T, // Σ (hi − lo) over canonical components
}

fn fold_streams<T, I>(streams: Vec<I>, mut on_comp: impl FnMut(T, T)) -> FoldOutcome<T>
where
    T: Scalar,
    I: Iterator<Item = (T, T)>,
{
    let mut components = 0u64;
    let mut total = T::from_big(&BigInt::zero());
    let dropped = kway_union(streams, |lo: T, hi: T| {
        components += 1;
        total = total.add(&hi.sub(&lo));
        on_comp(lo, hi);
    });
    FoldOutcome {
        components,
        dropped,
        total,
    }
}

// ---------------------------------------------------------------------------
// Core extent and the disjoint-copies shortcut
// ---------------------------------------------------------------------------

/// Exact `(inf, sup)` of the rank-`k` core without enumerating it: within a
/// (rank, pair) slice both endpoints increase with the word, so the extremes
/// sit on the lexicographically first and last words of each rank.
pub(crate) fn core_extent(p: &Params, k: u32) -> Option<(Rat, Rat)> {
    let m = p.m() as usize;
    let mut inf: Option<Rat> = None;
    let mut sup: Option<Rat> = None;
    for r in 0..=k {
        let amin = if r == 0 { 1 } else { 0 };
        if amin + 2 > m {
            continue; // no admissible pair at this rank (m = 2, rank 0)
        }
        let (first, last) = if r == 0 {
            (Word::empty(), Word::empty())
        } else {
            let mut f = vec![0u8; r as usize];
            f[0] = 1;
            (
                Word::from_digits(f),
                Word::from_digits(vec![(m - 1) as u8; r as usize]),
            )
        };
        let fk = children(p, &first).expect("constructed digits are valid");
        let lk = children(p, &last).expect("constructed digits are valid");
        let lo = fk[amin].lo() * fk[amin + 1].lo();
        let hi = lk[m - 2].hi() * lk[m - 1].hi();
        if inf.as_ref().is_none_or(|v| &lo < v) {
            inf = Some(lo);
        }
        if sup.as_ref().is_none_or(|v| &hi > v) {
            sup = Some(hi);
        }
    }
    inf.zip(sup)
}

/// True when consecutive `λⁿ`-copies of the rank-`k` core cannot meet, so
/// the union's measure is exactly `L(core)·Σλⁿ` and no cross-copy merge is
/// needed. Strict inequality: touching copies take the general path.
fn scaled_copies_disjoint(p: &Params, k: u32) -> bool {
    match core_extent(p, k) {
        None => true,
        Some((inf, sup)) => p.lambda() * sup < inf,
    }
}

// ---------------------------------------------------------------------------
// The scaled-union driver
// ---------------------------------------------------------------------------

struct UnionOutcome {
    lower: Rat,
    set: Option<IntervalSet>,
}

fn budget_enumeration_err(what: &str, n: u128, max: u64) -> Error {
    Error::ResourceBudgetExceeded(format!(
        "{what} enumerates {n} pair-product intervals; budget allows {max}"
    ))
}

fn materialize_cap_err(cap: u64) -> Error {
    Error::ResourceBudgetExceeded(format!(
        "result exceeds the in-memory component cap ({cap})"
    ))
}

/// Exact measure (and optionally the canonical set) of
/// `⋃_{n=0..=n_scales} λⁿ·core_k`.
fn scaled_union(
    p: &Params,
    k: u32,
    n_scales: u32,
    budget: &Budget,
    collect: bool,
) -> Result<UnionOutcome> {
    let raw = raw_hat_count(p.m(), k);
    if raw > budget.max_product_intervals as u128 {
        return Err(budget_enumeration_err(
            &format!("rank-{k} structure"),
            raw,
            budget.max_product_intervals,
        ));
    }
    if raw == 0 {
        return Ok(UnionOutcome {
            lower: Rat::zero(),
            set: collect.then(IntervalSet::empty),
        });
    }
    if scaled_copies_disjoint(p, k) {
        let e2 = core_denom_sq(p, k);
        if fits_u128(&e2) {
            shortcut_union::<u128>(p, k, n_scales, collect)
        } else {
            shortcut_union::<BigInt>(p, k, n_scales, collect)
        }
    } else {
        let d = core_denom_sq(p, k) * p.lambda().denom().pow(n_scales);
        if fits_u128(&d) {
            general_union::<u128>(p, k, n_scales, budget, raw, collect)
        } else {
            general_union::<BigInt>(p, k, n_scales, budget, raw, collect)
        }
    }
}

/// Disjoint-copies path: fold the core once; the rescaled copies contribute
/// `λⁿ·L(core)` each with no interaction.
fn shortcut_union<T: Scalar>(
    p: &Params,
    k: u32,
    n_scales: u32,
    collect: bool,
) -> Result<UnionOutcome> {
    let e2 = core_denom_sq(p, k);
    let mut ints: Vec<(T, T)> = Vec::new();
    let mut overflow = false;
    let streams = make_streams::<T>(p, k, std::slice::from_ref(&BigInt::one()));
    let out = fold_streams(streams, |lo, hi| {
        if collect && !overflow {
            if ints.len() < FOLD_COMPONENT_CAP {
                ints.push((lo, hi));
            } else {
                overflow = true;
                ints = Vec::new();
            }
        }
    });
    let core_len = Rat::new(out.total.to_big(), e2.clone());
    let lower = core_len * geom_sum(p, n_scales);
    debug_assert!(lower <= Rat::one());

    if !collect {
        return Ok(UnionOutcome { lower, set: None });
    }
    if overflow || out.components * (n_scales as u64 + 1) > MATERIALIZE_COMPONENT_CAP {
        return Err(materialize_cap_err(MATERIALIZE_COMPONENT_CAP));
    }
    let core_rats: Vec<RatInterval> = ints
        .iter()
        .map(|(lo, hi)| RatInterval::new(Rat::new(lo.to_big(), e2.clone()), Rat::new(hi.to_big(), e2.clone())))
        .collect();
    let mut all = Vec::with_capacity(core_rats.len() * (n_scales as usize + 1));
    for n in 0..=n_scales {
        let f = p.lambda_pow(n);
        for iv in &core_rats {
            all.push(RatInterval::new(iv.lo() * &f, iv.hi() * &f));
        }
    }
    let set = union_merge(all);
    debug_assert_eq!(set.total_length(), lower);
    Ok(UnionOutcome { lower, set: Some(set) })
}

/// General path: fold the core once collecting its canonical components,
/// then heap-merge the rescaled copies of those components. If the core has
/// too many components to hold, re-enumerate everything with per-copy
/// multipliers instead (pure streaming, but (n_scales+1)× the work).
fn general_union<T: Scalar>(
    p: &Params,
    k: u32,
    n_scales: u32,
    budget: &Budget,
    raw: u128,
    collect: bool,
) -> Result<UnionOutcome> {
    let e2 = core_denom_sq(p, k);
    let pn = p.lambda().numer();
    let qd = p.lambda().denom();
    let scaled_denom = &e2 * qd.pow(n_scales);
    let mults: Vec<BigInt> = (0..=n_scales).map(|n| pn.pow(n) * qd.pow(n_scales - n)).collect();

    let mut ints: Vec<(T, T)> = Vec::new();
    let mut overflow = false;
    let core_streams = make_streams::<T>(p, k, std::slice::from_ref(&BigInt::one()));
    fold_streams(core_streams, |lo, hi| {
        if !overflow {
            if ints.len() < FOLD_COMPONENT_CAP {
                ints.push((lo, hi));
            } else {
                overflow = true;
                ints = Vec::new();
            }
        }
    });

    let mut rats: Vec<RatInterval> = Vec::new();
    let mut rat_overflow = false;
    let push_rat = |lo: &T, hi: &T, want: bool, store: &mut Vec<RatInterval>, of: &mut bool| {
        if want && !*of {
            if (store.len() as u64) < MATERIALIZE_COMPONENT_CAP {
                store.push(RatInterval::new(
                    Rat::new(lo.to_big(), scaled_denom.clone()),
                    Rat::new(hi.to_big(), scaled_denom.clone()),
                ));
            } else {
                *of = true;
                *store = Vec::new();
            }
        }
    };

    let out = if !overflow {
        // Merge rescaled copies of the core's canonical components. The core
        // fold produced endpoints over E²; rescale copy n by pⁿq^{N−n} to land
        // on the common denominator E²·q^N.
        let mult_ts: Vec<T> = mults.iter().map(T::from_big).collect();
        let mut streams = Vec::with_capacity(mult_ts.len());
        for mm in &mult_ts {
            streams.push(ints.iter().map(move |pair: &(T, T)| (pair.0.mul(mm), pair.1.mul(mm))));
        }
        fold_streams(streams, |lo, hi| {
            push_rat(&lo, &hi, collect, &mut rats, &mut rat_overflow)
        })
    } else {
        let work = raw.saturating_mul(n_scales as u128 + 1);
        if work > budget.max_product_intervals as u128 {
            return Err(budget_enumeration_err(
                &format!("depth-{n_scales} rescan of the rank-{k} structure"),
                work,
                budget.max_product_intervals,
            ));
        }
        let streams = make_streams::<T>(p, k, &mults);
        fold_streams(streams, |lo, hi| {
            push_rat(&lo, &hi, collect, &mut rats, &mut rat_overflow)
        })
    };

    let lower = Rat::new(out.total.to_big(), scaled_denom.clone());
    debug_assert!(lower <= Rat::one());
    let set = if collect {
        if rat_overflow {
            return Err(materialize_cap_err(MATERIALIZE_COMPONENT_CAP));
        }
        Some(IntervalSet::from_canonical(rats, out.dropped))
    } else {
        None
    };
    Ok(UnionOutcome { lower, set })
}

// ---------------------------------------------------------------------------
// Public structure and enclosure operations
// ---------------------------------------------------------------------------

/// Canonical union of all pair-product intervals at ranks ≤ `k`.
pub fn rank_truncated_core(p: &Params, k: u32, budget: &Budget) -> Result<IntervalSet> {
    Ok(scaled_union(p, k, 0, budget, true)?
        .set
        .expect("materializing call returns a set"))
}

/// A certified two-sided enclosure of the product set's Lebesgue measure.
///
/// `lower` is the exact measure of the truncated structure, hence a true
/// lower bound. In certified mode `upper = min(1, lower + rank error +
/// rescaling tail)`. Outside the certified parameter range the structural
/// equality behind both bounds is conjectural, so `certified` is false and
/// `upper` is the vacuous bound 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureEnclosure {
    pub lower: Rat,
    pub upper: Rat,
    pub rank_k: u32,
    pub depth_n: u32,
    pub certified: bool,
}

impl MeasureEnclosure {
    pub fn width(&self) -> Rat {
        &self.upper - &self.lower
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lower <= x && x <= &self.upper
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnclosureOptions {
    /// Use the tighter (m−1)/m error-bound variant.
    pub refined_error_bound: bool,
}

fn assemble_enclosure(
    p: &Params,
    k: u32,
    n_scales: u32,
    lower: Rat,
    opts: &EnclosureOptions,
) -> MeasureEnclosure {
    debug_assert!(!lower.is_negative() && lower <= Rat::one());
    if p.is_certified() {
        let eb = if opts.refined_error_bound {
            error_bound_refined(p, k)
        } else {
            error_bound(p, k)
        };
        let slack = eb * geom_sum(p, n_scales) + tail_bound(p, n_scales);
        let upper = std::cmp::min(Rat::one(), &lower + slack);
        MeasureEnclosure {
            lower,
            upper,
            rank_k: k,
            depth_n: n_scales,
            certified: true,
        }
    } else {
        MeasureEnclosure {
            lower,
            upper: Rat::one(),
            rank_k: k,
            depth_n: n_scales,
            certified: false,
        }
    }
}

/// Measure-only enclosure at truncation `(k, n_scales)`. Streams everything;
/// memory stays O(components held) at worst and O(1) on the fast paths.
pub fn measure_enclosure(
    p: &Params,
    k: u32,
    n_scales: u32,
    budget: &Budget,
) -> Result<MeasureEnclosure> {
    measure_enclosure_with(p, k, n_scales, budget, &EnclosureOptions::default())
}

pub fn measure_enclosure_with(
    p: &Params,
    k: u32,
    n_scales: u32,
    budget: &Budget,
    opts: &EnclosureOptions,
) -> Result<MeasureEnclosure> {
    let u = scaled_union(p, k, n_scales, budget, false)?;
    Ok(assemble_enclosure(p, k, n_scales, u.lower, opts))
}

/// Materialized truncation of the full product structure:
/// `⋃_{n=0..=n_scales} λⁿ·core_k` as a canonical set, plus its enclosure.
/// The isolated point 0 and the measure-zero square set are not part of the
/// materialized union.
pub fn full_product_approx(
    p: &Params,
    k: u32,
    n_scales: u32,
    budget: &Budget,
) -> Result<(IntervalSet, MeasureEnclosure)> {
    let u = scaled_union(p, k, n_scales, budget, true)?;
    let enc = assemble_enclosure(p, k, n_scales, u.lower, &EnclosureOptions::default());
    Ok((u.set.expect("materializing call returns a set"), enc))
}

// ---------------------------------------------------------------------------
// Hypothesis-chain verification and the near-1/2 coverage check
// ---------------------------------------------------------------------------

/// Exact values of the three polynomial quantities whose nonnegativity
/// underpins the interval-filling argument (products of child intervals are
/// full intervals). All three are ≥ 0 throughout the certified range; the
/// third can fail below it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainConditionReport {
    pub quantity_h: Rat,
    pub quantity_v: Rat,
    pub quantity_claim: Rat,
    pub all_pass: bool,
}

pub fn verify_chain_conditions(p: &Params) -> ChainConditionReport {
    let (l, g, d) = (p.lambda(), p.gap(), p.step());
    let quantity_h = l * l + g * l + d * d - g;
    let quantity_v = d * d + l * d - g;
    let m = BigInt::from(p.m());
    let quantity_claim = (Rat::from_integer(2 * &m - BigInt::one()) * l - Rat::one())
        / Rat::from_integer(m - BigInt::one());
    let all_pass = !quantity_h.is_negative() && !quantity_v.is_negative() && !quantity_claim.is_negative();
    ChainConditionReport {
        quantity_h,
        quantity_v,
        quantity_claim,
        all_pass,
    }
}

/// Containment report of the rank-`k` core against a target interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageCheck {
    pub target: RatInterval,
    pub contained: bool,
    pub coverage_gap: Rat,
}

/// For `m = 2` and `0.44 < λ < 1/2` the core's closure is exactly
/// `[(1−λ)², 1]`. Checks that the rank-`k` core sits inside that target and
/// reports how much of the target's length it has not yet covered (which is
/// bounded by `error_bound(k)`). Refuses parameters outside the range where
/// that identity is established.
pub fn near_half_coverage_check(p: &Params, k: u32, budget: &Budget) -> Result<CoverageCheck> {
    if p.m() != 2 || p.lambda() <= &rq(11, 25) || p.lambda() >= &rq(1, 2) {
        return Err(Error::CoverageRangeError {
            m: p.m(),
            lambda: format_rat(p.lambda()),
        });
    }
    let edge = Rat::one() - p.lambda();
    let target = RatInterval::new(&edge * &edge, Rat::one());
    let contained = match core_extent(p, k) {
        None => true,
        Some((inf, sup)) => &inf >= target.lo() && &sup <= target.hi(),
    };
    let core_len = scaled_union(p, k, 0, budget, false)?.lower;
    let coverage_gap = target.length() - core_len;
    Ok(CoverageCheck {
        target,
        contained,
        coverage_gap,
    })
}

/// Is `z` the square of a member of the upper part (branches ≥ 1) of the
/// set? Squares account for the only product-set points the interval
/// structure can miss, and they form a null set; this answers point queries
/// about them. Irrational square roots report `UnresolvedAtDepth`.
pub fn square_membership(p: &Params, z: &Rat, max_depth: u32) -> Result<Membership> {
    if z.is_negative() || z > &Rat::one() {
        return Err(Error::DomainError(format!(
            "square query {} outside [0, 1]",
            format_rat(z)
        )));
    }
    let sn = z.numer().sqrt();
    let sd = z.denom().sqrt();
    if &(&sn * &sn) != z.numer() || &(&sd * &sd) != z.denom() {
        return Ok(Membership::UnresolvedAtDepth);
    }
    let x = Rat::new(sn, sd);
    if &x < p.step() {
        return Ok(Membership::Out);
    }
    membership(p, &x, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::Mode;
    use crate::rational::rq;
    use std::str::FromStr;

    fn params(m: u32, n: i64, d: i64) -> Params {
        Params::new(m, rq(n, d), Mode::Certified).unwrap()
    }

    fn exploratory(m: u32, n: i64, d: i64) -> Params {
        Params::new(m, rq(n, d), Mode::Exploratory).unwrap()
    }

    #[test]
    fn rank_error_bound_values() {
        assert_eq!(error_bound(&params(2, 1, 3), 2), rq(8, 3));
        assert_eq!(error_bound(&params(3, 1, 4), 0), rq(9, 1));
        // 3·(2/3)²⁵/(1/3) = 9·2²⁵/3²⁵
        assert_eq!(
            error_bound(&params(2, 1, 3), 24),
            Rat::new(BigInt::from(9u32) * BigInt::from(2u32).pow(25u32), BigInt::from(3u32).pow(25u32))
        );
        assert_eq!(error_bound_refined(&params(2, 1, 3), 2), rq(4, 3));
    }

    #[test]
    fn scale_tail_bound_values() {
        assert_eq!(
            tail_bound(&params(2, 1, 3), 12),
            Rat::new(BigInt::one(), BigInt::from(2u32) * BigInt::from(3u32).pow(12u32))
        );
        assert_eq!(tail_bound(&params(2, 1, 3), 0), rq(1, 2));
        assert_eq!(tail_bound(&params(3, 1, 4), 1), rq(1, 12));
        assert_eq!(geom_sum(&params(2, 1, 3), 2), rq(13, 9));
    }

    #[test]
    fn pair_products_per_word() {
        let p = params(2, 1, 3);
        assert!(hat_intervals(&p, &Word::empty()).unwrap().is_empty());
        let one = hat_intervals(&p, &Word::from_str("1").unwrap()).unwrap();
        assert_eq!(one, vec![RatInterval::new(rq(16, 27), rq(7, 9))]);

        let p3 = params(3, 1, 4);
        let top = hat_intervals(&p3, &Word::empty()).unwrap();
        assert_eq!(top, vec![RatInterval::new(rq(9, 32), rq(5, 8))]);

        assert!(matches!(
            hat_intervals(&p, &Word::from_str("01").unwrap()),
            Err(Error::NotInFamilyA(_))
        ));
    }

    #[test]
    fn raw_counts() {
        // m=2: one pair per nonempty admissible word, none at the top
        assert_eq!(raw_hat_count(2, 0), 0);
        assert_eq!(raw_hat_count(2, 3), 1 + 2 + 4);
        // m=3: top level contributes C(2,2)=1, each rank r has 2·3^{r−1} words × 3 pairs
        assert_eq!(raw_hat_count(3, 2), 1 + 2 * 3 + 6 * 3);
        assert_eq!(raw_hat_count(5, 200), u128::MAX); // saturates, no panic
    }

    #[test]
    fn truncated_core_small_cases() {
        let b = Budget::default();
        let p = params(2, 1, 3);
        assert!(rank_truncated_core(&p, 0, &b).unwrap().is_empty());

        let core2 = rank_truncated_core(&p, 2, &b).unwrap();
        assert_eq!(
            core2.intervals(),
            &[
                RatInterval::new(rq(40, 81), rq(133, 243)),
                RatInterval::new(rq(16, 27), rq(7, 9)),
                RatInterval::new(rq(208, 243), rq(25, 27)),
            ]
        );
        assert_eq!(core2.total_length(), rq(25, 81));

        let p3 = params(3, 1, 4);
        let core0 = rank_truncated_core(&p3, 0, &b).unwrap();
        assert_eq!(core0.intervals(), &[RatInterval::new(rq(9, 32), rq(5, 8))]);
    }

    #[test]
    fn streams_match_rational_route() {
        // The integer-stream union must coincide with the direct rational
        // evaluation, word by word, at every parameter shape we rely on:
        // binary/ternary branching and both u128 and wide denominators.
        let b = Budget::default();
        for p in [params(2, 1, 3), params(3, 1, 4), params(3, 7, 24), params(2, 9, 20)] {
            let k = 5;
            let streamed = rank_truncated_core(&p, k, &b).unwrap();
            let mut raw = Vec::new();
            for w in crate::cantor::enumerate_admissible(&p, k) {
                raw.extend(hat_intervals(&p, &w).unwrap());
            }
            let reference = union_merge(raw);
            assert_eq!(streamed, reference, "mismatch at m={} λ={}", p.m(), format_rat(p.lambda()));
        }
    }

    #[test]
    fn extent_matches_core() {
        let p = params(2, 1, 3);
        let (inf, sup) = core_extent(&p, 2).unwrap();
        assert_eq!(inf, rq(40, 81));
        assert_eq!(sup, rq(25, 27));
        assert!(core_extent(&p, 0).is_none());
        // λ·sup < inf here, so rescaled copies are pairwise disjoint
        assert!(scaled_copies_disjoint(&p, 2));
        // near 1/2 the copies chain into one another instead
        assert!(!scaled_copies_disjoint(&params(2, 9, 20), 6));
    }

    #[test]
    fn full_structure_small() {
        let b = Budget::default();
        let p = params(2, 1, 3);
        let (set, enc) = full_product_approx(&p, 1, 0, &b).unwrap();
        assert_eq!(set.intervals(), &[RatInterval::new(rq(16, 27), rq(7, 9))]);
        assert_eq!(enc.lower, rq(5, 27));
        assert_eq!(enc.upper, Rat::one()); // 5/27 + 4 + 1/2 clamps to 1
        assert!(enc.certified);

        let (set0, enc0) = full_product_approx(&p, 0, 0, &b).unwrap();
        assert!(set0.is_empty());
        assert_eq!(enc0.lower, Rat::zero());
    }

    #[test]
    fn doubly_truncated_exact_value() {
        // ⋃_{n=0}^{2}(1/3)ⁿ·core₂ has measure (25/81)·(13/9): copies disjoint.
        let b = Budget::default();
        let p = params(2, 1, 3);
        let enc = measure_enclosure(&p, 2, 2, &b).unwrap();
        assert_eq!(enc.lower, rq(25, 81) * rq(13, 9));
        let (set, enc2) = full_product_approx(&p, 2, 2, &b).unwrap();
        assert_eq!(enc2.lower, enc.lower);
        assert_eq!(set.total_length(), enc.lower);
        assert_eq!(set.len(), 9);
    }

    #[test]
    fn measure_and_materialized_routes_agree_when_copies_interact() {
        let b = Budget::default();
        // λ = 9/20 > (3−√5)/2: rescaled copies overlap and must be merged.
        let p = params(2, 9, 20);
        let enc = measure_enclosure(&p, 6, 8, &b).unwrap();
        let (set, enc2) = full_product_approx(&p, 6, 8, &b).unwrap();
        assert_eq!(enc, enc2);
        assert_eq!(set.total_length(), enc.lower);
        // independent rational route: materialize each copy and merge
        let core = rank_truncated_core(&p, 6, &b).unwrap();
        let mut all = Vec::new();
        for n in 0..=8 {
            let f = p.lambda_pow(n);
            for iv in core.intervals() {
                all.push(RatInterval::new(iv.lo() * &f, iv.hi() * &f));
            }
        }
        assert_eq!(union_merge(all).total_length(), enc.lower);
    }

    #[test]
    fn exploratory_enclosures_are_flagged_and_vacuous_above() {
        let b = Budget::default();
        let p = exploratory(2, 3, 10);
        let enc = measure_enclosure(&p, 4, 3, &b).unwrap();
        assert!(!enc.certified);
        assert_eq!(enc.upper, Rat::one());
        assert!(enc.lower > Rat::zero() && enc.lower < Rat::one());
    }

    #[test]
    fn budget_refusals() {
        let tight = Budget {
            max_product_intervals: 10,
            max_oracle_pairs: 10,
        };
        let p = params(2, 1, 3);
        assert!(matches!(
            rank_truncated_core(&p, 10, &tight),
            Err(Error::ResourceBudgetExceeded(_))
        ));
        assert!(matches!(
            measure_enclosure(&p, 10, 2, &tight),
            Err(Error::ResourceBudgetExceeded(_))
        ));
    }

    #[test]
    fn chain_condition_examples() {
        let r = verify_chain_conditions(&params(2, 1, 3));
        assert_eq!(r.quantity_h, rq(1, 3));
        assert_eq!(r.quantity_v, rq(1, 3));
        assert_eq!(r.quantity_claim, rq(0, 1));
        assert!(r.all_pass);

        let r = verify_chain_conditions(&exploratory(2, 3, 10));
        assert_eq!(r.quantity_claim, rq(-1, 10));
        assert!(!r.all_pass);

        let r = verify_chain_conditions(&params(5, 1, 6));
        assert_eq!(r.quantity_h, rq(7, 192));
        assert_eq!(r.quantity_v, rq(7, 192));
        assert_eq!(r.quantity_claim, rq(1, 8));
        assert!(r.all_pass);
    }

    #[test]
    fn near_half_coverage() {
        let b = Budget::default();
        let p = params(2, 9, 20);
        let r = near_half_coverage_check(&p, 1, &b).unwrap();
        assert_eq!(r.target, RatInterval::new(rq(121, 400), Rat::one()));
        assert!(r.contained);
        assert_eq!(r.coverage_gap, rq(3069, 8000));
        assert!(r.coverage_gap <= error_bound(&p, 1));

        assert!(matches!(
            near_half_coverage_check(&params(2, 2, 5), 1, &b),
            Err(Error::CoverageRangeError { .. })
        ));
        assert!(matches!(
            near_half_coverage_check(&params(3, 2, 7), 1, &b),
            Err(Error::CoverageRangeError { .. })
        ));
    }

    #[test]
    fn square_queries() {
        let p = params(2, 1, 3);
        // 2/3 is a member of the upper part; its square is resolved In
        assert_eq!(square_membership(&p, &rq(4, 9), 64).unwrap(), Membership::In);
        // 1/2 is in the central gap, so 1/4 is not an upper-part square
        assert_eq!(square_membership(&p, &rq(1, 4), 64).unwrap(), Membership::Out);
        // below δ² nothing in the upper part can square to it
        assert_eq!(square_membership(&p, &rq(1, 9), 64).unwrap(), Membership::Out);
        // irrational square root
        assert_eq!(
            square_membership(&p, &rq(1, 2), 64).unwrap(),
            Membership::UnresolvedAtDepth
        );
        assert!(square_membership(&p, &rq(3, 2), 64).is_err());
    }
}
