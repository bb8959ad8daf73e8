//! The self-similar system underlying everything else: a family of m affine
//! contractions `x -> lambda*x + i*step` on [0,1] with equal contraction
//! ratio and equal gaps, its symbolic words, the basic intervals they
//! address, and exact membership queries for the attractor.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rat, Rat, RatInterval};

/// Certified mode enforces the parameter range in which the product-set
/// decomposition is proven; exploratory mode admits smaller ratios but
/// every downstream result is flagged non-certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Certified,
    Exploratory,
}

/// Validated system parameters. `gap` and `step` are derived once:
/// `gap = (1 - m*lambda)/(m - 1)`, `step = lambda + gap`, which makes the
/// m branch images of [0,1] equally spaced with `m*lambda + (m-1)*gap = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params {
    m: u32,
    lambda: Rat,
    gap: Rat,
    step: Rat,
    mode: Mode,
}

/// Lower end of the certified parameter range for branch count `m`.
pub fn certified_lower_bound(m: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::from(m + 1))
}

pub fn in_certified_range(m: u32, lambda: &Rat) -> bool {
    let upper = Rat::new(BigInt::one(), BigInt::from(m));
    lambda >= &certified_lower_bound(m) && lambda < &upper
}

impl Params {
    pub fn new(m: u32, lambda: Rat, mode: Mode) -> Result<Params> {
        if m < 2 {
            return Err(Error::InvalidM(m));
        }
        let upper = Rat::new(BigInt::one(), BigInt::from(m));
        if !(lambda.is_positive() && lambda < upper) {
            return Err(Error::InvalidRatio {
                m,
                lambda: format_rat(&lambda),
            });
        }
        if mode == Mode::Certified && lambda < certified_lower_bound(m) {
            return Err(Error::OutOfCertifiedRange {
                m,
                lambda: format_rat(&lambda),
            });
        }
        let m_rat = Rat::from_integer(BigInt::from(m));
        let gap = (Rat::one() - &m_rat * &lambda) / (m_rat - Rat::one());
        let step = &lambda + &gap;
        debug_assert!(gap.is_positive());
        debug_assert!(
            Rat::from_integer(BigInt::from(m)) * &lambda
                + Rat::from_integer(BigInt::from(m - 1)) * &gap
                == Rat::one()
        );
        Ok(Params {
            m,
            lambda,
            gap,
            step,
            mode,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn lambda(&self) -> &Rat {
        &self.lambda
    }

    /// Length of the gap between adjacent depth-1 branch images.
    pub fn gap(&self) -> &Rat {
        &self.gap
    }

    /// Offset between consecutive branch images: `step = lambda + gap`.
    pub fn step(&self) -> &Rat {
        &self.step
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_certified(&self) -> bool {
        self.mode == Mode::Certified
    }

    pub fn lambda_pow(&self, e: u32) -> Rat {
        Rat::new(self.lambda.numer().pow(e), self.lambda.denom().pow(e))
    }
}

/// A word over digits `0..m`, addressing the nested basic intervals.
/// The empty word addresses [0,1].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_digits(digits: impl Into<Vec<u8>>) -> Word {
        Word(digits.into())
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn rank(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Admissible words (first digit nonzero) address the interval family
    /// whose child products tile the right part of the product set; the
    /// empty word is admissible by convention.
    pub fn is_admissible(&self) -> bool {
        self.0.first().is_none_or(|&d| d != 0)
    }

    pub fn child(&self, digit: u8) -> Word {
        let mut d = self.0.clone();
        d.push(digit);
        Word(d)
    }
}

impl fmt::Display for Word {
    /// Digit-string form, base-36 per digit (`""` for the empty word).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.0 {
            let c = char::from_digit(d as u32, 36).expect("word display supports digits < 36");
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let mut digits = Vec::with_capacity(s.len());
        for c in s.chars() {
            let d = c
                .to_digit(36)
                .ok_or_else(|| Error::InvalidArgument(format!("bad word digit {c:?}")))?;
            digits.push(d as u8);
        }
        Ok(Word(digits))
    }
}

fn check_digits(p: &Params, w: &Word) -> Result<()> {
    for &d in w.digits() {
        if u32::from(d) >= p.m {
            return Err(Error::DigitOutOfRange { m: p.m, digit: d });
        }
    }
    Ok(())
}

/// The closed interval addressed by `w`: the image of [0,1] under the
/// composition of branch maps named by the digits. Its left endpoint is
/// `step * sum_k digit_k * lambda^(k-1)` and its length is `lambda^rank`.
pub fn basic_interval(p: &Params, w: &Word) -> Result<RatInterval> {
    check_digits(p, w)?;
    let mut acc = Rat::zero();
    for &d in w.digits().iter().rev() {
        acc = Rat::from_integer(BigInt::from(d)) + &p.lambda * acc;
    }
    let lo = p.step() * acc;
    let hi = &lo + p.lambda_pow(w.rank());
    Ok(RatInterval::new(lo, hi))
}

/// The m next-deeper basic intervals inside `basic_interval(w)`, in digit
/// order. Adjacent children are separated by gaps of length `gap * lambda^rank`.
pub fn children(p: &Params, w: &Word) -> Result<Vec<RatInterval>> {
    let base = basic_interval(p, w)?;
    let offset = p.step() * p.lambda_pow(w.rank());
    let child_len = p.lambda_pow(w.rank() + 1);
    let mut out = Vec::with_capacity(p.m as usize);
    for i in 0..p.m {
        let lo = base.lo() + Rat::from_integer(BigInt::from(i)) * &offset;
        let hi = &lo + &child_len;
        out.push(RatInterval::new(lo, hi));
    }
    Ok(out)
}

/// Streaming enumeration of all admissible words of rank <= `max_rank`:
/// the empty word first, then each rank in lexicographic digit order.
/// Total count is `1 + sum_{r=1..=max_rank} (m-1) * m^(r-1)`.
pub fn enumerate_admissible(p: &Params, max_rank: u32) -> FamilyIter {
    FamilyIter {
        m: p.m as u8,
        max_rank,
        next: Some(Vec::new()),
    }
}

pub struct FamilyIter {
    m: u8,
    max_rank: u32,
    next: Option<Vec<u8>>,
}

impl Iterator for FamilyIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        // successor within the same rank: odometer with first digit >= 1
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                // exhausted this rank; move to the next one
                if succ.len() as u32 + 1 > self.max_rank {
                    self.next = None;
                } else {
                    let mut w = vec![0u8; succ.len() + 1];
                    w[0] = 1;
                    self.next = Some(w);
                }
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.m {
                for d in &mut succ[pos + 1..] {
                    *d = 0;
                }
                self.next = Some(succ);
                break;
            }
            succ[pos] = if pos == 0 { 1 } else { 0 };
        }
        Some(Word(cur))
    }
}

/// Number of admissible words of rank exactly `r` (for r >= 1).
pub fn admissible_count_at_rank(m: u32, r: u32) -> u128 {
    debug_assert!(r >= 1);
    u128::from(m - 1) * u128::from(m).pow(r - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    UnresolvedAtDepth,
}

/// Exact membership of a rational point in the attractor, by greedy digit
/// extraction on the rescaled state. A revisited state means the digit
/// expansion is eventually periodic, hence the point lies in the attractor;
/// landing in a gap decides exclusion. States whose denominators keep
/// growing are cut off at `max_depth` as undecided.
pub fn membership(p: &Params, x: &Rat, max_depth: u32) -> Result<Membership> {
    if x.is_negative() || x > &Rat::one() {
        return Err(Error::DomainError(format!(
            "membership query {} outside [0,1]",
            format_rat(x)
        )));
    }
    let mut state = x.clone();
    let mut seen: HashSet<Rat> = HashSet::new();
    for _ in 0..max_depth {
        if state.is_zero() || state.is_one() {
            return Ok(Membership::In);
        }
        if !seen.insert(state.clone()) {
            return Ok(Membership::In);
        }
        let idx = (&state / p.step()).floor().to_integer();
        let idx = idx.to_u32().unwrap_or(p.m - 1).min(p.m - 1);
        let child_lo = Rat::from_integer(BigInt::from(idx)) * p.step();
        let child_hi = &child_lo + p.lambda();
        if state < child_lo || state > child_hi {
            return Ok(Membership::Out);
        }
        state = (state - child_lo) / p.lambda();
    }
    Ok(Membership::UnresolvedAtDepth)
}
