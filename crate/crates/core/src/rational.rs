//! Exact rational scalars: parsing, canonical text forms, and decimal
//! renderings with controlled rounding direction.
//!
//! Every certified quantity in this crate is a `Rat`. Decimal strings exist
//! only at the output boundary and always state their rounding direction, so
//! printed digits never silently widen or shrink an enclosure.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Shorthand constructor used pervasively in tests and small constants.
pub fn rq(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Canonical text form `p/q`, always with an explicit denominator
/// (`0` prints as `0/1`). `Rat` keeps itself in lowest terms with a
/// positive denominator, so this is unique per value.
pub fn format_rat(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Componentwise power; valid because `Rat` is always in lowest terms.
pub(crate) fn rat_pow(x: &Rat, e: u32) -> Rat {
    Rat::new(num_traits::Pow::pow(x.numer(), e), num_traits::Pow::pow(x.denom(), e))
}

/// Accepts `p/q`, plain integers, and decimal literals with an optional
/// exponent (`0.44`, `1e-3`, `-2.5e2`). Everything parses exactly.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse rational from {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let numer: BigInt = n.trim().parse().map_err(|_| bad())?;
        let denom: BigInt = d.trim().parse().map_err(|_| bad())?;
        if denom.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(numer, denom));
    }
    // decimal form: [sign] digits [. digits] [e [sign] digits]
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e.parse().map_err(|_| bad())?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if frac_part.contains(['+', '-']) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(bad());
    }
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        Rat::from_integer(numer * ten.pow(scale as u32))
    } else {
        Rat::new(numer, ten.pow((-scale) as u32))
    })
}

/// Rounding directions for decimal rendering. `TowardZero`/`AwayFromZero`
/// are used for lower/upper enclosure bounds so the printed pair still
/// brackets the exact value; `Nearest` is ties-to-even.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    TowardZero,
    AwayFromZero,
    Nearest,
}

fn pow10(e: u32) -> BigInt {
    BigInt::from(10).pow(e)
}

/// floor(log10(|x|)) for nonzero x.
pub(crate) fn floor_log10(x: &Rat) -> i64 {
    assert!(!x.is_zero());
    let a = x.numer().abs();
    let b = x.denom().clone();
    // |x| = a/b; digit-length difference brackets the exponent within one.
    let mut e = a.to_string().len() as i64 - b.to_string().len() as i64;
    // 10^e <= a/b  <=>  b * 10^e <= a
    let holds = |e: i64| {
        if e >= 0 {
            &b * pow10(e as u32) <= a
        } else {
            b.clone() <= &a * pow10((-e) as u32)
        }
    };
    while !holds(e) {
        e -= 1;
    }
    while holds(e + 1) {
        e += 1;
    }
    e
}

/// Renders `x` to `sig` significant digits in plain positional notation.
/// Returns the string and whether it is exact (no digits were discarded).
pub fn decimal_sig(x: &Rat, sig: u32, round: Round) -> (String, bool) {
    assert!(sig >= 1);
    if x.is_zero() {
        return ("0".to_string(), true);
    }
    let neg = x.is_negative();
    let ax = x.abs();
    let e = floor_log10(&ax);
    // scaled = |x| * 10^(sig-1-e) has exactly `sig` digits before the point.
    let shift = sig as i64 - 1 - e;
    let (num, den) = if shift >= 0 {
        (ax.numer() * pow10(shift as u32), ax.denom().clone())
    } else {
        (ax.numer().clone(), ax.denom() * pow10((-shift) as u32))
    };
    let (mut q, r) = num.div_rem(&den);
    let exact = r.is_zero();
    let round_up = match round {
        Round::TowardZero => false,
        Round::AwayFromZero => !exact,
        Round::Nearest => {
            let twice = &r * BigInt::from(2);
            twice > den || (twice == den && q.is_odd())
        }
    };
    if round_up {
        q += BigInt::one();
    }
    let mut digits = q.to_string();
    let mut e = e;
    if digits.len() as u32 > sig {
        // rounding overflowed into an extra digit (e.g. 9.99 -> 10.0)
        digits.truncate(sig as usize);
        e += 1;
    }
    debug_assert_eq!(digits.len() as u32, sig);
    let point = e + 1; // digits before the decimal point
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if (point as usize) >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    (if neg { format!("-{body}") } else { body }, exact)
}

/// A closed interval with exact rational endpoints, `lo <= hi`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RatInterval {
    lo: Rat,
    hi: Rat,
}

impl RatInterval {
    /// Panics if `lo > hi`; interval construction from computed endpoints
    /// is expected to already satisfy the ordering.
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RatInterval { lo, hi }
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn length(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn into_parts(self) -> (Rat, Rat) {
        (self.lo, self.hi)
    }
}

impl std::fmt::Display for RatInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", format_rat(&self.lo), format_rat(&self.hi))
    }
}
