//! Helpers around [`BigRational`]: construction, the "p/q" text form used in
//! every report, and an [`Interval`] with explicit endpoint flags.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub use num_rational::BigRational as Rational;

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Always `p/q`, including `0/1` and `n/1`.
pub fn to_pq(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q`, a bare integer, or a finite decimal such as `0.75`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let w: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = w.abs() * &scale + f;
        let n = if neg { -mag } else { mag };
        return Ok(Rational::new(n, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn serialize_pq<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&to_pq(r))
}

pub fn serialize_opt_pq<S: Serializer>(
    r: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&to_pq(r)),
        None => s.serialize_none(),
    }
}

pub fn deserialize_pq<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Rational, D::Error> {
    let s = String::deserialize(d)?;
    parse_rational(&s).map_err(serde::de::Error::custom)
}

/// `r` as an `f64`, for reporting only.
pub fn approx(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator overflow f64: fall back on bit lengths
        let n = r.numer().bits() as i64;
        let d = r.denom().bits() as i64;
        let shift = (n.max(d) - 900).max(0) as usize;
        let nn = (r.numer() >> shift).to_f64().unwrap_or(0.0);
        let dd = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
        nn / dd
    })
}

/// Natural log of a positive rational as `f64`, without overflow for huge
/// numerators or denominators.
pub fn ln_approx(r: &Rational) -> f64 {
    fn ln_int(n: &BigInt) -> f64 {
        use num_traits::ToPrimitive;
        let shift = n.bits().saturating_sub(60) as usize;
        (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
    ln_int(r.numer()) - ln_int(r.denom())
}

/// A real interval with rational endpoints; each endpoint may be open or closed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(serialize_with = "serialize_pq", deserialize_with = "deserialize_pq")]
    pub lo: Rational,
    #[serde(serialize_with = "serialize_pq", deserialize_with = "deserialize_pq")]
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!(
                "interval with lo {} > hi {}",
                to_pq(&lo),
                to_pq(&hi)
            )));
        }
        Ok(Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn closed(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    /// `[lo, hi)`
    pub fn half_open(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, true, false)
    }

    pub fn unit() -> Self {
        Interval {
            lo: Rational::zero(),
            hi: Rational::one(),
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = match x.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let below = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    /// Set inclusion `self ⊆ other`, respecting endpoint flags.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lo_ok = match self.lo.cmp(&other.lo) {
            Ordering::Greater => true,
            Ordering::Equal => other.lo_closed || !self.lo_closed,
            Ordering::Less => false,
        };
        let hi_ok = match self.hi.cmp(&other.hi) {
            Ordering::Less => true,
            Ordering::Equal => other.hi_closed || !self.hi_closed,
            Ordering::Greater => false,
        };
        lo_ok && hi_ok
    }

    pub fn within_unit(&self) -> bool {
        !self.lo.is_negative() && self.hi <= Rational::one()
    }

    /// Distance between the closures of two intervals (zero if they meet).
    pub fn gap(&self, other: &Interval) -> Rational {
        gap(&self.lo, &self.hi, &other.lo, &other.hi)
    }
}

/// Distance between closed intervals `[a_lo, a_hi]` and `[b_lo, b_hi]`.
pub fn gap(a_lo: &Rational, a_hi: &Rational, b_lo: &Rational, b_hi: &Rational) -> Rational {
    if a_hi <= b_lo {
        b_lo - a_hi
    } else if b_hi <= a_lo {
        a_lo - b_hi
    } else {
        Rational::zero()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            to_pq(&self.lo),
            to_pq(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}
