//! Exact continued-fraction arithmetic: expansions, convergents, cylinder
//! intervals, the Gauss map and the Gauss measure.

pub mod lemmas;

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precise::Precise;
use crate::rational::{self, Interval, Rational};

pub type Digit = u64;

/// Quasi-multiplicativity constant used by every λ-dependent bound.
///
/// The exhaustive battery in [`lemmas`] shows the observed ratios
/// `|I(uv)| / (|I(u)||I(v)|)` stay inside `[0.58, 1.46]` for digits ≤ 5 and
/// `|u| + |v| ≤ 8`, comfortably within `[1/8, 4]`.
pub const LAMBDA: u64 = 8;

/// A finite string of partial quotients, every digit ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Digit>", into = "Vec<Digit>")]
pub struct Word(Vec<Digit>);

impl Word {
    pub fn new(digits: Vec<Digit>) -> Result<Word> {
        if let Some(pos) = digits.iter().position(|&d| d == 0) {
            return Err(Error::Domain(format!("digit {} is zero", pos + 1)));
        }
        Ok(Word(digits))
    }

    pub fn empty() -> Word {
        Word(Vec::new())
    }

    /// Caller guarantees every digit is ≥ 1.
    pub(crate) fn from_vec_unchecked(digits: Vec<Digit>) -> Word {
        debug_assert!(digits.iter().all(|&d| d >= 1));
        Word(digits)
    }

    pub fn digits(&self) -> &[Digit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_digit(&self) -> Option<Digit> {
        self.0.iter().copied().max()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, d: Digit) -> Result<()> {
        if d == 0 {
            return Err(Error::Domain("digit is zero".into()));
        }
        self.0.push(d);
        Ok(())
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    /// The word with its first digit removed (`σ` on finite words).
    pub fn shift(&self) -> Word {
        Word(self.0.iter().skip(1).copied().collect())
    }

    /// The word with digit `k` (1-based) removed.
    pub fn without(&self, k: usize) -> Result<Word> {
        if k == 0 || k > self.0.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.0.len(),
            });
        }
        let mut v = self.0.clone();
        v.remove(k - 1);
        Ok(Word(v))
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &Word) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// Value of the finite continued fraction `[a_1, …, a_n]`.
    pub fn value(&self) -> Rational {
        let c = convergent_pair(self);
        Rational::new(BigInt::from(c.p), BigInt::from(c.q))
    }
}

impl TryFrom<Vec<Digit>> for Word {
    type Error = Error;
    fn try_from(v: Vec<Digit>) -> Result<Word> {
        Word::new(v)
    }
}

impl From<Word> for Vec<Digit> {
    fn from(w: Word) -> Vec<Digit> {
        w.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Comma-separated digits; the empty string is the empty word.
    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty());
        }
        let digits = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<Digit>()
                    .map_err(|_| Error::Parse(format!("bad digit {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Word::new(digits)
    }
}

/// `(p_{n-1}, q_{n-1}, p_n, q_n)` of a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentPair {
    pub p_prev: BigUint,
    pub q_prev: BigUint,
    pub p: BigUint,
    pub q: BigUint,
}

fn convergent_pair(w: &Word) -> ConvergentPair {
    let (mut p_prev, mut p) = (BigUint::one(), BigUint::zero());
    let (mut q_prev, mut q) = (BigUint::zero(), BigUint::one());
    for &a in w.digits() {
        let p_next = &p * a + &p_prev;
        let q_next = &q * a + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    ConvergentPair {
        p_prev,
        q_prev,
        p,
        q,
    }
}

/// `(p_k, q_k)` for `k = 0..=n`, starting from `p_0 = 0, q_0 = 1`.
pub fn convergents(w: &Word) -> Vec<(BigUint, BigUint)> {
    let (mut p_prev, mut p) = (BigUint::one(), BigUint::zero());
    let (mut q_prev, mut q) = (BigUint::zero(), BigUint::one());
    let mut out = Vec::with_capacity(w.len() + 1);
    out.push((p.clone(), q.clone()));
    for &a in w.digits() {
        let p_next = &p * a + &p_prev;
        let q_next = &q * a + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push((p.clone(), q.clone()));
    }
    out
}

/// `q_n(a_1, …, a_n)`; `q_0 = 1` for the empty word.
pub fn denominator(w: &Word) -> BigUint {
    convergent_pair(w).q
}

/// The basic interval `I(w)` with its convergents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cylinder {
    pub word: Word,
    pub p_prev: BigUint,
    pub q_prev: BigUint,
    pub p: BigUint,
    pub q: BigUint,
    pub lo: Rational,
    pub hi: Rational,
}

impl Cylinder {
    /// `hi - lo`, equal to `1/(q_n (q_n + q_{n-1}))`.
    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// `[lo, hi)`.
    pub fn interval(&self) -> Interval {
        Interval {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            lo_closed: true,
            hi_closed: false,
        }
    }

    /// `[lo, hi]`.
    pub fn closure(&self) -> Interval {
        Interval {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn contains_interior(&self, x: &Rational) -> bool {
        &self.lo < x && x < &self.hi
    }
}

pub fn cylinder(w: &Word) -> Cylinder {
    let c = convergent_pair(w);
    let a = Rational::new(BigInt::from(c.p.clone()), BigInt::from(c.q.clone()));
    let b = Rational::new(
        BigInt::from(&c.p + &c.p_prev),
        BigInt::from(&c.q + &c.q_prev),
    );
    // p_n/q_n is the left endpoint exactly when n is even
    let (lo, hi) = if w.len().is_multiple_of(2) { (a, b) } else { (b, a) };
    Cylinder {
        word: w.clone(),
        p_prev: c.p_prev,
        q_prev: c.q_prev,
        p: c.p,
        q: c.q,
        lo,
        hi,
    }
}

/// `|I(w)| = 1/(q_n (q_n + q_{n-1}))`, computed from denominators only.
pub fn cylinder_length(w: &Word) -> Rational {
    let c = convergent_pair(w);
    Rational::new(
        BigInt::one(),
        BigInt::from(&c.q * (&c.q + &c.q_prev)),
    )
}

fn in_unit_half_open(x: &Rational) -> Result<()> {
    if x.is_negative() || x >= &Rational::one() {
        return Err(Error::Domain(format!(
            "{} is outside [0, 1)",
            rational::to_pq(x)
        )));
    }
    Ok(())
}

/// Canonical continued-fraction digits of a rational in `[0, 1)`.
///
/// The expansion is the Gauss-map digit sequence, so it stops at `T^n x = 0`
/// and its last digit is ≥ 2; `0` expands to the empty word.
pub fn cf_expand_rational(x: &Rational) -> Result<Word> {
    in_unit_half_open(x)?;
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let mut digits = Vec::new();
    while !num.is_zero() {
        let (a, r) = den.div_rem(&num);
        digits.push(a.to_u64().ok_or(Error::DigitOverflow)?);
        den = std::mem::replace(&mut num, r);
    }
    Ok(Word::from_vec_unchecked(digits))
}

/// `T(x) = 1/x - ⌊1/x⌋`, `T(0) = 0`.
pub fn gauss_step(x: &Rational) -> Result<Rational> {
    in_unit_half_open(x)?;
    if x.is_zero() {
        return Ok(Rational::zero());
    }
    let inv = x.recip();
    Ok(inv.fract())
}

/// First partial quotient `⌊1/x⌋` of `x ∈ (0, 1)`.
pub fn first_digit(x: &Rational) -> Result<Digit> {
    in_unit_half_open(x)?;
    if x.is_zero() {
        return Err(Error::Domain("0 has no partial quotients".into()));
    }
    x.recip().to_integer().to_u64().ok_or(Error::DigitOverflow)
}

/// Gauss measure `μ(B) = (1/log 2) ∫_B dx/(1+x)` of an interval in `[0,1]`,
/// to `digits` decimal places (absolute error < 10^-digits).
pub fn gauss_measure(iv: &Interval, digits: u32) -> Result<Precise> {
    if !iv.within_unit() {
        return Err(Error::Domain(format!("{iv} is not inside [0, 1]")));
    }
    let one = Rational::one();
    Precise::log2_ratio(&(&one + &iv.lo), &(&one + &iv.hi), digits)
}

/// `|I(uv)| / (|I(u)| |I(v)|)`.
pub fn quasi_mult_ratio(u: &Word, v: &Word) -> Result<Rational> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::Precondition("quasi_mult_ratio needs nonempty words".into()));
    }
    Ok(cylinder_length(&u.concat(v)) / (cylinder_length(u) * cylinder_length(v)))
}

/// `q_n(w) / q_{n-1}(w without a_k)`, `1 ≤ k ≤ n`.
pub fn drop_digit_ratio(w: &Word, k: usize) -> Result<Rational> {
    let reduced = w.without(k)?;
    Ok(Rational::new(
        BigInt::from(denominator(w)),
        BigInt::from(denominator(&reduced)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    /// Plain Euclid, kept apart from `cf_expand_rational`.
    fn euclid_digits(mut p: u64, mut q: u64) -> Vec<u64> {
        let mut out = vec![];
        while p != 0 {
            out.push(q / p);
            let r = q % p;
            q = p;
            p = r;
        }
        out
    }

    #[test]
    fn expands_examples() {
        assert!(cf_expand_rational(&Rational::zero()).unwrap().is_empty());
        assert_eq!(cf_expand_rational(&ratio(2, 5)).unwrap(), w("2,2"));
        assert_eq!(
            cf_expand_rational(&ratio(3, 10)).unwrap().digits(),
            euclid_digits(3, 10).as_slice()
        );
        assert_eq!(cf_expand_rational(&ratio(3, 10)).unwrap(), w("3,3"));
    }

    #[test]
    fn expansion_domain_errors() {
        assert!(matches!(cf_expand_rational(&int(1)), Err(Error::Domain(_))));
        assert!(matches!(cf_expand_rational(&ratio(-1, 3)), Err(Error::Domain(_))));
        assert!(matches!(gauss_step(&ratio(3, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn expansion_overflow_is_reported() {
        let tiny = Rational::new(BigInt::one(), BigInt::from(u64::MAX) * 4u32);
        assert_eq!(cf_expand_rational(&tiny), Err(Error::DigitOverflow));
    }

    #[test]
    fn gauss_step_examples() {
        assert_eq!(gauss_step(&ratio(1, 2)).unwrap(), Rational::zero());
        assert_eq!(gauss_step(&ratio(2, 5)).unwrap(), ratio(1, 2));
        assert_eq!(gauss_step(&Rational::zero()).unwrap(), Rational::zero());
    }

    #[test]
    fn convergent_examples() {
        let qs: Vec<u32> = convergents(&w("1,1,1,1"))
            .iter()
            .map(|(_, q)| q.to_u32().unwrap())
            .collect();
        assert_eq!(qs, vec![1, 1, 2, 3, 5]);
        let c = convergents(&w("2,2"));
        assert_eq!(c[2], (BigUint::from(2u32), BigUint::from(5u32)));
        assert_eq!(
            convergents(&Word::empty()),
            vec![(BigUint::zero(), BigUint::one())]
        );
    }

    #[test]
    fn cylinder_examples() {
        let c = cylinder(&w("2"));
        assert_eq!((c.lo.clone(), c.hi.clone()), (ratio(1, 3), ratio(1, 2)));
        assert_eq!(c.length(), ratio(1, 6));
        let c = cylinder(&w("2,2"));
        assert_eq!((c.lo.clone(), c.hi.clone()), (ratio(2, 5), ratio(3, 7)));
        assert_eq!(c.length(), ratio(1, 35));
        let c = cylinder(&w("1"));
        assert_eq!((c.lo.clone(), c.hi.clone()), (ratio(1, 2), int(1)));
        assert_eq!(c.length(), ratio(1, 2));
        let c = cylinder(&Word::empty());
        assert_eq!((c.lo, c.hi), (Rational::zero(), int(1)));
    }

    #[test]
    fn word_value_round_trips_expansion() {
        for (p, q) in [(2, 5), (3, 10), (13, 31), (1, 7), (999, 1000)] {
            let x = ratio(p, q);
            assert_eq!(cf_expand_rational(&x).unwrap().value(), x);
        }
    }

    #[test]
    fn gauss_measure_examples() {
        let m = gauss_measure(&Interval::unit(), 50).unwrap();
        assert!(m.abs_diff(&Precise::from_rational(&int(1), 50)) <= m.error_bound());
        let i1 = cylinder(&w("1")).interval();
        let m = gauss_measure(&i1, 50).unwrap();
        assert_eq!(m.to_decimal_prefix(7), "0.4150374");
        let half = Interval::closed(Rational::zero(), ratio(1, 2)).unwrap();
        let m = gauss_measure(&half, 50).unwrap();
        assert_eq!(m.to_decimal_prefix(7), "0.5849625");
        // both pieces add to one
        let m1 = gauss_measure(&Interval::closed(ratio(1, 2), int(1)).unwrap(), 50).unwrap();
        let total = m.to_rational() + m1.to_rational();
        assert!((total - int(1)).abs() <= m.error_bound() * int(2));
    }

    #[test]
    fn gauss_measure_rejects_outside_unit() {
        let iv = Interval::closed(ratio(1, 2), ratio(3, 2)).unwrap();
        assert!(matches!(gauss_measure(&iv, 20), Err(Error::Domain(_))));
    }

    #[test]
    fn quasi_mult_examples() {
        assert_eq!(quasi_mult_ratio(&w("1"), &w("1")).unwrap(), ratio(2, 3));
        assert_eq!(quasi_mult_ratio(&w("2"), &w("2")).unwrap(), ratio(36, 35));
        assert!(quasi_mult_ratio(&Word::empty(), &w("1")).is_err());
    }

    #[test]
    fn drop_ratio_examples() {
        assert_eq!(drop_digit_ratio(&w("3"), 1).unwrap(), int(3));
        assert_eq!(drop_digit_ratio(&w("2,2"), 1).unwrap(), ratio(5, 2));
        let r = drop_digit_ratio(&w("1,4,1"), 2).unwrap();
        assert!(r >= ratio(5, 2) && r <= int(5), "{r}");
        assert!(matches!(
            drop_digit_ratio(&w("1,2"), 3),
            Err(Error::IndexOutOfRange { index: 3, len: 2 })
        ));
        assert!(drop_digit_ratio(&w("1,2"), 0).is_err());
    }

    #[test]
    fn word_rejects_zero_digit() {
        assert!(Word::new(vec![1, 0]).is_err());
        assert!("1,x".parse::<Word>().is_err());
        assert_eq!("".parse::<Word>().unwrap(), Word::empty());
    }

    #[test]
    fn partition_identity_with_residual() {
        // Σ_{i≤K} |I(w i)| + |residual| = |I(w)|, the residual being the
        // part of I(w) between [w, K+1] and the endpoint p_n/q_n.
        for word in ["", "1", "2,3", "1,1,4", "5,1,2,2"] {
            let word = w(word);
            let c = cylinder(&word);
            let pn = Rational::new(BigInt::from(c.p.clone()), BigInt::from(c.q.clone()));
            for k in [1u64, 2, 7, 30] {
                let sum: Rational = (1..=k)
                    .map(|i| cylinder_length(&word.concat(&Word::new(vec![i]).unwrap())))
                    .sum();
                let edge = Rational::new(
                    BigInt::from(&c.p * (k + 1) + &c.p_prev),
                    BigInt::from(&c.q * (k + 1) + &c.q_prev),
                );
                let residual = (edge - &pn).abs();
                assert_eq!(sum + residual, c.length(), "w={word} K={k}");
            }
        }
    }

    #[test]
    fn gauss_step_commutes_with_shift_on_interior_points() {
        for word in ["2,2", "1,3,1", "4,1,1,2", "1,1,1,1,1"] {
            let word = w(word);
            let c = cylinder(&word);
            let shifted = cylinder(&word.shift());
            for (a, b) in [(1, 2), (1, 3), (2, 3), (7, 11)] {
                // interior point lo + (a/b)(hi - lo)
                let x = &c.lo + c.length() * ratio(a, b);
                assert!(c.contains_interior(&x));
                let tx = gauss_step(&x).unwrap();
                assert!(shifted.contains_interior(&tx), "w={word}");
            }
        }
    }
}
