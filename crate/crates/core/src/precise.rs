//! Fixed-point decimal reals with a stated absolute error.
//!
//! Values are `scaled / 10^digits`. Logarithms are computed from the series
//! `ln(r) = k ln 2 + 2 atanh((m-1)/(m+1))` with `m = r / 2^k ∈ [1, 2)`, so the
//! atanh argument never exceeds 1/3 and every term shrinks by at least 9×.
//! All work happens with [`GUARD_DIGITS`] extra digits and is rounded once.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub const DEFAULT_DIGITS: u32 = 50;

/// Extra working digits. Each series evaluation loses at most ~(terms)²
/// units in the last working place; with p ≤ 2000 that is < 10^8 units, far
/// below the 10^16 headroom.
pub const GUARD_DIGITS: u32 = 16;

/// A decimal approximation `scaled / 10^digits` whose distance to the true
/// value is less than `10^-digits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precise {
    scaled: BigInt,
    digits: u32,
}

fn pow10(d: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), d as usize)
}

/// Divides and rounds to nearest.
fn div_round(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_mod_floor(d);
    if r * 2 >= *d {
        q + 1
    } else {
        q
    }
}

/// Working-precision value scaled by `10^w`.
#[derive(Debug, Clone)]
struct Fixed {
    v: BigInt,
    scale: BigInt,
}

impl Fixed {
    fn from_rational(r: &Rational, scale: &BigInt) -> Fixed {
        Fixed {
            v: div_round(&(r.numer() * scale), r.denom()),
            scale: scale.clone(),
        }
    }

    fn sub(&self, o: &Fixed) -> Fixed {
        Fixed {
            v: &self.v - &o.v,
            scale: self.scale.clone(),
        }
    }

    fn mul(&self, o: &Fixed) -> Fixed {
        Fixed {
            v: div_round(&(&self.v * &o.v), &self.scale),
            scale: self.scale.clone(),
        }
    }

    fn div(&self, o: &Fixed) -> Fixed {
        Fixed {
            v: div_round(&(&self.v * &self.scale), &o.v),
            scale: self.scale.clone(),
        }
    }

    fn round_to(&self, digits: u32) -> Precise {
        Precise {
            scaled: div_round(&self.v, &pow10(GUARD_DIGITS)),
            digits,
        }
    }
}

/// `2 atanh(num/den)` scaled by `scale`, for `0 ≤ num/den ≤ 1/3`.
fn two_atanh(num: &BigInt, den: &BigInt, scale: &BigInt) -> BigInt {
    let num2 = num * num;
    let den2 = den * den;
    let mut power: BigInt = (scale * num * 2u32) / den;
    let mut sum = BigInt::zero();
    let mut k = 1u32;
    while !power.is_zero() {
        sum += &power / k;
        power = power * &num2 / &den2;
        k += 2;
    }
    sum
}

fn ln2_fixed(scale: &BigInt) -> BigInt {
    two_atanh(&BigInt::one(), &BigInt::from(3), scale)
}

/// `ln r` at working scale, `r > 0`.
fn ln_fixed(r: &Rational, scale: &BigInt, ln2: &BigInt) -> BigInt {
    // r = (n/d) 2^k with n/d in [1, 2)
    let mut n = r.numer().clone();
    let mut d = r.denom().clone();
    let mut k: i64 = n.bits() as i64 - d.bits() as i64;
    if k > 0 {
        d <<= k as usize;
    } else if k < 0 {
        n <<= (-k) as usize;
    }
    if n < d {
        n <<= 1;
        k -= 1;
    } else if n >= &d * 2u32 {
        d <<= 1;
        k += 1;
    }
    let z_num = &n - &d;
    let z_den = &n + &d;
    two_atanh(&z_num, &z_den, scale) + ln2 * BigInt::from(k)
}

impl Precise {
    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Error bound `10^-digits` as a rational.
    pub fn error_bound(&self) -> Rational {
        Rational::new(BigInt::one(), pow10(self.digits))
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.scaled.clone(), pow10(self.digits))
    }

    pub fn to_f64(&self) -> f64 {
        crate::rational::approx(&self.to_rational())
    }

    pub fn from_rational(r: &Rational, digits: u32) -> Precise {
        Precise {
            scaled: div_round(&(r.numer() * pow10(digits)), r.denom()),
            digits,
        }
    }

    /// `|self - other|` as an exact rational (of the two approximations).
    pub fn abs_diff(&self, other: &Precise) -> Rational {
        (self.to_rational() - other.to_rational()).abs()
    }

    /// `ln r`, `r > 0`.
    pub fn ln(r: &Rational, digits: u32) -> Result<Precise> {
        if !r.is_positive() {
            return Err(Error::Domain("logarithm of a non-positive number".into()));
        }
        let scale = pow10(digits + GUARD_DIGITS);
        let ln2 = ln2_fixed(&scale);
        let v = ln_fixed(r, &scale, &ln2);
        Ok(Fixed { v, scale }.round_to(digits))
    }

    pub fn ln2(digits: u32) -> Precise {
        let scale = pow10(digits + GUARD_DIGITS);
        Fixed {
            v: ln2_fixed(&scale),
            scale,
        }
        .round_to(digits)
    }

    /// `log_2(b / a)` for `0 < a ≤ b`: the Gauss measure of `[a - 1, b - 1]`.
    pub fn log2_ratio(a: &Rational, b: &Rational, digits: u32) -> Result<Precise> {
        Self::log2_ratio_sum(std::iter::once((a.clone(), b.clone())), digits)
    }

    /// `Σ log_2(b_i / a_i)`, evaluated with a single final rounding.
    pub fn log2_ratio_sum(
        pairs: impl IntoIterator<Item = (Rational, Rational)>,
        digits: u32,
    ) -> Result<Precise> {
        // extra guard digits for long sums
        let scale = pow10(digits + GUARD_DIGITS + 6);
        let ln2 = ln2_fixed(&scale);
        let mut acc = BigInt::zero();
        for (a, b) in pairs {
            if !a.is_positive() || b < a {
                return Err(Error::Domain("log ratio needs 0 < a <= b".into()));
            }
            acc += ln_fixed(&b, &scale, &ln2) - ln_fixed(&a, &scale, &ln2);
        }
        let v = Fixed {
            v: acc,
            scale: scale.clone(),
        }
        .div(&Fixed { v: ln2, scale });
        Ok(Precise {
            scaled: div_round(&v.v, &pow10(GUARD_DIGITS + 6)),
            digits,
        })
    }

    /// `1 - 1/(a · ln b)` for positive integers; used by the Jarnik bracket.
    pub fn one_minus_inv_mul_ln(a: u64, b: u64, digits: u32) -> Result<Precise> {
        if a == 0 || b < 2 {
            return Err(Error::Domain("need a >= 1 and b >= 2".into()));
        }
        let scale = pow10(digits + GUARD_DIGITS);
        let ln2 = ln2_fixed(&scale);
        let lnb = Fixed {
            v: ln_fixed(&crate::rational::int(b), &scale, &ln2),
            scale: scale.clone(),
        };
        let one = Fixed::from_rational(&Rational::one(), &scale);
        let a_fixed = Fixed::from_rational(&crate::rational::int(a), &scale);
        let denom = a_fixed.mul(&lnb);
        Ok(one.sub(&one.div(&denom)).round_to(digits))
    }
}

impl fmt::Display for Precise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = self.scaled.is_negative();
        let mag = self.scaled.abs();
        let unit = pow10(self.digits);
        let (whole, frac) = mag.div_rem(&unit);
        let frac = frac.to_string();
        let pad = self.digits as usize - frac.len();
        write!(
            f,
            "{}{}.{}{}",
            if neg { "-" } else { "" },
            whole,
            "0".repeat(pad),
            frac
        )
    }
}

impl Serialize for Precise {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Precise {
    /// Truncated decimal view, handy in assertions.
    pub fn to_decimal_prefix(&self, places: usize) -> String {
        let s = self.to_string();
        let dot = s.find('.').unwrap_or(s.len());
        s[..(dot + 1 + places).min(s.len())].to_string()
    }

    pub fn scaled_i128(&self) -> Option<i128> {
        self.scaled.to_i128()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    // ln 2 to 60 places (OEIS A002162)
    const LN2_60: &str = "0.693147180559945309417232121458176568075500134360255254120680";

    #[test]
    fn ln2_matches_reference_digits() {
        let v = Precise::ln2(60);
        assert_eq!(v.to_string(), LN2_60);
    }

    #[test]
    fn ln_of_ten_matches_reference() {
        // ln 10 = 2.302585092994045684017991454684364207601101488628772976033327...
        let v = Precise::ln(&int(10), 50).unwrap();
        assert_eq!(
            v.to_decimal_prefix(48),
            "2.302585092994045684017991454684364207601101488628"
        );
    }

    #[test]
    fn ln_below_one_is_negative() {
        let v = Precise::ln(&ratio(1, 2), 30).unwrap();
        assert_eq!(v.to_string(), "-0.693147180559945309417232121458");
        assert!(Precise::ln(&Rational::zero(), 10).is_err());
    }

    #[test]
    fn log2_ratio_of_powers_of_two_is_exact_to_precision() {
        let v = Precise::log2_ratio(&int(1), &int(8), 40).unwrap();
        assert!(v.abs_diff(&Precise::from_rational(&int(3), 40)) <= v.error_bound());
    }

    #[test]
    fn jarnik_expression_at_eight() {
        // 1 - 1/(8 ln 2) and 1 - 1/(64 ln 8), checked against an f64 evaluation
        let lo = Precise::one_minus_inv_mul_ln(8, 2, 30).unwrap();
        let hi = Precise::one_minus_inv_mul_ln(64, 8, 30).unwrap();
        assert!((lo.to_f64() - (1.0 - 1.0 / (8.0 * 2f64.ln()))).abs() < 1e-15);
        assert!((hi.to_f64() - (1.0 - 1.0 / (64.0 * 8f64.ln()))).abs() < 1e-15);
    }
}
