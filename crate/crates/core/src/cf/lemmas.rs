//! Exhaustive small-range checks of the cylinder inequalities.
//!
//! Each battery enumerates every word over `{1..max_digit}` up to a length
//! and reports failures instead of panicking, so the same code backs the
//! test suite and `lemma-check` on the command line.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use super::{cylinder, Digit, Word, LAMBDA};
use crate::rational::{serialize_pq, Rational};

const MAX_RECORDED_FAILURES: usize = 32;

/// Lexicographic enumeration of `{1..max_digit}^len`.
#[derive(Debug, Clone)]
pub struct WordOdometer {
    max_digit: Digit,
    current: Option<Vec<Digit>>,
}

impl WordOdometer {
    pub fn new(max_digit: Digit, len: usize) -> Self {
        WordOdometer {
            max_digit,
            current: if max_digit == 0 { None } else { Some(vec![1; len]) },
        }
    }
}

impl Iterator for WordOdometer {
    type Item = Vec<Digit>;

    fn next(&mut self) -> Option<Vec<Digit>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if cur[i] < self.max_digit {
                cur[i] += 1;
                break;
            }
            cur[i] = 1;
        }
        Some(out)
    }
}

/// `(q_{n-1}, q_n)` in machine integers.
pub(crate) fn q_pair(digits: &[Digit]) -> (u128, u128) {
    let (mut qp, mut q) = (0u128, 1u128);
    for &a in digits {
        let next = q * a as u128 + qp;
        qp = q;
        q = next;
    }
    (qp, q)
}

/// `q_n (q_n + q_{n-1})`, the reciprocal of `|I(w)|`.
pub(crate) fn inv_length(digits: &[Digit]) -> u128 {
    let (qp, q) = q_pair(digits);
    q * (q + qp)
}

#[derive(Debug, Clone, Serialize)]
pub struct CylinderBattery {
    pub max_digit: Digit,
    pub max_len: usize,
    pub cylinders: u64,
    pub drop_checks: u64,
    pub failures: u64,
    pub examples: Vec<String>,
}

impl CylinderBattery {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn fail(&mut self, msg: String) {
        self.failures += 1;
        if self.examples.len() < MAX_RECORDED_FAILURES {
            self.examples.push(msg);
        }
    }
}

/// Checks, for every word with digits ≤ `max_digit` and length 1..=`max_len`:
/// the exact length identity, `q_n² ≥ 2^{n-1}`, the parity rule for the left
/// endpoint, nesting in the parent cylinder, and
/// `(a_k+1)/2 ≤ q_n(w)/q_{n-1}(w \ a_k) ≤ a_k+1` for every k.
pub fn cylinder_battery(max_digit: Digit, max_len: usize) -> CylinderBattery {
    let mut rep = CylinderBattery {
        max_digit,
        max_len,
        cylinders: 0,
        drop_checks: 0,
        failures: 0,
        examples: vec![],
    };
    for len in 1..=max_len {
        for digits in WordOdometer::new(max_digit, len) {
            rep.cylinders += 1;
            let word = Word::from_vec_unchecked(digits);
            let c = cylinder(&word);
            let n = word.len();

            let expected = Rational::new(
                BigInt::one(),
                BigInt::from(&c.q * (&c.q + &c.q_prev)),
            );
            if c.length() != expected {
                rep.fail(format!("length identity fails for ({word})"));
            }

            let q2 = &c.q * &c.q;
            if q2 < (num_bigint::BigUint::one() << (n - 1)) {
                rep.fail(format!("q_n^2 < 2^(n-1) for ({word})"));
            }

            // p_n/q_n < (p_n+p_{n-1})/(q_n+q_{n-1}) exactly when n is even
            let lhs = &c.p * (&c.q + &c.q_prev);
            let rhs = (&c.p + &c.p_prev) * &c.q;
            if (lhs < rhs) != n.is_multiple_of(2) {
                rep.fail(format!("endpoint parity fails for ({word})"));
            }

            let parent = cylinder(&word.prefix(n - 1));
            if c.lo < parent.lo || c.hi > parent.hi {
                rep.fail(format!("({word}) not nested in its parent"));
            }

            let (_, qn) = q_pair(word.digits());
            for k in 0..n {
                rep.drop_checks += 1;
                let mut reduced = word.digits().to_vec();
                let ak = reduced.remove(k) as u128;
                let (_, qr) = q_pair(&reduced);
                // (a_k+1)/2 <= qn/qr <= a_k+1
                if 2 * qn < (ak + 1) * qr || qn > (ak + 1) * qr {
                    rep.fail(format!("drop-digit ratio out of range for ({word}), k={}", k + 1));
                }
            }
        }
    }
    rep
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiMultBattery {
    pub max_digit: Digit,
    pub max_total_len: usize,
    pub lambda: u64,
    pub pairs: u64,
    #[serde(serialize_with = "serialize_pq")]
    pub min_ratio: Rational,
    #[serde(serialize_with = "serialize_pq")]
    pub max_ratio: Rational,
    pub failures: u64,
    pub examples: Vec<String>,
}

impl QuasiMultBattery {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Every split `w = uv` (both nonempty) of every word of total length
/// 2..=`max_total_len`: `1/λ ≤ |I(uv)| / (|I(u)||I(v)|) ≤ λ/2`.
///
/// The upper bound is `λ/2 = 4`; the ratio is `a/b` with
/// `a = |I(u)|^{-1}|I(v)|^{-1}` and `b = |I(uv)|^{-1}`, compared by
/// cross-multiplication.
pub fn quasi_mult_battery(max_digit: Digit, max_total_len: usize) -> QuasiMultBattery {
    let lambda = LAMBDA as u128;
    let upper = lambda / 2;
    let mut pairs = 0u64;
    let mut failures = 0u64;
    let mut examples = vec![];
    // running extremes as (num, den)
    let mut min: Option<(u128, u128)> = None;
    let mut max: Option<(u128, u128)> = None;
    for len in 2..=max_total_len {
        for digits in WordOdometer::new(max_digit, len) {
            let whole = inv_length(&digits);
            for split in 1..len {
                pairs += 1;
                let num = inv_length(&digits[..split]) * inv_length(&digits[split..]);
                let den = whole;
                if num * lambda < den || num > upper * den {
                    failures += 1;
                    if examples.len() < MAX_RECORDED_FAILURES {
                        examples.push(format!("{:?} split at {split}", digits));
                    }
                }
                if min.is_none_or(|(a, b)| num * b < a * den) {
                    min = Some((num, den));
                }
                if max.is_none_or(|(a, b)| num * b > a * den) {
                    max = Some((num, den));
                }
            }
        }
    }
    let to_rat = |x: Option<(u128, u128)>| {
        x.map(|(a, b)| Rational::new(BigInt::from(a), BigInt::from(b)))
            .unwrap_or_else(Rational::one)
    };
    QuasiMultBattery {
        max_digit,
        max_total_len,
        lambda: LAMBDA,
        pairs,
        min_ratio: to_rat(min),
        max_ratio: to_rat(max),
        failures,
        examples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{drop_digit_ratio, quasi_mult_ratio};
    use crate::rational::{int, ratio};

    #[test]
    fn odometer_counts() {
        assert_eq!(WordOdometer::new(3, 4).count(), 81);
        assert_eq!(WordOdometer::new(2, 0).count(), 1);
        let v: Vec<_> = WordOdometer::new(2, 2).collect();
        assert_eq!(v, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
    }

    #[test]
    fn small_cylinder_battery_passes() {
        let rep = cylinder_battery(4, 4);
        assert!(rep.passed(), "{:?}", rep.examples);
        assert_eq!(rep.cylinders, 4 + 16 + 64 + 256);
    }

    #[test]
    fn fast_quasi_mult_agrees_with_rational_route() {
        let rep = quasi_mult_battery(3, 4);
        assert!(rep.passed());
        let mut lo = int(100);
        let mut hi = int(0);
        for len in 2..=4 {
            for d in WordOdometer::new(3, len) {
                for s in 1..len {
                    let u = Word::new(d[..s].to_vec()).unwrap();
                    let v = Word::new(d[s..].to_vec()).unwrap();
                    let r = quasi_mult_ratio(&u, &v).unwrap();
                    lo = lo.min(r.clone());
                    hi = hi.max(r);
                }
            }
        }
        assert_eq!(rep.min_ratio, lo);
        assert_eq!(rep.max_ratio, hi);
    }

    #[test]
    fn quasi_mult_extremes_at_smallest_case() {
        // only (1)(1), (1)(2), (2)(1), (2)(2)
        let rep = quasi_mult_battery(2, 2);
        assert_eq!(rep.pairs, 4);
        assert_eq!(rep.min_ratio, ratio(2, 3));
    }

    #[test]
    fn drop_ratio_bounds_hold_through_public_op() {
        for len in 1..=4 {
            for d in WordOdometer::new(4, len) {
                let w = Word::new(d.clone()).unwrap();
                for k in 1..=len {
                    let r = drop_digit_ratio(&w, k).unwrap();
                    let a = int(d[k - 1] + 1);
                    assert!(r >= &a / int(2) && r <= a, "w={w} k={k}");
                }
            }
        }
    }
}
