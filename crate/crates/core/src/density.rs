//! Word-occurrence scans, certified digit samples of Lebesgue-random points,
//! Gauss-measure invariance, and points of bounded type in given intervals.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf::lemmas::WordOdometer;
use crate::cf::{cf_expand_rational, cylinder, Digit, Word};
use crate::error::{Error, Result};
use crate::precise::Precise;
use crate::rational::{int, serialize_pq, Interval, Rational};

pub const DEFAULT_BITS: u32 = 512;
pub const MAX_RESAMPLES: u32 = 16;
pub const DEFAULT_MAX_WORD_LEN: usize = 4096;

/// Per-sample generator: stream `index` of the root generator yields the
/// sample seed, which in turn seeds the sample's own generator.
pub fn sample_seed(root: u64, index: u64) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(root);
    r.set_stream(index);
    r.next_u64()
}

pub fn sample_rng(root: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sample_seed(root, index))
}

// ---------------------------------------------------------------------------
// word scans

/// Smallest 1-based `i` with `digits[i..i+|u|-1] = u`.
pub fn word_occurs(digits: &[Digit], u: &[Digit]) -> Option<usize> {
    if u.is_empty() {
        return Some(1);
    }
    digits.windows(u.len()).position(|w| w == u).map(|i| i + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub k_max: usize,
    #[serde(rename = "M_max")]
    pub m_max: Digit,
    pub horizon: usize,
    pub scanned: u64,
    pub missing: Vec<Word>,
}

/// All words over `{1..M_max}` of length `1..=k_max` that never occur in
/// `digits`.
pub fn coverage_scan(digits: &[Digit], k_max: usize, m_max: Digit, budget: u64) -> Result<CoverageReport> {
    if k_max == 0 || m_max == 0 {
        return Err(Error::Domain("k_max and M_max must be >= 1".into()));
    }
    if digits.len() < k_max {
        return Err(Error::Precondition(format!(
            "horizon {} is shorter than k_max = {k_max}",
            digits.len()
        )));
    }
    let total: u128 = (1..=k_max as u32).map(|k| (m_max as u128).saturating_pow(k)).sum();
    if total > budget as u128 {
        return Err(Error::Budget {
            what: "coverage scan words",
            needed: total,
            limit: budget as u128,
        });
    }
    let mut seen: HashSet<&[Digit]> = HashSet::new();
    for k in 1..=k_max {
        for w in digits.windows(k) {
            if w.iter().all(|&d| d <= m_max) {
                seen.insert(w);
            }
        }
    }
    let mut missing = vec![];
    for k in 1..=k_max {
        for w in WordOdometer::new(m_max, k) {
            if !seen.contains(w.as_slice()) {
                missing.push(Word::from_vec_unchecked(w));
            }
        }
    }
    Ok(CoverageReport {
        k_max,
        m_max,
        horizon: digits.len(),
        scanned: total as u64,
        missing,
    })
}

// ---------------------------------------------------------------------------
// certified samples

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleSource {
    UniformDyadic { bits: u32, seed: u64 },
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigitSample {
    pub digits: Word,
    pub source: SampleSource,
    /// dyadic cells rejected because they straddled a cylinder boundary
    pub resamples: u32,
}

impl DigitSample {
    pub fn explicit(digits: Word) -> Self {
        DigitSample {
            digits,
            source: SampleSource::Explicit,
            resamples: 0,
        }
    }
}

/// Longest `w` (up to `want` digits) with `closure(I(w)) ⊇ [j/2^B, (j+1)/2^B]`.
///
/// Every point of the cell then has `w` as the prefix of its expansion.
pub fn certify_dyadic(j: &BigUint, bits: u32, want: usize) -> Word {
    let scale = BigInt::one() << bits as usize;
    let lo = BigInt::from(j.clone());
    let hi = &lo + 1;
    let digits = midpoint_digits(&(&lo * 2 + 1), &(&scale * 2), want);
    let (mut pp, mut p) = (BigInt::one(), BigInt::zero());
    let (mut qp, mut q) = (BigInt::zero(), BigInt::one());
    let mut certified = 0;
    for (k, &a) in digits.iter().enumerate() {
        let a = BigInt::from(a);
        (pp, p) = (p.clone(), &p * &a + &pp);
        (qp, q) = (q.clone(), &q * &a + &qp);
        // endpoints p/q and (p+pp)/(q+qp); compare cell ends to both
        let (e1n, e1d) = (&p, &q);
        let (e2n, e2d) = (&p + &pp, &q + &qp);
        let (ln, ld, hn, hd) = if k % 2 == 1 {
            (e1n.clone(), e1d.clone(), e2n, e2d)
        } else {
            (e2n, e2d, e1n.clone(), e1d.clone())
        };
        // ln/ld ≤ lo/scale and hi/scale ≤ hn/hd
        if &ln * &scale <= &lo * &ld && &hi * &hd <= &hn * &scale {
            certified = k + 1;
        } else {
            break;
        }
    }
    Word::from_vec_unchecked(digits[..certified].to_vec())
}

/// Up to `want` CF digits of `num/den ∈ (0, 1)`, stopping early at a
/// partial quotient too large for a digit.
fn midpoint_digits(num: &BigInt, den: &BigInt, want: usize) -> Vec<Digit> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let (mut n, mut d) = (num.clone(), den.clone());
    let mut out = vec![];
    while out.len() < want && !n.is_zero() {
        let (a, r) = d.div_rem(&n);
        match a.to_u64() {
            Some(a) => out.push(a),
            None => break,
        }
        d = n;
        n = r;
    }
    out
}

fn draw_cell(rng: &mut ChaCha8Rng, bits: u32) -> BigUint {
    let words = bits.div_ceil(64) as usize;
    let mut limbs: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
    let extra = words as u32 * 64 - bits;
    if extra > 0 {
        *limbs.last_mut().unwrap() >>= extra;
    }
    let bytes: Vec<u8> = limbs.iter().flat_map(|l| l.to_le_bytes()).collect();
    BigUint::from_bytes_le(&bytes)
}

/// Suggested precision for `n` digits (typical depth is about `B / 3.42`).
pub fn suggested_bits(n_digits: usize) -> u32 {
    (n_digits as f64 * 3.6).ceil() as u32 + 64
}

/// `n_digits` certified digits of a uniform dyadic point `j / 2^B`.
pub fn sample_digits(seed: u64, n_digits: usize, bits: u32) -> Result<DigitSample> {
    if bits + 1 < n_digits as u32 {
        // |I(w)| ≤ 2^{-(n-1)} forces B ≥ n - 1
        return Err(Error::Certification {
            achieved: 0,
            required: n_digits,
            suggested_bits: suggested_bits(n_digits),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for attempt in 0..MAX_RESAMPLES {
        let j = draw_cell(&mut rng, bits);
        let w = certify_dyadic(&j, bits, n_digits);
        if w.len() >= n_digits {
            return Ok(DigitSample {
                digits: w,
                source: SampleSource::UniformDyadic { bits, seed },
                resamples: attempt,
            });
        }
        best = best.max(w.len());
    }
    Err(Error::Certification {
        achieved: best,
        required: n_digits,
        suggested_bits: suggested_bits(n_digits),
    })
}

/// Samples `0..count` from a root seed; the result does not depend on
/// the thread count.
pub fn sample_batch(root: u64, count: usize, n_digits: usize, bits: u32) -> Result<Vec<DigitSample>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| sample_digits(sample_seed(root, i), n_digits, bits))
        .collect()
}

/// One line of a sample corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub seed: u64,
    #[serde(rename = "B")]
    pub bits: u32,
    pub digits: Vec<Digit>,
}

impl SampleRecord {
    pub fn from_sample(s: &DigitSample) -> Option<Self> {
        match s.source {
            SampleSource::UniformDyadic { bits, seed } => Some(SampleRecord {
                seed,
                bits,
                digits: s.digits.digits().to_vec(),
            }),
            SampleSource::Explicit => None,
        }
    }

    /// Re-derives the digits from `seed` and `B`.
    pub fn replays(&self) -> Result<bool> {
        let s = sample_digits(self.seed, self.digits.len(), self.bits)?;
        Ok(s.digits.digits() == self.digits.as_slice())
    }
}

pub fn write_ndjson(samples: &[DigitSample], mut out: impl Write) -> Result<()> {
    for s in samples {
        if let Some(r) = SampleRecord::from_sample(s) {
            let line = serde_json::to_string(&r).map_err(|e| Error::Parse(e.to_string()))?;
            writeln!(out, "{line}").map_err(|e| Error::Parse(e.to_string()))?;
        }
    }
    Ok(())
}

pub fn read_ndjson(input: impl BufRead) -> Result<Vec<SampleRecord>> {
    let mut v = vec![];
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: SampleRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        if r.digits.contains(&0) {
            return Err(Error::Parse(format!("line {}: zero digit", i + 1)));
        }
        v.push(r);
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DigitOneStats {
    pub samples: usize,
    pub n_digits: usize,
    pub bits: u32,
    pub with_one: usize,
    pub fraction: f64,
    pub resamples: u64,
}

/// How many samples contain the digit 1 among their first `n_digits`.
pub fn digit_one_fraction(root: u64, samples: usize, n_digits: usize, bits: u32) -> Result<DigitOneStats> {
    let batch = sample_batch(root, samples, n_digits, bits)?;
    let with_one = batch
        .iter()
        .filter(|s| word_occurs(s.digits.digits(), &[1]).is_some())
        .count();
    Ok(DigitOneStats {
        samples,
        n_digits,
        bits,
        with_one,
        fraction: with_one as f64 / samples.max(1) as f64,
        resamples: batch.iter().map(|s| s.resamples as u64).sum(),
    })
}

// ---------------------------------------------------------------------------
// invariance

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvarianceCheck {
    pub branches: u64,
    /// `Σ_{k ≤ K} μ([1/(k+b), 1/(k+a)])`
    pub lhs: Precise,
    /// `μ([a, b])`
    pub rhs: Precise,
    /// `μ((0, 1/(K+1+a)])` plus the rounding of both sides
    #[serde(serialize_with = "serialize_pq")]
    pub residual: Rational,
    pub within: bool,
}

/// Compares `μ(T^{-1} iv)` over the first `K` branches with `μ(iv)`.
pub fn invariance_check(iv: &Interval, branches: u64, digits: u32) -> Result<InvarianceCheck> {
    if !iv.within_unit() {
        return Err(Error::Domain(format!("{iv} is not inside [0, 1]")));
    }
    if branches == 0 {
        return Err(Error::Domain("need at least one branch".into()));
    }
    let (a, b) = (&iv.lo, &iv.hi);
    // μ([1/(k+b), 1/(k+a)]) = log2 ((k+a+1)(k+b) / ((k+a)(k+b+1)))
    let pairs = (1..=branches).map(|k| {
        let k = int(k);
        let ka = &k + a;
        let kb = &k + b;
        (&ka * (&kb + int(1)), (&ka + int(1)) * &kb)
    });
    let lhs = Precise::log2_ratio_sum(pairs, digits)?;
    let one = int(1);
    let rhs = Precise::log2_ratio(&(&one + a), &(&one + b), digits)?;
    let cut = &one / (int(branches + 1) + a);
    let tail = Precise::log2_ratio(&one, &(&one + &cut), digits)?;
    let residual = tail.to_rational() + tail.error_bound() + lhs.error_bound() + rhs.error_bound();
    let diff = lhs.abs_diff(&rhs);
    Ok(InvarianceCheck {
        branches,
        within: diff <= residual,
        lhs,
        rhs,
        residual,
    })
}

// ---------------------------------------------------------------------------
// bounded-type points

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundedPoint {
    /// `I(w) ⊆ iv`, so `[w, 1, 1, 1, …] ∈ iv`
    pub word: Word,
    /// every digit of `[w, 1, 1, …]` is at most this
    pub bound: Digit,
    pub cylinder: Interval,
}

impl BoundedPoint {
    /// First `n` digits of `[w, 1, 1, 1, …]`.
    pub fn digits(&self, n: usize) -> Vec<Digit> {
        let mut d = self.word.digits().to_vec();
        d.resize(n.max(d.len()), 1);
        d.truncate(n);
        d
    }

    /// Words over `{1..bound+1}` missing from the point's first `horizon`
    /// digits; nonempty because `bound+1` never occurs.
    pub fn missing_word_certificate(&self, horizon: usize) -> Result<CoverageReport> {
        coverage_scan(&self.digits(horizon.max(1)), 1, self.bound + 1, u64::MAX)
    }
}

/// Finds `w` with `I(w) ⊆ iv` by following the CF digits of the midpoint.
///
/// If the midpoint's expansion runs out, its value is an endpoint of every
/// deeper cylinder, and digits `1, 2, 4, …` are appended until the cylinder
/// shrinks into `iv`.
pub fn bounded_point_in_interval(iv: &Interval, max_len: usize) -> Result<BoundedPoint> {
    if iv.lo.is_negative() || iv.hi > Rational::one() || iv.lo >= iv.hi {
        return Err(Error::Domain(format!(
            "{iv} must be a subinterval of [0, 1] with positive length"
        )));
    }
    let mid = iv.midpoint();
    let digits = cf_expand_rational(&mid)?;
    let done = |w: &Word| {
        let c = cylinder(w).interval();
        c.is_subset_of(iv).then_some(c)
    };
    let finish = |w: Word, c: Interval| BoundedPoint {
        bound: w.max_digit().unwrap_or(1).max(1),
        word: w,
        cylinder: c,
    };
    let mut w = Word::empty();
    for &a in digits.digits().iter().take(max_len) {
        w.push(a)?;
        if let Some(c) = done(&w) {
            return Ok(finish(w, c));
        }
    }
    if w.len() < max_len {
        let mut d: Digit = 1;
        loop {
            let mut v = w.clone();
            v.push(d)?;
            if let Some(c) = done(&v) {
                return Ok(finish(v, c));
            }
            d = d.checked_mul(2).ok_or(Error::DigitOverflow)?;
        }
    }
    Err(Error::Precondition(format!(
        "no cylinder inside {iv} within {max_len} digits; reached {}",
        cylinder(&w).interval()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::symbolic::{delta_map, SeedSpec};

    fn periodic(n: usize) -> Vec<Digit> {
        (0..n).map(|i| if i % 2 == 0 { 1 } else { 2 }).collect()
    }

    #[test]
    fn occurrence_examples() {
        let d = periodic(50);
        assert_eq!(word_occurs(&d, &[2, 1]), Some(2));
        assert_eq!(word_occurs(&periodic(10_000), &[2, 2]), None);
        let delta = delta_map(&SeedSpec::parse(3, ";2").unwrap()).prefix(40);
        assert_eq!(word_occurs(delta.digits(), &[3, 1]), Some(9));
    }

    #[test]
    fn coverage_examples() {
        let r = coverage_scan(&periodic(100), 2, 2, 1000).unwrap();
        assert_eq!(
            r.missing,
            vec![Word::new(vec![1, 1]).unwrap(), Word::new(vec![2, 2]).unwrap()]
        );
        let e2 = vec![1, 2, 2, 1, 1, 2, 1, 2, 2, 2];
        let r = coverage_scan(&e2, 2, 3, 1000).unwrap();
        assert!(r.missing.iter().filter(|w| w.digits().contains(&3)).count() == 1 + 5);
        let s = sample_digits(11, 200, 1024).unwrap();
        assert!(coverage_scan(s.digits.digits(), 1, 1, 10).unwrap().missing.is_empty());
        assert!(coverage_scan(&[1], 2, 2, 100).is_err());
        assert!(coverage_scan(&periodic(10), 8, 9, 1000).is_err());
    }

    #[test]
    fn certified_digits_agree_with_cell_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let j = draw_cell(&mut rng, 96);
            let w = certify_dyadic(&j, 96, 1000);
            let c = cylinder(&w).closure();
            let lo = Rational::new(BigInt::from(j.clone()), BigInt::one() << 96usize);
            let hi = &lo + Rational::new(BigInt::one(), BigInt::one() << 96usize);
            assert!(c.contains(&lo) && c.contains(&hi));
            // one more digit of the midpoint would not cover the cell
            let mid = (&lo + &hi) / int(2);
            let full = cf_expand_rational(&mid).unwrap();
            if full.len() > w.len() {
                let deeper = cylinder(&full.prefix(w.len() + 1)).closure();
                assert!(!(deeper.contains(&lo) && deeper.contains(&hi)));
            }
        }
    }

    #[test]
    fn half_is_a_boundary_cell() {
        let bits = 128;
        let j = BigUint::one() << (bits - 1) as usize;
        assert!(certify_dyadic(&j, bits, 100).len() < 10);
    }

    #[test]
    fn sample_depths_and_reproducibility() {
        let a = sample_digits(5, 100, 512).unwrap();
        let b = sample_digits(5, 100, 512).unwrap();
        assert_eq!(a, b);
        for i in 0..20 {
            assert!(sample_digits(sample_seed(1, i), 50, 256).is_ok());
        }
        match sample_digits(1, 200, 256) {
            Err(Error::Certification { required, .. }) => assert_eq!(required, 200),
            other => panic!("{other:?}"),
        }
        assert!(matches!(sample_digits(1, 100, 50), Err(Error::Certification { .. })));
    }

    #[test]
    fn ndjson_round_trip() {
        let batch = sample_batch(9, 5, 40, 256).unwrap();
        let mut buf = vec![];
        write_ndjson(&batch, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().next().unwrap().starts_with("{\"seed\":"));
        let recs = read_ndjson(buf.as_slice()).unwrap();
        assert_eq!(recs.len(), 5);
        assert!(recs.iter().all(|r| r.replays().unwrap()));
    }

    #[test]
    fn batch_independent_of_threads() {
        let run = |t| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .unwrap()
                .install(|| sample_batch(4, 16, 30, 256).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn invariance_examples() {
        let half = Interval::closed(int(0), ratio(1, 2)).unwrap();
        let r = invariance_check(&half, 1000, 30).unwrap();
        assert!(r.within);
        assert!((r.lhs.to_f64() - 0.5849625007).abs() < 0.002);
        assert!((r.rhs.to_f64() - 0.5849625007).abs() < 1e-9);
        let unit = Interval::unit();
        let r = invariance_check(&unit, 100, 30).unwrap();
        assert!(r.within && (r.rhs.to_f64() - 1.0).abs() < 1e-12);
        let i1 = Interval::half_open(ratio(1, 2), int(1)).unwrap();
        let r10 = invariance_check(&i1, 10, 30).unwrap();
        let r100 = invariance_check(&i1, 100, 30).unwrap();
        assert!(r100.residual < r10.residual);
        assert!(r10.within && r100.within);
    }

    #[test]
    fn bounded_point_examples() {
        let iv = Interval::open(ratio(1, 3), ratio(1, 2)).unwrap();
        let p = bounded_point_in_interval(&iv, 100).unwrap();
        assert_eq!(p.word.digits(), &[2, 2]);
        let iv = Interval::open(ratio(3, 4), ratio(4, 5)).unwrap();
        let p = bounded_point_in_interval(&iv, 100).unwrap();
        assert_eq!(&p.word.digits()[..2], &[1, 3]);
        let p = bounded_point_in_interval(&Interval::open(int(0), int(1)).unwrap(), 100).unwrap();
        assert_eq!(p.word.digits(), &[2]);
        // (2,1,1) also works for the first interval
        let alt = cylinder(&Word::new(vec![2, 1, 1]).unwrap()).interval();
        assert!(alt.is_subset_of(&Interval::open(ratio(1, 3), ratio(1, 2)).unwrap()));
    }

    #[test]
    fn bounded_point_around_rational_midpoint_end() {
        // midpoint 1/2 = [2]; needs digits appended after the expansion ends
        let iv = Interval::open(ratio(1, 2) - ratio(1, 1000), ratio(1, 2) + ratio(1, 1000)).unwrap();
        let p = bounded_point_in_interval(&iv, 100).unwrap();
        assert!(p.cylinder.is_subset_of(&iv));
        let cert = p.missing_word_certificate(500).unwrap();
        assert!(cert.missing.contains(&Word::new(vec![p.bound + 1]).unwrap()));
    }

    #[test]
    fn bounded_point_limits() {
        let tiny = Interval::open(ratio(1, 3), ratio(1, 3) + ratio(1, 1_000_000_000)).unwrap();
        assert!(matches!(bounded_point_in_interval(&tiny, 2), Err(Error::Precondition(_))));
        assert!(bounded_point_in_interval(&Interval::open(int(0), int(2)).unwrap(), 10).is_err());
    }
}
