//! Digit streams over ℕ, the shift metric, the schedule `R` and the
//! scrambled-set construction `Δ_N(x) = Ψ_N(x, Θ_N(g_N(x)))`.
//!
//! Positions are 1-based throughout, matching `x = (x_1, x_2, …)`.
//!
//! Layout facts used below (all checked in the tests):
//! * `R = {m³ + t : m ≥ 1, 1 ≤ t ≤ m}` comes in runs; run `m` holds the
//!   R-indices `T(m-1)+1 ..= T(m)` where `T(j) = j(j+1)/2`.
//! * `Θ` is built from blocks; block `j` occupies positions `T(j-1)+1 ..= T(j)`.
//! * So R-run `m` of `Δ_N(x)` carries exactly `Θ`-block `m`, i.e. the digits
//!   `g_N(x)_1 ..= g_N(x)_m`.

use std::fmt;
use std::ops::ControlFlow;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::lemmas::WordOdometer;
use crate::cf::{Digit, Word};
use crate::error::{Error, Result};
use crate::rational::{serialize_pq, Rational};

// ---------------------------------------------------------------------------
// index arithmetic

fn triangular(j: u64) -> u64 {
    j * (j + 1) / 2
}

/// Largest `m` with `m³ ≤ n`.
pub fn cube_floor(n: u64) -> u64 {
    let mut m = (n as f64).cbrt() as u64;
    while (m as u128 + 1).pow(3) <= n as u128 {
        m += 1;
    }
    while m > 0 && (m as u128).pow(3) > n as u128 {
        m -= 1;
    }
    m
}

/// Smallest `j ≥ 1` with `T(j) ≥ n` (the Θ-block holding position `n`).
fn theta_block(n: u64) -> u64 {
    // j ≈ (sqrt(8n+1) - 1)/2
    let mut j = (((8 * n as u128 + 1) as f64).sqrt() as u64).saturating_sub(1) / 2;
    while triangular(j) < n {
        j += 1;
    }
    while j > 1 && triangular(j - 1) >= n {
        j -= 1;
    }
    j.max(1)
}

/// `t(n) = #{k : r_k ≤ n}`.
pub fn t_count(n: u64) -> u64 {
    if n < 2 {
        return 0;
    }
    let m0 = cube_floor(n - 1);
    triangular(m0 - 1) + m0.min(n - m0 * m0 * m0)
}

/// `Some((m, t))` if `n = m³ + t` with `1 ≤ t ≤ m`.
pub fn r_position(n: u64) -> Option<(u64, u64)> {
    if n < 2 {
        return None;
    }
    let m = cube_floor(n - 1);
    let t = n - m * m * m;
    (t <= m).then_some((m, t))
}

/// The k-th element of `R`, `k ≥ 1`.
pub fn r_value(k: u64) -> u64 {
    assert!(k >= 1, "R is indexed from 1");
    let m = theta_block(k);
    m * m * m + (k - triangular(m - 1))
}

/// Membership, R-index and count for a position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScheduleEntry {
    pub n: u64,
    pub is_r: bool,
    /// `k` with `r_k = n`, when `n ∈ R`.
    pub k: Option<u64>,
    pub t: u64,
}

pub fn r_schedule(n: u64) -> Result<ScheduleEntry> {
    if n == 0 {
        return Err(Error::Domain("schedule positions start at 1".into()));
    }
    let hit = r_position(n);
    Ok(ScheduleEntry {
        n,
        is_r: hit.is_some(),
        k: hit.map(|(m, t)| triangular(m - 1) + t),
        t: t_count(n),
    })
}

/// The values `r_1 < r_2 < …` that do not exceed `limit`.
pub fn r_values_up_to(limit: u64) -> Vec<u64> {
    (1..)
        .map(r_value)
        .take_while(|&r| r <= limit)
        .collect()
}

/// Outcome of the `t(n)` growth bounds over `8 ≤ n ≤ limit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduleBounds {
    pub limit: u64,
    pub r_strictly_increasing: bool,
    /// first `n ≥ 8` with `t(n) > 2 n^{2/3}`
    pub upper_violation: Option<u64>,
    /// first `n ≥ 64` with `t(n) < n^{2/3} / 8`
    pub lower_violation: Option<u64>,
}

impl ScheduleBounds {
    pub fn passed(&self) -> bool {
        self.r_strictly_increasing && self.upper_violation.is_none() && self.lower_violation.is_none()
    }
}

/// Checks `t(n) ≤ 2n^{2/3}` (as `t³ ≤ 8n²`) and `t(n) ≥ n^{2/3}/8`
/// (as `512 t³ ≥ n²`) in integers.
pub fn schedule_bounds(limit: u64) -> ScheduleBounds {
    let r = r_values_up_to(limit);
    let mut upper_violation = None;
    let mut lower_violation = None;
    for n in 8..=limit {
        let t = t_count(n) as u128;
        let n2 = n as u128 * n as u128;
        if upper_violation.is_none() && t * t * t > 8 * n2 {
            upper_violation = Some(n);
        }
        if lower_violation.is_none() && n >= 64 && 512 * t * t * t < n2 {
            lower_violation = Some(n);
        }
    }
    ScheduleBounds {
        limit,
        r_strictly_increasing: r.first() == Some(&2) && r.windows(2).all(|p| p[0] < p[1]),
        upper_violation,
        lower_violation,
    }
}

/// Which digit of `g_N(x)` sits at position `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GSlot {
    Top,
    One,
    Seed(u64),
}

fn g_slot(n: u64) -> GSlot {
    if n == 1 {
        return GSlot::Top;
    }
    // block k spans u = n-1 in k(k-1)+1 ..= k(k+1): k ones then x_1..x_k
    let u = n - 1;
    let k = theta_block(u.div_ceil(2)).max(1);
    let mut k = k;
    while k * (k + 1) < u {
        k += 1;
    }
    while k > 1 && (k - 1) * k >= u {
        k -= 1;
    }
    if u <= k * k {
        GSlot::One
    } else {
        GSlot::Seed(u - k * k)
    }
}

/// Seed coordinate (if any) that `g_N(x)_t` reads.
pub fn g_seed_index(t: u64) -> Option<u64> {
    match g_slot(t) {
        GSlot::Seed(j) => Some(j),
        _ => None,
    }
}

fn g_digit(n_top: Digit, t: u64, seed: impl Fn(u64) -> Digit) -> Digit {
    match g_slot(t) {
        GSlot::Top => n_top,
        GSlot::One => 1,
        GSlot::Seed(j) => seed(j),
    }
}

/// Verifies that every R-position `r ≤ limit` of `Δ_N` only reads seed
/// coordinates that already appeared at non-R positions before `r`.
pub fn check_schedule_references(limit: u64) -> Result<()> {
    for r in r_values_up_to(limit) {
        let (_, t) = r_position(r).expect("r is in R");
        if let Some(j) = g_seed_index(t) {
            let available = r - t_count(r);
            if j > available {
                return Err(Error::Precondition(format!(
                    "R-position {r} reads x_{j} but only {available} seed digits precede it"
                )));
            }
        }
    }
    Ok(())
}

fn ensure_schedule_checked() -> Result<()> {
    static CHECK: OnceLock<Result<()>> = OnceLock::new();
    CHECK
        .get_or_init(|| check_schedule_references(10_000))
        .clone()
}

// ---------------------------------------------------------------------------
// streams

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Literal {
        preamble: Vec<Digit>,
        period: Vec<Digit>,
    },
    G {
        n: Digit,
        inner: SymbolStream,
    },
    Theta {
        inner: SymbolStream,
    },
    Psi {
        x: SymbolStream,
        y: SymbolStream,
    },
    Delta {
        n: Digit,
        inner: SymbolStream,
    },
    Shifted {
        inner: SymbolStream,
        offset: u64,
    },
}

/// An infinite digit sequence given by a pure function of the position.
///
/// Cloning is cheap; clones share structure.
#[derive(Clone, PartialEq, Eq)]
pub struct SymbolStream {
    kind: Arc<Kind>,
    alphabet_max: Digit,
}

impl fmt::Debug for SymbolStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl SymbolStream {
    /// `preamble` followed by `period` repeated forever.
    pub fn eventually_periodic(preamble: Vec<Digit>, period: Vec<Digit>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Domain("period must be nonempty".into()));
        }
        if preamble.iter().chain(&period).any(|&d| d == 0) {
            return Err(Error::Domain("stream digits must be >= 1".into()));
        }
        let alphabet_max = preamble.iter().chain(&period).copied().max().unwrap();
        Ok(SymbolStream {
            kind: Arc::new(Kind::Literal { preamble, period }),
            alphabet_max,
        })
    }

    pub fn constant(d: Digit) -> Result<Self> {
        Self::eventually_periodic(vec![], vec![d])
    }

    /// Parses `"preamble;period"`, e.g. `"2,3;1,2"` is `2,3,1,2,1,2,…`.
    pub fn parse(text: &str) -> Result<Self> {
        let (pre, per) = text
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("expected \"preamble;period\", got {text:?}")))?;
        let pre: Word = pre.parse()?;
        let per: Word = per.parse()?;
        Self::eventually_periodic(pre.into(), per.into())
    }

    pub fn alphabet_max(&self) -> Digit {
        self.alphabet_max
    }

    pub fn shifted(&self, offset: u64) -> SymbolStream {
        if offset == 0 {
            return self.clone();
        }
        if let Kind::Shifted { inner, offset: o } = &*self.kind {
            return inner.shifted(o + offset);
        }
        SymbolStream {
            kind: Arc::new(Kind::Shifted {
                inner: self.clone(),
                offset,
            }),
            alphabet_max: self.alphabet_max,
        }
    }

    /// Digit at position `i ≥ 1`.
    pub fn digit(&self, i: u64) -> Digit {
        debug_assert!(i >= 1, "positions are 1-based");
        match &*self.kind {
            Kind::Literal { preamble, period } => {
                let i = (i - 1) as usize;
                if i < preamble.len() {
                    preamble[i]
                } else {
                    period[(i - preamble.len()) % period.len()]
                }
            }
            Kind::G { n, inner } => g_digit(*n, i, |j| inner.digit(j)),
            Kind::Theta { inner } => {
                let j = theta_block(i);
                inner.digit(i - triangular(j - 1))
            }
            Kind::Psi { x, y } => match r_position(i) {
                Some((m, t)) => y.digit(triangular(m - 1) + t),
                None => x.digit(i - t_count(i)),
            },
            Kind::Delta { n, inner } => match r_position(i) {
                Some((_, t)) => g_digit(*n, t, |j| inner.digit(j)),
                None => inner.digit(i - t_count(i)),
            },
            Kind::Shifted { inner, offset } => inner.digit(i + offset),
        }
    }

    /// Writes digits `start, start+1, …` into `out`.
    pub fn fill(&self, start: u64, out: &mut [Digit]) {
        match &*self.kind {
            Kind::Literal { preamble, period } => {
                let first = (start - 1) as usize;
                for (k, slot) in out.iter_mut().enumerate() {
                    let i = first + k;
                    *slot = if i < preamble.len() {
                        preamble[i]
                    } else {
                        period[(i - preamble.len()) % period.len()]
                    };
                }
            }
            Kind::Delta { n, inner } => {
                // seed digits are consecutive across non-R positions
                let end = start + out.len() as u64;
                let seed_lo = start - t_count(start - 1);
                let seed_hi = end - 1 - t_count(end - 1);
                let mut seed = vec![0; (seed_hi + 1 - seed_lo) as usize];
                if !seed.is_empty() {
                    inner.fill(seed_lo, &mut seed);
                }
                let mut next_seed = 0usize;
                let mut m = cube_floor(start.saturating_sub(1)).max(1);
                for (k, slot) in out.iter_mut().enumerate() {
                    let pos = start + k as u64;
                    while (m + 1).pow(3) < pos {
                        m += 1;
                    }
                    let base = m * m * m;
                    *slot = if pos > base && pos - base <= m {
                        g_digit(*n, pos - base, |j| inner.digit(j))
                    } else {
                        let d = seed[next_seed];
                        next_seed += 1;
                        d
                    };
                }
            }
            Kind::Shifted { inner, offset } => inner.fill(start + offset, out),
            _ => {
                for (k, slot) in out.iter_mut().enumerate() {
                    *slot = self.digit(start + k as u64);
                }
            }
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        let mut v = vec![0; n];
        if n > 0 {
            self.fill(1, &mut v);
        }
        Word::from_vec_unchecked(v)
    }

    /// Digits `start ..= start + len - 1` as a word.
    pub fn window(&self, start: u64, len: usize) -> Word {
        let mut v = vec![0; len];
        if len > 0 {
            self.fill(start, &mut v);
        }
        Word::from_vec_unchecked(v)
    }

    /// Decides equality of two literal eventually periodic streams; `None`
    /// for derived streams.
    pub fn literal_equal(&self, other: &SymbolStream) -> Option<bool> {
        match (&*self.kind, &*other.kind) {
            (
                Kind::Literal { preamble: p1, period: q1 },
                Kind::Literal { preamble: p2, period: q2 },
            ) => {
                let pre = p1.len().max(p2.len());
                let l1 = q1.len();
                let l2 = q2.len();
                let lcm = l1 / num_integer::gcd(l1, l2) * l2;
                let n = (pre + lcm) as u64;
                Some(first_difference(self, other, 1, n).is_none())
            }
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match &*self.kind {
            Kind::Literal { preamble, period } => format!(
                "{};{}",
                Word::from_vec_unchecked(preamble.clone()),
                Word::from_vec_unchecked(period.clone())
            ),
            Kind::G { n, inner } => format!("g_{n}({})", inner.describe()),
            Kind::Theta { inner } => format!("theta({})", inner.describe()),
            Kind::Psi { x, y } => format!("psi({}, {})", x.describe(), y.describe()),
            Kind::Delta { n, inner } => format!("delta_{n}({})", inner.describe()),
            Kind::Shifted { inner, offset } => format!("shift^{offset}({})", inner.describe()),
        }
    }
}

/// An alphabet bound and a seed over `{1..N}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSpec {
    n: Digit,
    seed: SymbolStream,
}

impl SeedSpec {
    pub fn new(n: Digit, seed: SymbolStream) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("alphabet bound N = {n} must be >= 2")));
        }
        if seed.alphabet_max() > n {
            return Err(Error::Domain(format!(
                "seed digit {} exceeds N = {n}",
                seed.alphabet_max()
            )));
        }
        Ok(SeedSpec { n, seed })
    }

    pub fn parse(n: Digit, seed: &str) -> Result<Self> {
        Self::new(n, SymbolStream::parse(seed)?)
    }

    pub fn n(&self) -> Digit {
        self.n
    }

    pub fn seed(&self) -> &SymbolStream {
        &self.seed
    }

    pub fn describe(&self) -> String {
        format!("N={} seed={}", self.n, self.seed.describe())
    }
}

pub fn g_map(n: Digit, x: &SymbolStream) -> Result<SymbolStream> {
    if n < 2 {
        return Err(Error::Domain(format!("N = {n} must be >= 2")));
    }
    if x.alphabet_max() > n {
        return Err(Error::Domain(format!(
            "seed digit {} exceeds N = {n}",
            x.alphabet_max()
        )));
    }
    Ok(SymbolStream {
        kind: Arc::new(Kind::G {
            n,
            inner: x.clone(),
        }),
        alphabet_max: n,
    })
}

pub fn theta_map(x: &SymbolStream) -> SymbolStream {
    SymbolStream {
        kind: Arc::new(Kind::Theta { inner: x.clone() }),
        alphabet_max: x.alphabet_max(),
    }
}

pub fn psi_map(x: &SymbolStream, y: &SymbolStream) -> SymbolStream {
    SymbolStream {
        kind: Arc::new(Kind::Psi {
            x: x.clone(),
            y: y.clone(),
        }),
        alphabet_max: x.alphabet_max().max(y.alphabet_max()),
    }
}

pub fn delta_map(spec: &SeedSpec) -> SymbolStream {
    SymbolStream {
        kind: Arc::new(Kind::Delta {
            n: spec.n,
            inner: spec.seed.clone(),
        }),
        alphabet_max: spec.n,
    }
}

/// The word with its R-positions removed; length `|w| - t(|w|)`.
pub fn strip_r(w: &Word) -> Word {
    let kept = w
        .digits()
        .iter()
        .enumerate()
        .filter(|(i, _)| r_position(*i as u64 + 1).is_none())
        .map(|(_, &d)| d)
        .collect();
    Word::from_vec_unchecked(kept)
}

/// First `len` digits of `Δ_N(x)` from a finite seed prefix, which must
/// hold at least `len - t(len)` digits.
pub fn delta_prefix_from_seed(n: Digit, seed: &[Digit], len: usize) -> Result<Word> {
    let need = len as u64 - t_count(len as u64);
    if (seed.len() as u64) < need {
        return Err(Error::Precondition(format!(
            "Δ prefix of length {len} needs {need} seed digits, got {}",
            seed.len()
        )));
    }
    let mut out = Vec::with_capacity(len);
    let mut next = 0usize;
    for pos in 1..=len as u64 {
        match r_position(pos) {
            Some((_, t)) => out.push(g_digit(n, t, |j| seed[j as usize - 1])),
            None => {
                out.push(seed[next]);
                next += 1;
            }
        }
    }
    Ok(Word::from_vec_unchecked(out))
}

/// If `w` is a prefix of some `Δ_N(x)`, `x ∈ Σ_N`, returns `x|_1^{n-t(n)}`.
pub fn delta_inverse_prefix(n: Digit, w: &Word) -> Result<Option<Word>> {
    ensure_schedule_checked()?;
    if n < 2 {
        return Err(Error::Domain(format!("N = {n} must be >= 2")));
    }
    if let Some(d) = w.digits().iter().find(|&&d| d > n) {
        return Err(Error::Domain(format!("digit {d} exceeds N = {n}")));
    }
    let seed = strip_r(w);
    let rebuilt = delta_prefix_from_seed(n, seed.digits(), w.len())?;
    Ok((rebuilt == *w).then_some(seed))
}

/// Iterator over `A_n`, the length-`n` prefixes of `S_N = Δ_N(Σ_N)`.
pub struct PrefixSet {
    n_alpha: Digit,
    len: usize,
    seeds: WordOdometer,
}

impl Iterator for PrefixSet {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let seed = self.seeds.next()?;
        Some(delta_prefix_from_seed(self.n_alpha, &seed, self.len).expect("seed long enough"))
    }
}

/// `|A_n| = N^{n - t(n)}`, or `None` on overflow.
pub fn a_n_cardinality(n_alpha: Digit, len: u64) -> Option<u128> {
    let free = len - t_count(len);
    (n_alpha as u128).checked_pow(u32::try_from(free).ok()?)
}

pub fn enumerate_a_n(n_alpha: Digit, len: usize, budget: u128) -> Result<PrefixSet> {
    ensure_schedule_checked()?;
    if n_alpha < 2 || len == 0 {
        return Err(Error::Domain("enumerate_A_n needs N >= 2 and n >= 1".into()));
    }
    let size = a_n_cardinality(n_alpha, len as u64).unwrap_or(u128::MAX);
    if size > budget {
        return Err(Error::Budget {
            what: "A_n enumeration",
            needed: size,
            limit: budget,
        });
    }
    let free = len - t_count(len as u64) as usize;
    Ok(PrefixSet {
        n_alpha,
        len,
        seeds: WordOdometer::new(n_alpha, free),
    })
}

// ---------------------------------------------------------------------------
// metric and agreement scans

/// `d(x, y) = 2^{-i}` with `i` the number of leading coordinates that agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymDistance {
    /// Structurally identical streams.
    Zero,
    Exact {
        /// `i` (coordinates `1..=i` agree, `i+1` differs)
        agree: u64,
        #[serde(serialize_with = "serialize_pq")]
        value: Rational,
    },
    /// No difference within the horizon, so `d ≤ 2^{-horizon}`.
    AtMost {
        horizon: u64,
        #[serde(serialize_with = "serialize_pq")]
        bound: Rational,
    },
}

fn pow2_inv(i: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << i as usize)
}

pub fn sym_distance(x: &SymbolStream, y: &SymbolStream, horizon: u64) -> Result<SymDistance> {
    if horizon == 0 {
        return Err(Error::Domain("horizon must be >= 1".into()));
    }
    if x == y {
        return Ok(SymDistance::Zero);
    }
    match first_difference(x, y, 1, horizon) {
        Some(pos) => Ok(SymDistance::Exact {
            agree: pos - 1,
            value: pow2_inv(pos - 1),
        }),
        None => Ok(SymDistance::AtMost {
            horizon,
            bound: pow2_inv(horizon),
        }),
    }
}

const SCAN_CHUNK: usize = 1 << 16;

/// First position in `start ..= last` where the streams differ.
pub fn first_difference(x: &SymbolStream, y: &SymbolStream, start: u64, last: u64) -> Option<u64> {
    let mut a = vec![0; SCAN_CHUNK];
    let mut b = vec![0; SCAN_CHUNK];
    let mut pos = start;
    while pos <= last {
        let len = ((last - pos + 1) as usize).min(SCAN_CHUNK);
        x.fill(pos, &mut a[..len]);
        y.fill(pos, &mut b[..len]);
        if let Some(k) = (0..len).find(|&k| a[k] != b[k]) {
            return Some(pos + k as u64);
        }
        pos += len as u64;
    }
    None
}

/// A maximal block of positions `start ..= start + len - 1` where two
/// streams agree. `truncated` marks a run cut off by the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgreementRun {
    pub start: u64,
    pub len: u64,
    pub truncated: bool,
}

/// Runs inside one chunk; edge runs are merged by the caller.
fn chunk_runs(x: &SymbolStream, y: &SymbolStream, start: u64, len: usize) -> Vec<(u64, u64)> {
    let mut a = vec![0; len];
    let mut b = vec![0; len];
    x.fill(start, &mut a);
    y.fill(start, &mut b);
    let mut runs = vec![];
    let mut open: Option<u64> = None;
    for k in 0..len {
        let pos = start + k as u64;
        match (a[k] == b[k], open) {
            (true, None) => open = Some(pos),
            (false, Some(s)) => {
                runs.push((s, pos - s));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        runs.push((s, start + len as u64 - s));
    }
    runs
}

/// Visits the agreement runs of `x` and `y` within positions `1..=horizon`
/// in increasing order until `visit` breaks. Chunks are scanned in
/// parallel waves; the visiting order does not depend on the thread count.
pub fn scan_agreement_runs(
    x: &SymbolStream,
    y: &SymbolStream,
    horizon: u64,
    mut visit: impl FnMut(AgreementRun) -> ControlFlow<()>,
) {
    const CHUNK: u64 = 1 << 18;
    let wave = (rayon::current_num_threads() as u64 * 4).max(4);
    let mut pending: Option<(u64, u64)> = None;
    let mut pos = 1u64;
    while pos <= horizon {
        let starts: Vec<u64> = (0..wave)
            .map(|i| pos + i * CHUNK)
            .take_while(|&s| s <= horizon)
            .collect();
        let chunks: Vec<Vec<(u64, u64)>> = starts
            .par_iter()
            .map(|&s| chunk_runs(x, y, s, (horizon - s + 1).min(CHUNK) as usize))
            .collect();
        for (runs, &s) in chunks.iter().zip(&starts) {
            for &(rs, rl) in runs {
                let run = match pending.take() {
                    Some((ps, pl)) if ps + pl == rs => (ps, pl + rl),
                    Some((ps, pl)) => {
                        let done = AgreementRun {
                            start: ps,
                            len: pl,
                            truncated: false,
                        };
                        if visit(done).is_break() {
                            return;
                        }
                        (rs, rl)
                    }
                    None => (rs, rl),
                };
                pending = Some(run);
                // a run that stops before the chunk end is finished
                let chunk_end = s + CHUNK.min(horizon - s + 1);
                if run.0 + run.1 < chunk_end {
                    let (ps, pl) = pending.take().unwrap();
                    let done = AgreementRun {
                        start: ps,
                        len: pl,
                        truncated: false,
                    };
                    if visit(done).is_break() {
                        return;
                    }
                }
            }
        }
        pos = starts.last().unwrap() + CHUNK;
    }
    if let Some((ps, pl)) = pending {
        let _ = visit(AgreementRun {
            start: ps,
            len: pl,
            truncated: ps + pl > horizon,
        });
    }
}

/// Finite certificate that `(u, v)` is scrambled for the shift: shifts with
/// differing first digits and, for each `j ≤ j_max`, a shift with a common
/// prefix of length ≥ `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftScrambleScan {
    pub separations: Vec<u64>,
    /// `(j, l_j, common prefix length at l_j)`
    pub proximities: Vec<(u64, u64, u64)>,
    pub horizon: u64,
    pub complete: bool,
}

pub fn shift_scramble_scan(
    u: &SymbolStream,
    v: &SymbolStream,
    horizon: u64,
    separations_wanted: usize,
    j_max: u64,
) -> ShiftScrambleScan {
    let mut separations = vec![];
    let mut pos = 1;
    while separations.len() < separations_wanted {
        match first_difference(u, v, pos, horizon) {
            Some(p) => {
                separations.push(p - 1);
                pos = p + 1;
            }
            None => break,
        }
    }
    let mut proximities = vec![];
    let mut next_j = 1;
    scan_agreement_runs(u, v, horizon, |run| {
        while next_j <= j_max && run.len >= next_j {
            proximities.push((next_j, run.start - 1, run.len));
            next_j += 1;
        }
        if next_j > j_max {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    let complete = separations.len() >= separations_wanted && next_j > j_max;
    ShiftScrambleScan {
        separations,
        proximities,
        horizon,
        complete,
    }
}
