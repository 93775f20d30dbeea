//! Orbits of `Δ_N`-images pushed to `[0, 1)` by `φ(a_1, a_2, …) = [a_1, a_2, …]`,
//! with exact cylinder enclosures. Scrambled pairs are certified by finite
//! witness lists, together with the gap estimate and the Hölder bound for
//! `g = φ ∘ Δ_N^{-1} ∘ φ^{-1}`.

use std::collections::HashMap;
use std::ops::ControlFlow;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive};
use rand::Rng;
use serde::Serialize;

use crate::cf::lemmas::WordOdometer;
use crate::cf::{cylinder, cylinder_length, Digit, Word, LAMBDA};
use crate::density::sample_rng;
use crate::error::{Error, Result};
use crate::rational::{gap, int, ln_approx, serialize_pq, to_pq, Interval, Rational};
use crate::symbolic::{
    delta_map, delta_prefix_from_seed, first_difference, r_position, scan_agreement_runs,
    strip_r, t_count, SeedSpec, SymbolStream,
};

pub const DEFAULT_DEPTH_CAP: usize = 200;
pub const DEFAULT_HORIZON: u64 = 100_000_000;
pub const DEFAULT_COUNT: usize = 10;
pub const DEFAULT_J_MAX: u64 = 20;

/// `|I(k)| = 1/(k(k+1))`.
fn single_digit_length(k: Digit) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(k) * BigInt::from(k + 1))
}

/// `φ(σ^shift x)` lies in the cylinder of digits `x_{shift+1} … x_{shift+depth}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitEnclosure {
    pub shift: u64,
    pub depth: usize,
    pub word: Word,
    #[serde(rename = "box")]
    pub enclosure: Interval,
}

pub fn orbit_enclosure(x: &SymbolStream, shift: u64, depth: usize) -> Result<OrbitEnclosure> {
    if depth == 0 {
        return Err(Error::Domain("enclosure depth must be >= 1".into()));
    }
    let word = x.window(shift + 1, depth);
    let enclosure = cylinder(&word).interval();
    Ok(OrbitEnclosure {
        shift,
        depth,
        word,
        enclosure,
    })
}

/// Smallest closed interval containing `I(w) ∩ E_N`: the hull of the four
/// cylinders `I(w, d, e)` with `d, e ∈ {1, N}`.
pub fn en_hull(w: &Word, n_alpha: Digit) -> (Rational, Rational) {
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for d in [1, n_alpha] {
        for e in [1, n_alpha] {
            let mut v = w.clone();
            v.push(d).unwrap();
            v.push(e).unwrap();
            let c = cylinder(&v);
            if lo.as_ref().is_none_or(|l| c.lo < *l) {
                lo = Some(c.lo);
            }
            if hi.as_ref().is_none_or(|h| c.hi > *h) {
                hi = Some(c.hi);
            }
        }
    }
    (lo.unwrap(), hi.unwrap())
}

// ---------------------------------------------------------------------------
// separations

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Separation {
    pub n: u64,
    pub depth: usize,
    #[serde(serialize_with = "serialize_pq")]
    pub gap_lower: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationSearch {
    pub witnesses: Vec<Separation>,
    pub requested: usize,
    pub horizon: u64,
    pub diagnostic: Option<String>,
}

impl SeparationSearch {
    pub fn complete(&self) -> bool {
        self.witnesses.len() >= self.requested
    }
}

/// Distance between the closed enclosures of `σ^n x` and `σ^n y`, doubling
/// the depth from 1 until it is positive or the cap is reached.
pub fn separation_gap(
    x: &SymbolStream,
    y: &SymbolStream,
    n: u64,
    cap: usize,
) -> Option<(usize, Rational)> {
    let mut depth = 1usize;
    loop {
        let a = cylinder(&x.window(n + 1, depth));
        let b = cylinder(&y.window(n + 1, depth));
        let g = gap(&a.lo, &a.hi, &b.lo, &b.hi);
        if g.is_positive() {
            return Some((depth, g));
        }
        if depth >= cap {
            return None;
        }
        depth = (depth * 2).min(cap);
    }
}

fn separations_above(
    x: &SymbolStream,
    y: &SymbolStream,
    horizon: u64,
    count: usize,
    cap: usize,
    threshold: Option<&Rational>,
) -> SeparationSearch {
    let mut witnesses = vec![];
    let mut pos = 1;
    let mut capped = 0u64;
    while witnesses.len() < count && pos <= horizon {
        let Some(p) = first_difference(x, y, pos, horizon) else {
            break;
        };
        let n = p - 1;
        match separation_gap(x, y, n, cap) {
            Some((depth, g)) if threshold.is_none_or(|t| g >= *t) => witnesses.push(Separation {
                n,
                depth,
                gap_lower: g,
            }),
            Some(_) => {}
            None => capped += 1,
        }
        pos = p + 1;
    }
    let diagnostic = (witnesses.len() < count).then(|| {
        format!(
            "found {} of {count} separations within horizon {horizon}{}{}",
            witnesses.len(),
            threshold
                .map(|t| format!(" at gap >= {}", to_pq(t)))
                .unwrap_or_default(),
            if capped > 0 {
                format!("; {capped} shifts stayed overlapping at depth cap {cap}")
            } else {
                String::new()
            }
        )
    });
    SeparationSearch {
        witnesses,
        requested: count,
        horizon,
        diagnostic,
    }
}

/// Shifts `n ≤ horizon` where the enclosures of `σ^n Δ(a)` and `σ^n Δ(b)`
/// are disjoint, with the exact distance between them.
pub fn separation_witnesses(
    a: &SeedSpec,
    b: &SeedSpec,
    horizon: u64,
    count: usize,
) -> SeparationSearch {
    separations_above(
        &delta_map(a),
        &delta_map(b),
        horizon,
        count,
        DEFAULT_DEPTH_CAP,
        None,
    )
}

// ---------------------------------------------------------------------------
// proximities

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Proximity {
    pub j: u64,
    pub l: u64,
    /// length of the common prefix of the two shifted orbits
    pub common: u64,
    #[serde(serialize_with = "serialize_pq")]
    pub gap_upper: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProximitySearch {
    pub witnesses: Vec<Proximity>,
    pub j_max: u64,
    pub horizon: u64,
    pub diagnostic: Option<String>,
}

impl ProximitySearch {
    pub fn complete(&self) -> bool {
        self.witnesses.len() as u64 >= self.j_max
    }
}

/// Length of the common prefix of `σ^l x` and `σ^l y`, looking at most
/// `limit` digits ahead.
pub fn common_prefix_at(x: &SymbolStream, y: &SymbolStream, l: u64, limit: u64) -> u64 {
    match first_difference(x, y, l + 1, l + limit) {
        Some(p) => p - l - 1,
        None => limit,
    }
}

fn proximities(
    x: &SymbolStream,
    y: &SymbolStream,
    horizon: u64,
    j_max: u64,
    cap: usize,
) -> ProximitySearch {
    let mut witnesses: Vec<Proximity> = vec![];
    let mut next_j = 1;
    scan_agreement_runs(x, y, horizon, |run| {
        let mut bound: Option<Rational> = None;
        while next_j <= j_max && run.len >= next_j {
            let l = run.start - 1;
            let len = bound.get_or_insert_with(|| {
                cylinder_length(&x.window(run.start, (run.len as usize).min(cap)))
            });
            if witnesses.last().is_some_and(|w| w.gap_upper < *len) {
                break;
            }
            witnesses.push(Proximity {
                j: next_j,
                l,
                common: run.len,
                gap_upper: len.clone(),
            });
            next_j += 1;
        }
        if next_j > j_max {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    let diagnostic = (next_j <= j_max).then(|| {
        format!(
            "proximities reached j = {} of {j_max} within horizon {horizon}",
            next_j - 1
        )
    });
    ProximitySearch {
        witnesses,
        j_max,
        horizon,
        diagnostic,
    }
}

/// For each `j ≤ j_max` a shift `l_j` where `σ^{l_j} Δ(a)` and `σ^{l_j} Δ(b)`
/// share at least `j` digits, with `|I(common prefix)|` as the gap bound.
pub fn proximity_witnesses(
    a: &SeedSpec,
    b: &SeedSpec,
    horizon: u64,
    j_max: u64,
) -> ProximitySearch {
    proximities(
        &delta_map(a),
        &delta_map(b),
        horizon,
        j_max,
        DEFAULT_DEPTH_CAP,
    )
}

// ---------------------------------------------------------------------------
// scrambled pairs

#[derive(Debug, Clone)]
pub struct ScrambleConfig {
    pub count: usize,
    /// separation threshold; `None` means `(1/8) min(|I(N+1)|, |I(M+1)|)²`
    pub delta: Option<Rational>,
    pub j_max: u64,
    pub horizon: u64,
    pub depth_cap: usize,
}

impl Default for ScrambleConfig {
    fn default() -> Self {
        ScrambleConfig {
            count: DEFAULT_COUNT,
            delta: None,
            j_max: DEFAULT_J_MAX,
            horizon: DEFAULT_HORIZON,
            depth_cap: DEFAULT_DEPTH_CAP,
        }
    }
}

/// `(1/λ) min(|I(N+1)|, |I(M+1)|)²`.
pub fn default_delta(n: Digit, m: Digit) -> Rational {
    let s = single_digit_length(n.max(m) + 1);
    &s * &s / int(LAMBDA)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecSummary {
    #[serde(rename = "N")]
    pub n: Digit,
    pub seed: String,
}

impl From<&SeedSpec> for SpecSummary {
    fn from(s: &SeedSpec) -> Self {
        SpecSummary {
            n: s.n(),
            seed: s.seed().describe(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Thresholds {
    #[serde(serialize_with = "serialize_pq")]
    pub delta: Rational,
    pub count: usize,
    pub j_max: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScrambleReport {
    pub spec_a: SpecSummary,
    pub spec_b: SpecSummary,
    pub separations: Vec<Separation>,
    pub proximities: Vec<Proximity>,
    pub thresholds: Thresholds,
    pub horizon: u64,
    pub verdict: bool,
    pub diagnostics: Vec<String>,
}

pub fn verify_scrambled_pair(
    a: &SeedSpec,
    b: &SeedSpec,
    config: &ScrambleConfig,
) -> Result<ScrambleReport> {
    if a.n() == b.n() && a.seed().literal_equal(b.seed()).unwrap_or(a.seed() == b.seed()) {
        return Err(Error::Precondition(
            "the two seed specs give the same point".into(),
        ));
    }
    let x = delta_map(a);
    let y = delta_map(b);
    let delta = config
        .delta
        .clone()
        .unwrap_or_else(|| default_delta(a.n(), b.n()));
    let seps = separations_above(
        &x,
        &y,
        config.horizon,
        config.count,
        config.depth_cap,
        Some(&delta),
    );
    let prox = proximities(&x, &y, config.horizon, config.j_max, config.depth_cap);
    let verdict = seps.complete() && prox.complete();
    Ok(ScrambleReport {
        spec_a: a.into(),
        spec_b: b.into(),
        separations: seps.witnesses,
        proximities: prox.witnesses,
        thresholds: Thresholds {
            delta,
            count: config.count,
            j_max: config.j_max,
        },
        horizon: config.horizon,
        verdict,
        diagnostics: seps.diagnostic.into_iter().chain(prox.diagnostic).collect(),
    })
}

// ---------------------------------------------------------------------------
// gap estimate

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapCheck {
    pub common_len: usize,
    #[serde(serialize_with = "serialize_pq")]
    pub lhs_lower: Rational,
    #[serde(serialize_with = "serialize_pq")]
    pub rhs: Rational,
    pub pass: bool,
}

/// `λ^{-2} |I(N+1)|²`.
fn gap_constant(n_alpha: Digit) -> Rational {
    let s = single_digit_length(n_alpha + 1);
    &s * &s / int(LAMBDA * LAMBDA)
}

fn check_alphabet(w: &Word, n_alpha: Digit) -> Result<()> {
    if n_alpha < 2 {
        return Err(Error::Domain(format!("N = {n_alpha} must be >= 2")));
    }
    match w.max_digit() {
        Some(d) if d > n_alpha => Err(Error::Domain(format!("digit {d} exceeds N = {n_alpha}"))),
        _ => Ok(()),
    }
}

/// Points of `E_N` in `I(bw)` and `I(cw)` are at least `lhs_lower` apart;
/// the check is `lhs_lower ≥ λ^{-2} |I(N+1)|² |I(common prefix)|`.
pub fn gap_lemma_check(bw: &Word, cw: &Word, n_alpha: Digit) -> Result<GapCheck> {
    check_alphabet(bw, n_alpha)?;
    check_alphabet(cw, n_alpha)?;
    let k = bw.common_prefix_len(cw);
    if k == bw.len() || k == cw.len() {
        return Err(Error::Precondition(
            "words must differ at a position inside both".into(),
        ));
    }
    let (alo, ahi) = en_hull(bw, n_alpha);
    let (blo, bhi) = en_hull(cw, n_alpha);
    let lhs_lower = gap(&alo, &ahi, &blo, &bhi);
    let rhs = gap_constant(n_alpha) * cylinder_length(&bw.prefix(k));
    Ok(GapCheck {
        common_len: k,
        pass: lhs_lower >= rhs,
        lhs_lower,
        rhs,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GapBattery {
    #[serde(rename = "N")]
    pub n: Digit,
    pub max_len: usize,
    pub pairs: u64,
    pub failures: u64,
    /// smallest `lhs_lower / rhs` seen
    #[serde(serialize_with = "crate::rational::serialize_opt_pq")]
    pub min_ratio: Option<Rational>,
    pub examples: Vec<String>,
}

impl GapBattery {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Every unordered pair of distinct equal-length words over `{1..N}` with
/// length ≤ `max_len`.
pub fn gap_lemma_battery(n_alpha: Digit, max_len: usize) -> GapBattery {
    let mut rep = GapBattery {
        n: n_alpha,
        max_len,
        pairs: 0,
        failures: 0,
        min_ratio: None,
        examples: vec![],
    };
    let k = gap_constant(n_alpha);
    let mut prefix_rhs: HashMap<Vec<Digit>, Rational> = HashMap::new();
    for len in 1..=max_len {
        let words: Vec<Word> = WordOdometer::new(n_alpha, len)
            .map(Word::from_vec_unchecked)
            .collect();
        let hulls: Vec<(Rational, Rational)> = words.iter().map(|w| en_hull(w, n_alpha)).collect();
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                rep.pairs += 1;
                let c = words[i].common_prefix_len(&words[j]);
                let rhs = prefix_rhs
                    .entry(words[i].digits()[..c].to_vec())
                    .or_insert_with(|| &k * cylinder_length(&words[i].prefix(c)))
                    .clone();
                let lhs = gap(&hulls[i].0, &hulls[i].1, &hulls[j].0, &hulls[j].1);
                let ratio = &lhs / &rhs;
                if lhs < rhs {
                    rep.failures += 1;
                    if rep.examples.len() < 32 {
                        rep.examples.push(format!("({}) vs ({})", words[i], words[j]));
                    }
                }
                if rep.min_ratio.as_ref().is_none_or(|m| ratio < *m) {
                    rep.min_ratio = Some(ratio);
                }
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Hölder bound

const K_SCAN_LIMIT: u64 = 200_000;

fn positive_eps(eps: &Rational) -> Result<(u64, u64)> {
    if !eps.is_positive() {
        return Err(Error::Domain("epsilon must be > 0".into()));
    }
    match (eps.numer().to_u64(), eps.denom().to_u64()) {
        (Some(p), Some(q)) if p <= 1 << 20 && q <= 1 << 20 => Ok((p, q)),
        _ => Err(Error::Domain("epsilon numerator and denominator must be <= 2^20".into())),
    }
}

/// `2^{(n - t(n) - 1) ε} ≥ 2 (N+1)^{2 t(n)}`.
fn k_inequality(n: u64, n_alpha: Digit, p: u64, q: u64) -> bool {
    let t = t_count(n);
    let free = n as i64 - t as i64 - 1;
    let lhs = free as f64 * p as f64 / q as f64;
    let rhs = 1.0 + 2.0 * t as f64 * ((n_alpha + 1) as f64).log2();
    if (lhs - rhs).abs() > 1e-6 * rhs.max(1.0) {
        return lhs > rhs;
    }
    if free < 0 {
        return false;
    }
    // exact: 2^{free·p} ≥ 2^q (N+1)^{2tq}
    let l = BigUint::one() << (free as u64 * p) as usize;
    let r = (BigUint::one() << q as usize) * num_traits::pow(BigUint::from(n_alpha + 1), (2 * t * q) as usize);
    l >= r
}

/// `K(ε)`: the smallest `K` such that the inequality above holds for every
/// `n ≥ K`. Checked directly up to a scan limit and analytically beyond it
/// via `t(n) ≤ 2 n^{2/3}`.
pub fn holder_k(n_alpha: Digit, eps: &Rational) -> Result<u64> {
    let (p, q) = positive_eps(eps)?;
    let mut last_fail = 0;
    for n in 1..=K_SCAN_LIMIT {
        if !k_inequality(n, n_alpha, p, q) {
            last_fail = n;
        }
    }
    let e = p as f64 / q as f64;
    let lg = ((n_alpha + 1) as f64).log2();
    let n = K_SCAN_LIMIT as f64;
    let c = n.cbrt();
    let f = e * (n - 2.0 * c * c - 1.0) - 1.0 - 4.0 * c * c * lg;
    let df = e * (1.0 - 4.0 / (3.0 * c)) - 8.0 * lg / (3.0 * c);
    if last_fail == K_SCAN_LIMIT || f < 0.0 || df <= 0.0 {
        return Err(Error::Precondition(format!(
            "K(epsilon) exceeds the scan limit {K_SCAN_LIMIT} for epsilon = {}",
            to_pq(eps)
        )));
    }
    Ok(last_fail + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderSample {
    /// common prefix length of the two Δ-words
    pub n: u64,
    /// `|g(b) - g(c)| ≤ |I(strip_R(common prefix))|`
    #[serde(serialize_with = "serialize_pq")]
    pub image_gap_upper: Rational,
    /// `|b - c| ≥` hull distance
    #[serde(serialize_with = "serialize_pq")]
    pub gap_lower: Rational,
    /// `|Ī|^{1+ε} ≤ |I|`
    pub chain_pass: bool,
    pub pass: bool,
    /// `image_gap_upper / gap_lower^{1/(1+ε)}`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderReport {
    #[serde(rename = "N")]
    pub n: Digit,
    #[serde(serialize_with = "serialize_pq")]
    pub epsilon: Rational,
    pub k_epsilon: u64,
    pub depth: u64,
    /// `C^{1+ε} = λ² |I(N+1)|^{-2}`, exact
    #[serde(serialize_with = "serialize_pq")]
    pub c_base: Rational,
    pub c: f64,
    pub samples: Vec<HolderSample>,
    pub failures: u64,
    pub max_ratio: f64,
    pub pass: bool,
}

fn pow(r: &Rational, e: u64) -> Rational {
    num_traits::pow(r.clone(), e as usize)
}

/// Samples pairs `b, c ∈ φ(S_N)` whose Δ-words share exactly `n ≥ depth`
/// digits and checks `|g(b) - g(c)| ≤ C |b - c|^{1/(1+ε)}` exactly.
pub fn holder_check(
    n_alpha: Digit,
    eps: &Rational,
    depth: u64,
    samples: usize,
    seed: u64,
) -> Result<HolderReport> {
    if n_alpha < 2 {
        return Err(Error::Domain(format!("N = {n_alpha} must be >= 2")));
    }
    let (p, q) = positive_eps(eps)?;
    let k = holder_k(n_alpha, eps)?;
    if depth < k {
        return Err(Error::Precondition(format!(
            "depth {depth} is below K(epsilon) = {k}"
        )));
    }
    let s = single_digit_length(n_alpha + 1);
    let c_base = int(LAMBDA * LAMBDA) / (&s * &s);
    let c = (ln_approx(&c_base) * q as f64 / (p + q) as f64).exp();
    let mut out = Vec::with_capacity(samples);
    for i in 0..samples {
        let mut rng = sample_rng(seed, i as u64);
        let mut n = depth + rng.random_range(0..=depth);
        while r_position(n + 1).is_some() {
            n += 1;
        }
        // Δ digits 1..=n+1 read seed coordinates 1..=c only
        let c_idx = (n + 1 - t_count(n + 1)) as usize;
        let x: Vec<Digit> = (0..c_idx).map(|_| rng.random_range(1..=n_alpha)).collect();
        let mut y = x.clone();
        let old = y[c_idx - 1];
        let new = (old + rng.random_range(1..n_alpha) - 1) % n_alpha + 1;
        y[c_idx - 1] = new;
        let bx = delta_prefix_from_seed(n_alpha, &x, n as usize + 1)?;
        let by = delta_prefix_from_seed(n_alpha, &y, n as usize + 1)?;
        let common = bx.common_prefix_len(&by) as u64;
        debug_assert_eq!(common, n);
        let w = bx.prefix(common as usize);
        let full = cylinder_length(&w);
        let stripped = cylinder_length(&strip_r(&w));
        let (alo, ahi) = en_hull(&bx, n_alpha);
        let (blo, bhi) = en_hull(&by, n_alpha);
        let gap_lower = gap(&alo, &ahi, &blo, &bhi);
        // |Ī|^{(p+q)/q} ≤ |I|  ⟺  |Ī|^{p+q} ≤ |I|^q
        let lhs = pow(&stripped, p + q);
        let chain_pass = lhs <= pow(&full, q);
        let pass = chain_pass && gap_lower.is_positive() && lhs <= pow(&(&c_base * &gap_lower), q);
        let ratio = if gap_lower.is_positive() {
            (ln_approx(&stripped) - ln_approx(&gap_lower) * q as f64 / (p + q) as f64).exp()
        } else {
            f64::INFINITY
        };
        out.push(HolderSample {
            n: common,
            image_gap_upper: stripped,
            gap_lower,
            chain_pass,
            pass,
            ratio,
        });
    }
    let failures = out.iter().filter(|s| !s.pass).count() as u64;
    let max_ratio = out.iter().map(|s| s.ratio).fold(0.0, f64::max);
    Ok(HolderReport {
        n: n_alpha,
        epsilon: eps.clone(),
        k_epsilon: k,
        depth,
        c_base,
        c,
        samples: out,
        failures,
        max_ratio,
        pass: failures == 0,
    })
}

/// `|I(strip_R(w))| ≥ |I(w)|` for every `w` over `{1..N}` of the given length
/// (the converse comparison is the Hölder chain).
pub fn stripped_is_longer(n_alpha: Digit, len: usize) -> bool {
    WordOdometer::new(n_alpha, len).all(|d| {
        let w = Word::from_vec_unchecked(d);
        cylinder_length(&strip_r(&w)) >= cylinder_length(&w)
    })
}
