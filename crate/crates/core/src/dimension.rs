//! Depth-n pressure roots `Σ_w |I(w)|^s = 1` over cylinder covers of `E_N`
//! and of `φ(S_N)`, plus the Jarnik envelope for `dim_H E_N`.
//!
//! Terms are evaluated as `exp(s · ln|I(w)|)` in `f64` and summed with
//! Neumaier compensation. Each sum carries an explicit error budget, and the
//! bisection only moves an endpoint when `|Σ - 1|` exceeds it.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::cf::{Digit, Word};
use crate::error::{Error, Result};
use crate::precise::Precise;
use crate::symbolic::{g_seed_index, r_position, t_count};

pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_COVER_BUDGET: u128 = 1 << 24;

/// Terms per deterministic partial sum.
const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SetKind {
    #[serde(rename = "EN")]
    En,
    #[serde(rename = "SN")]
    Sn,
}

impl SetKind {
    pub fn label(self) -> &'static str {
        match self {
            SetKind::En => "EN",
            SetKind::Sn => "SN",
        }
    }
}

impl std::str::FromStr for SetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EN" | "E" => Ok(SetKind::En),
            "SN" | "S" => Ok(SetKind::Sn),
            _ => Err(Error::Parse(format!("unknown set kind {s:?} (expected EN or SN)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PressureRoot {
    pub root: f64,
    pub s_lo: f64,
    pub s_hi: f64,
    pub cover_size: u64,
}

fn neumaier(terms: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    (sum, comp)
}

/// `Σ exp(s ℓ_i)` and a bound on its absolute error.
///
/// Chunks are fixed-size and combined in order, so the value does not depend
/// on how rayon schedules them.
fn cover_sum(logs: &[f64], s: f64) -> (f64, f64) {
    let partials: Vec<(f64, f64)> = logs
        .par_chunks(CHUNK)
        .map(|c| neumaier(c.iter().map(|&l| (s * l).exp())))
        .collect();
    let (hi, lo) = neumaier(partials.iter().flat_map(|&(a, b)| [a, b]));
    let sum = hi + lo;
    let max_exp = logs.iter().fold(0.0f64, |m, &l| m.max((s * l).abs()));
    // ℓ_i carries a few ulps of relative error, amplified by |s ℓ_i| in exp;
    // compensated summation adds O(ε) relative error on top.
    let err = sum * f64::EPSILON * (8.0 + 4.0 * max_exp) + logs.len() as f64 * f64::MIN_POSITIVE;
    (sum, err)
}

/// Bisection for the root of `Σ_i exp(s ℓ_i) = 1` on `[0, 1]`, where
/// `ℓ_i = ln|I(w_i)| ≤ 0`.
pub fn pressure_root_from_logs(logs: &[f64], tol: f64) -> Result<PressureRoot> {
    if logs.is_empty() {
        return Err(Error::Domain("cover must be nonempty".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain("tolerance must be > 0".into()));
    }
    if logs.iter().any(|&l| l > 0.0 || l.is_nan()) {
        return Err(Error::Domain("cylinder lengths must be at most 1".into()));
    }
    let cover_size = logs.len() as u64;
    if logs.iter().all(|&l| l == 0.0) {
        return Err(Error::NoRoot(
            "cover sum is constant in s (full-measure word)".into(),
        ));
    }
    if logs.len() == 1 {
        // |I|^s = 1 only at s = 0
        return Ok(PressureRoot {
            root: 0.0,
            s_lo: 0.0,
            s_hi: 0.0,
            cover_size,
        });
    }
    let (at_one, err) = cover_sum(logs, 1.0);
    if at_one > 1.0 + err {
        return Err(Error::NoRoot(format!(
            "cover sum at s = 1 is {at_one} > 1; no root in [0, 1]"
        )));
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let (v, err) = cover_sum(logs, mid);
        if v - 1.0 > err {
            lo = mid;
        } else if 1.0 - v > err {
            hi = mid;
        } else {
            // the root is within rounding of mid; bracket it tightly
            let d = tol / 4.0;
            let (vl, el) = cover_sum(logs, mid - d);
            let (vh, eh) = cover_sum(logs, mid + d);
            if vl - 1.0 > el && 1.0 - vh > eh {
                lo = mid - d;
                hi = mid + d;
                break;
            }
            return Err(Error::NoRoot(format!(
                "cover sum is flat within its error budget near s = {mid}"
            )));
        }
    }
    Ok(PressureRoot {
        root: 0.5 * (lo + hi),
        s_lo: lo,
        s_hi: hi,
        cover_size,
    })
}

fn ln_inv_length(qp: u128, q: u128) -> f64 {
    -((q as f64).ln() + ((q + qp) as f64).ln())
}

fn word_log(digits: &[Digit]) -> Result<f64> {
    let (mut qp, mut q) = (0u128, 1u128);
    for &a in digits {
        let next = q
            .checked_mul(a as u128)
            .and_then(|v| v.checked_add(qp))
            .ok_or(Error::DigitOverflow)?;
        qp = q;
        q = next;
    }
    q.checked_add(qp).ok_or(Error::DigitOverflow)?;
    Ok(ln_inv_length(qp, q))
}

/// Root for an explicit cover.
pub fn pressure_root(cover: impl IntoIterator<Item = Word>, tol: f64) -> Result<PressureRoot> {
    let logs = cover
        .into_iter()
        .map(|w| word_log(w.digits()))
        .collect::<Result<Vec<f64>>>()?;
    pressure_root_from_logs(&logs, tol)
}

/// `N^n` for `E_N`, `N^{n - t(n)}` for the `A_n` cover of `φ(S_N)`.
pub fn cover_size(kind: SetKind, n_alpha: Digit, depth: u64) -> Option<u128> {
    let free = match kind {
        SetKind::En => depth,
        SetKind::Sn => depth - t_count(depth),
    };
    (n_alpha as u128).checked_pow(u32::try_from(free).ok()?)
}

struct Dfs {
    kind: SetKind,
    n_alpha: Digit,
    depth: u64,
}

impl Dfs {
    /// Appends `ln|I(w)|` for every cover word extending the current state.
    fn walk(&self, pos: u64, seed: &mut Vec<Digit>, qp: u128, q: u128, out: &mut Vec<f64>) -> Result<()> {
        if pos > self.depth {
            q.checked_add(qp).ok_or(Error::DigitOverflow)?;
            out.push(ln_inv_length(qp, q));
            return Ok(());
        }
        let step = |a: Digit| -> Result<u128> {
            q.checked_mul(a as u128)
                .and_then(|v| v.checked_add(qp))
                .ok_or(Error::DigitOverflow)
        };
        let forced = match self.kind {
            SetKind::Sn => r_position(pos).map(|(_, t)| match (t, g_seed_index(t)) {
                (1, _) => self.n_alpha,
                (_, Some(j)) => seed[j as usize - 1],
                (_, None) => 1,
            }),
            SetKind::En => None,
        };
        match forced {
            Some(a) => self.walk(pos + 1, seed, q, step(a)?, out),
            None => {
                for a in 1..=self.n_alpha {
                    seed.push(a);
                    let r = self.walk(pos + 1, seed, q, step(a)?, out);
                    seed.pop();
                    r?;
                }
                Ok(())
            }
        }
    }

    /// Free (branching) digits must be fixed before forced ones can be read;
    /// partitions are the cover words' first `prefix_free` free digits.
    fn collect(&self, prefix_free: usize) -> Result<Vec<f64>> {
        let parts: Vec<Vec<Digit>> = crate::cf::lemmas::WordOdometer::new(self.n_alpha, prefix_free).collect();
        let chunks: Vec<Result<Vec<f64>>> = parts
            .par_iter()
            .map(|part| {
                let mut out = vec![];
                self.walk_prefix(part, &mut out)?;
                Ok(out)
            })
            .collect();
        let mut logs = vec![];
        for c in chunks {
            logs.extend(c?);
        }
        Ok(logs)
    }

    /// Walks with the first free digits pinned to `part`.
    fn walk_prefix(&self, part: &[Digit], out: &mut Vec<f64>) -> Result<()> {
        let mut seed = vec![];
        let (mut qp, mut q) = (0u128, 1u128);
        let mut pos = 1;
        while seed.len() < part.len() {
            let a = match (self.kind, r_position(pos)) {
                (SetKind::Sn, Some((_, t))) => match (t, g_seed_index(t)) {
                    (1, _) => self.n_alpha,
                    (_, Some(j)) => seed[j as usize - 1],
                    (_, None) => 1,
                },
                _ => {
                    let a = part[seed.len()];
                    seed.push(a);
                    a
                }
            };
            let next = q
                .checked_mul(a as u128)
                .and_then(|v| v.checked_add(qp))
                .ok_or(Error::DigitOverflow)?;
            qp = q;
            q = next;
            pos += 1;
        }
        self.walk(pos, &mut seed, qp, q, out)
    }
}

/// `ln|I(w)|` for every word of the depth-`n` cover, in lexicographic order
/// of the free digits.
pub fn cover_logs(kind: SetKind, n_alpha: Digit, depth: u64, budget: u128) -> Result<Vec<f64>> {
    if n_alpha < 2 || depth == 0 {
        return Err(Error::Domain("cover needs N >= 2 and depth >= 1".into()));
    }
    let size = cover_size(kind, n_alpha, depth).unwrap_or(u128::MAX);
    if size > budget {
        return Err(Error::Budget {
            what: "cover size",
            needed: size,
            limit: budget,
        });
    }
    let free = match kind {
        SetKind::En => depth,
        SetKind::Sn => depth - t_count(depth),
    } as usize;
    let dfs = Dfs {
        kind,
        n_alpha,
        depth,
    };
    // enough partitions to keep every thread busy, independent of the pool
    let mut prefix = 0;
    while prefix < free && (n_alpha as u128).pow(prefix as u32 + 1) <= 4096 {
        prefix += 1;
    }
    dfs.collect(prefix)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimEstimate {
    pub set_kind: SetKind,
    #[serde(rename = "N")]
    pub n: Digit,
    pub depth: u64,
    pub cover_size: u64,
    pub s_lo: f64,
    pub s_hi: f64,
    pub root: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimSeries {
    pub estimates: Vec<DimEstimate>,
    pub diagnostic: Option<String>,
}

pub fn dim_estimate(kind: SetKind, n_alpha: Digit, depth: u64, tol: f64, budget: u128) -> Result<DimEstimate> {
    let logs = cover_logs(kind, n_alpha, depth, budget)?;
    let r = pressure_root_from_logs(&logs, tol)?;
    Ok(DimEstimate {
        set_kind: kind,
        n: n_alpha,
        depth,
        cover_size: r.cover_size,
        s_lo: r.s_lo,
        s_hi: r.s_hi,
        root: r.root,
    })
}

/// One estimate per depth `1..=max_depth`; stops early with a diagnostic
/// once the cover exceeds `budget`.
pub fn dim_series(kind: SetKind, n_alpha: Digit, max_depth: u64, tol: f64, budget: u128) -> Result<DimSeries> {
    if n_alpha < 2 {
        return Err(Error::Domain(format!("N = {n_alpha} must be >= 2")));
    }
    let mut estimates = vec![];
    for depth in 1..=max_depth {
        match dim_estimate(kind, n_alpha, depth, tol, budget) {
            Ok(e) => estimates.push(e),
            Err(Error::Budget { needed, limit, .. }) => {
                return Ok(DimSeries {
                    estimates,
                    diagnostic: Some(format!(
                        "stopped at depth {depth}: cover size {needed} exceeds budget {limit}"
                    )),
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(DimSeries {
        estimates,
        diagnostic: None,
    })
}

pub const CSV_HEADER: &str = "set_kind,N,depth,cover_size,s_lo,s_hi,root";

pub fn to_csv(estimates: &[DimEstimate]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for e in estimates {
        writeln!(
            s,
            "{},{},{},{},{:.8},{:.8},{:.8}",
            e.set_kind.label(),
            e.n,
            e.depth,
            e.cover_size,
            e.s_lo,
            e.s_hi,
            e.root
        )
        .unwrap();
    }
    s
}

/// `1 - 1/(N ln 2) ≤ dim_H E_N ≤ 1 - 1/(8 N ln N)` for `N ≥ 8`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JarnikBracket {
    #[serde(rename = "N")]
    pub n: Digit,
    pub lo: Precise,
    pub hi: Precise,
}

pub fn jarnik_bracket(n_alpha: Digit, digits: u32) -> Result<JarnikBracket> {
    if n_alpha < 8 {
        return Err(Error::Domain(format!(
            "the Jarnik bounds need N >= 8, got {n_alpha}"
        )));
    }
    let lo = Precise::one_minus_inv_mul_ln(n_alpha, 2, digits)?;
    let hi = Precise::one_minus_inv_mul_ln(8 * n_alpha, n_alpha, digits)?;
    Ok(JarnikBracket { n: n_alpha, lo, hi })
}

/// `E_N` depth whose cover has as many free digits as the `A_n` cover.
pub fn matched_en_depth(sn_depth: u64) -> u64 {
    sn_depth - t_count(sn_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::enumerate_a_n;

    fn words(v: &[&[Digit]]) -> Vec<Word> {
        v.iter().map(|d| Word::new(d.to_vec()).unwrap()).collect()
    }

    #[test]
    fn two_word_cover() {
        let r = pressure_root(words(&[&[1], &[2]]), 1e-6).unwrap();
        assert!((r.root - 0.6009668516).abs() < 1e-5);
        assert!(r.s_hi - r.s_lo <= 1e-6);
        let s = |x: f64| 0.5f64.powf(x) + (1.0 / 6.0f64).powf(x);
        assert!(s(r.s_lo) >= 1.0 && s(r.s_hi) <= 1.0);
    }

    #[test]
    fn single_word_and_degenerate_covers() {
        let r = pressure_root(words(&[&[1]]), 1e-4).unwrap();
        assert_eq!(r.root, 0.0);
        assert!(matches!(pressure_root(vec![Word::empty()], 1e-4), Err(Error::NoRoot(_))));
        assert!(pressure_root(Vec::<Word>::new(), 1e-4).is_err());
        // overlapping cover with sum > 1 at s = 1
        assert!(matches!(
            pressure_root(words(&[&[1], &[1], &[1]]), 1e-4),
            Err(Error::NoRoot(_))
        ));
    }

    #[test]
    fn finite_alphabet_root_below_one() {
        let r = pressure_root(words(&[&[1], &[2], &[3], &[4], &[5]]), 1e-4).unwrap();
        assert!(r.root < 1.0 && r.root > 0.0);
    }

    #[test]
    fn e2_series_oracle_values() {
        let s = dim_series(SetKind::En, 2, 12, DEFAULT_TOL, DEFAULT_COVER_BUDGET).unwrap();
        assert_eq!(s.estimates.len(), 12);
        assert!((s.estimates[0].root - 0.60097).abs() < 2e-4);
        assert!((s.estimates[9].root - 0.53508).abs() < 2e-4);
        assert!((s.estimates[11].root - 0.53444).abs() < 2e-4);
    }

    #[test]
    fn sn_cover_matches_enumeration() {
        for depth in [1u64, 2, 9, 10, 13] {
            let mut fast = cover_logs(SetKind::Sn, 2, depth, 1 << 20).unwrap();
            let mut slow: Vec<f64> = enumerate_a_n(2, depth as usize, 1 << 20)
                .unwrap()
                .map(|w| word_log(w.digits()).unwrap())
                .collect();
            fast.sort_by(f64::total_cmp);
            slow.sort_by(f64::total_cmp);
            assert_eq!(fast, slow, "depth {depth}");
        }
    }

    #[test]
    fn monotone_in_alphabet() {
        for depth in 1..=5 {
            let mut prev = 0.0;
            for n in 2..=5 {
                let e = dim_estimate(SetKind::En, n, depth, 1e-5, 1 << 20).unwrap();
                assert!(e.root > prev, "N={n} depth={depth}");
                prev = e.root;
            }
        }
    }

    #[test]
    fn thread_count_does_not_change_estimates() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| dim_estimate(SetKind::Sn, 3, 14, 1e-5, 1 << 22).unwrap())
        };
        assert_eq!(run(1), run(5));
    }

    #[test]
    fn budget_stops_series_with_diagnostic() {
        let s = dim_series(SetKind::En, 3, 10, 1e-3, 1000).unwrap();
        assert_eq!(s.estimates.len(), 6);
        assert!(s.diagnostic.is_some());
    }

    #[test]
    fn jarnik_examples() {
        let b = jarnik_bracket(8, 30).unwrap();
        assert!((b.lo.to_f64() - 0.81966).abs() < 1e-5);
        assert!((b.hi.to_f64() - 0.99249).abs() < 1e-5);
        let b = jarnik_bracket(16, 30).unwrap();
        assert!((b.lo.to_f64() - 0.90983).abs() < 1e-5);
        assert!(jarnik_bracket(7, 30).is_err());
    }

    #[test]
    fn csv_shape() {
        let s = dim_series(SetKind::En, 2, 3, 1e-3, 1 << 10).unwrap();
        let csv = to_csv(&s.estimates);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("EN,2,1,2,"));
    }
}
