//! Besicovitch and Weyl pseudo-metric estimates and best periodic
//! approximants.

use rayon::prelude::*;

use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::generators::periodic_seq;
use crate::seqcore::{ratio, to_f64, Exact, Sequence, SubseqScheme, Symbol, CHUNK, EXACT_PERIOD_CAP};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricEstimate {
    /// Exact value when known, otherwise the estimate at the cutoff.
    pub value: f64,
    /// Mismatch fraction actually measured at the cutoff.
    pub empirical: f64,
    pub cutoff: u64,
    /// Largest window start examined (Weyl only).
    pub window_cap: Option<u64>,
    /// Closed form for two periodic inputs.
    pub exact: Option<Exact>,
    /// Largest empirical value over the last three cutoffs.
    pub tail_max: f64,
}

impl MetricEstimate {
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicApproximant {
    pub period: u64,
    /// `word[i]` is the symbol at positions `n ≡ i + 1 (mod q)`.
    pub word: Vec<Symbol>,
    /// Mismatch fraction against the input on `[1, N_k]`.
    pub distance: f64,
    pub cutoff: u64,
}

fn check_alphabets(x: &Sequence, y: &Sequence) -> Result<()> {
    if x.alphabet() != y.alphabet() {
        return Err(Error::AlphabetMismatch {
            left: x.alphabet().symbols().to_vec(),
            right: y.alphabet().symbols().to_vec(),
        });
    }
    Ok(())
}

/// `|{first <= n <= last : x(n) != y(n)}|`.
pub(crate) fn count_mismatches(x: &Sequence, y: &Sequence, first: u64, last: u64) -> u64 {
    if last < first {
        return 0;
    }
    let chunks = (last - first) / CHUNK + 1;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let s = first + c * CHUNK;
            let len = CHUNK.min(last - s + 1);
            let a = x.range(s, len);
            let b = y.range(s, len);
            a.iter().zip(&b).filter(|(p, q)| p != q).count() as u64
        })
        .sum()
}

/// Exact `d_B(x, y)` for periodic inputs whose common period is small enough.
fn periodic_mismatch(x: &Sequence, y: &Sequence) -> Option<Exact> {
    let l = arith::lcm(x.period()?, y.period()?)?;
    if l > EXACT_PERIOD_CAP {
        return None;
    }
    Some(ratio(count_mismatches(x, y, 1, l), l))
}

/// Mismatch frequency on `[1, N_k]`.
pub fn db_estimate(x: &Sequence, y: &Sequence, scheme: &SubseqScheme, k: usize) -> Result<MetricEstimate> {
    check_alphabets(x, y)?;
    let tail = scheme.tail(k)?;
    let mut prev = 0;
    let mut acc = 0;
    let mut vals = Vec::with_capacity(tail.len());
    for &n in &tail {
        acc += count_mismatches(x, y, prev + 1, n);
        vals.push(acc as f64 / n as f64);
        prev = n;
    }
    let empirical = *vals.last().unwrap();
    let exact = periodic_mismatch(x, y);
    Ok(MetricEstimate {
        value: exact.as_ref().map_or(empirical, to_f64),
        empirical,
        cutoff: *tail.last().unwrap(),
        window_cap: None,
        exact,
        tail_max: vals.iter().copied().fold(0.0, f64::max),
    })
}

/// `max_{1 <= ℓ <= L} |{ℓ <= n < ℓ + N : x(n) != y(n)}| / N`, a lower bound
/// for the inner supremum of the Weyl pseudo-metric.
pub fn dw_estimate(x: &Sequence, y: &Sequence, n: u64, l: u64) -> Result<MetricEstimate> {
    check_alphabets(x, y)?;
    if n == 0 || l == 0 {
        return Err(invalid("Weyl estimate needs N >= 1 and L >= 1"));
    }
    let span = l
        .checked_add(n - 1)
        .ok_or_else(|| Error::Overflow("Weyl window span".into()))?;
    let chunks = (span - 1) / CHUNK + 1;
    let diff: Vec<u8> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let s = 1 + c * CHUNK;
            let len = CHUNK.min(span - s + 1);
            let a = x.range(s, len);
            let b = y.range(s, len);
            a.into_iter().zip(b).map(|(p, q)| (p != q) as u8).collect::<Vec<_>>()
        })
        .collect();
    let n_us = n as usize;
    let mut window: u64 = diff[..n_us].iter().map(|&d| d as u64).sum();
    let mut best = window;
    for start in 1..l as usize {
        window = window + diff[start + n_us - 1] as u64 - diff[start - 1] as u64;
        best = best.max(window);
    }
    let empirical = best as f64 / n as f64;
    let exact = periodic_mismatch(x, y);
    Ok(MetricEstimate {
        value: empirical,
        empirical,
        cutoff: n,
        window_cap: Some(l),
        exact,
        tail_max: empirical,
    })
}

/// Per-residue symbol counts on `[1, N]`: `counts[r * |A| + a]` for `n ≡ r + 1 (mod q)`.
fn residue_counts(x: &Sequence, q: u64, n: u64) -> Vec<u64> {
    let width = x.alphabet().len();
    let size = q as usize * width;
    if n == 0 {
        return vec![0; size];
    }
    let chunks = (n - 1) / CHUNK + 1;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let s = 1 + c * CHUNK;
            let len = CHUNK.min(n - s + 1);
            let syms = x.range(s, len);
            let mut counts = vec![0u64; size];
            let mut r = ((s - 1) % q) as usize;
            for &a in &syms {
                counts[r * width + a as usize] += 1;
                r += 1;
                if r == q as usize {
                    r = 0;
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(p, v)| *p += v);
                a
            },
        )
}

fn majority_word(counts: &[u64], q: u64, width: usize) -> (Vec<Symbol>, u64) {
    let mut word = Vec::with_capacity(q as usize);
    let mut agree = 0;
    for row in counts.chunks(width) {
        // first maximum wins: ties go to the earlier symbol
        let (sym, &c) = row
            .iter()
            .enumerate()
            .fold((0, &row[0]), |best, (i, c)| if c > best.1 { (i, c) } else { best });
        word.push(sym as Symbol);
        agree += c;
    }
    (word, agree)
}

/// Majority vote per residue class mod `q` on `[1, N_k]`.
pub fn best_periodic_approx(x: &Sequence, q: u64, scheme: &SubseqScheme, k: usize) -> Result<PeriodicApproximant> {
    if q == 0 {
        return Err(invalid("period must be >= 1"));
    }
    let n = scheme.cutoff(k)?;
    let width = x.alphabet().len();
    let counts = residue_counts(x, q, n);
    let (word, agree) = majority_word(&counts, q, width);
    Ok(PeriodicApproximant {
        period: q,
        word,
        distance: (n - agree) as f64 / n as f64,
        cutoff: n,
    })
}

impl PeriodicApproximant {
    pub fn sequence(&self, like: &Sequence) -> Result<Sequence> {
        periodic_seq(like.alphabet().clone(), self.word.clone())
    }
}

/// Best period-`q` distance for `q = 1..=q_max`.
pub fn rap_profile(x: &Sequence, q_max: u64, scheme: &SubseqScheme, k: usize) -> Result<Vec<(u64, f64)>> {
    if q_max == 0 {
        return Err(invalid("q_max must be >= 1"));
    }
    rap_profile_at(x, &(1..=q_max).collect::<Vec<_>>(), scheme, k)
}

/// Best distance at each listed period.
pub fn rap_profile_at(x: &Sequence, periods: &[u64], scheme: &SubseqScheme, k: usize) -> Result<Vec<(u64, f64)>> {
    periods
        .iter()
        .map(|&q| Ok((q, best_periodic_approx(x, q, scheme, k)?.distance)))
        .collect()
}
