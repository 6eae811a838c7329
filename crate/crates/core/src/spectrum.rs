//! Fourier–Bohr coefficients at rational frequencies, spectral mass and
//! genericity diagnostics.

use std::collections::HashMap;
use std::f64::consts::TAU;

use num::complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd, CompensatedSum};
use crate::error::{invalid, Error, Result};
use crate::seqcore::{word_counts, Sequence, Symbol, SubseqScheme, Weighting, CHUNK};

/// `c_N(p/q) = (1/N) Σ_{n <= N} w(x(n)) e^{-2πi p n / q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierBohrCoefficient {
    pub p: u64,
    pub q: u64,
    #[serde(skip)]
    pub value: Complex64,
    pub cutoff: u64,
}

impl FourierBohrCoefficient {
    pub fn abs(&self) -> f64 {
        self.value.norm()
    }

    pub fn frequency(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

fn check_fraction(p: u64, q: u64) -> Result<()> {
    if q == 0 || p >= q || gcd(p, q) != 1 {
        return Err(invalid(format!("{p}/{q} is not a reduced fraction in [0, 1)")));
    }
    Ok(())
}

/// `e^{-2πi j/q}` for `0 <= j < q`, built so that `phase(q - j)` is the
/// exact conjugate of `phase(j)`.
fn phase(j: u64, q: u64) -> (f64, f64) {
    if j == 0 {
        (1.0, 0.0)
    } else if 2 * j == q {
        (-1.0, 0.0)
    } else if 2 * j < q {
        let t = TAU * j as f64 / q as f64;
        (t.cos(), -t.sin())
    } else {
        let t = TAU * (q - j) as f64 / q as f64;
        (t.cos(), t.sin())
    }
}

/// `Σ_{n <= N, n ≡ r (mod q)} w(n)` for `r = 0..q`, reduced chunk by chunk in order.
fn residue_sums(w: &[f64], q: u64) -> Vec<f64> {
    let qs = q as usize;
    let parts: Vec<Vec<CompensatedSum>> = w
        .par_chunks(CHUNK as usize)
        .enumerate()
        .map(|(c, vals)| {
            let mut acc = vec![CompensatedSum::default(); qs];
            // position of vals[0] is c*CHUNK + 1
            let mut r = ((c as u64 * CHUNK + 1) % q) as usize;
            for &v in vals {
                acc[r].add(v);
                r += 1;
                if r == qs {
                    r = 0;
                }
            }
            acc
        })
        .collect();
    (0..qs)
        .map(|r| parts.iter().map(|p| p[r].value()).collect::<CompensatedSum>().value())
        .collect()
}

fn coefficient_from_sums(sums: &[f64], p: u64, q: u64, n: u64) -> FourierBohrCoefficient {
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for (r, &s) in sums.iter().enumerate() {
        let (c, si) = phase(p * r as u64 % q, q);
        re.add(s * c);
        im.add(s * si);
    }
    FourierBohrCoefficient {
        p,
        q,
        value: Complex64::new(re.value() / n as f64, im.value() / n as f64),
        cutoff: n,
    }
}

fn weights(x: &Sequence, w: &Weighting, n: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("N must be >= 1"));
    }
    w.check(x.alphabet())?;
    Ok(w.values(x, 1, n))
}

/// Fourier–Bohr coefficient at the reduced fraction `p/q`.
pub fn fourier_bohr(x: &Sequence, w: &Weighting, p: u64, q: u64, n: u64) -> Result<FourierBohrCoefficient> {
    check_fraction(p, q)?;
    let vals = weights(x, w, n)?;
    Ok(coefficient_from_sums(&residue_sums(&vals, q), p, q, n))
}

/// Reduced fractions `p/q`, `q <= q_max`, ordered by `q` then `p`.
pub fn reduced_fractions(q_max: u64) -> Vec<(u64, u64)> {
    (1..=q_max)
        .flat_map(|q| (0..q).filter(move |&p| gcd(p, q) == 1).map(move |p| (p, q)))
        .collect()
}

/// All coefficients with `q <= q_max`, ordered by `q` then `p`.
pub fn rational_coefficients(x: &Sequence, w: &Weighting, q_max: u64, n: u64) -> Result<Vec<FourierBohrCoefficient>> {
    if q_max == 0 {
        return Err(invalid("q_max must be >= 1"));
    }
    let vals = weights(x, w, n)?;
    let per_q: Vec<Vec<FourierBohrCoefficient>> = (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let sums = residue_sums(&vals, q);
            (0..q)
                .filter(|&p| gcd(p, q) == 1)
                .map(|p| coefficient_from_sums(&sums, p, q, n))
                .collect()
        })
        .collect();
    Ok(per_q.into_iter().flatten().collect())
}

/// Default significance floor `3/√N`.
pub fn default_floor(n: u64) -> f64 {
    3.0 / (n as f64).sqrt()
}

/// Coefficients with `|c| > floor`, largest first (ties by `q`, then `p`).
pub fn rational_spectrum_scan(
    x: &Sequence,
    w: &Weighting,
    q_max: u64,
    n: u64,
    floor: f64,
) -> Result<Vec<FourierBohrCoefficient>> {
    let mut out: Vec<_> = rational_coefficients(x, w, q_max, n)?
        .into_iter()
        .filter(|c| c.abs() > floor)
        .collect();
    out.sort_by(|a, b| {
        b.abs()
            .total_cmp(&a.abs())
            .then(a.q.cmp(&b.q))
            .then(a.p.cmp(&b.p))
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralMass {
    pub q_max: u64,
    pub cutoff: u64,
    /// `Σ |c_N(p/q)|²` over reduced `p/q`, `q <= q_max`.
    pub mass: f64,
    /// `(1/N) Σ w(x(n))²`.
    pub energy: f64,
    pub ratio: f64,
}

/// Share of the empirical energy carried by rational frequencies of
/// denominator at most `q_max`.
pub fn spectral_mass_ratio(x: &Sequence, w: &Weighting, q_max: u64, n: u64) -> Result<SpectralMass> {
    let coeffs = rational_coefficients(x, w, q_max, n)?;
    let vals = w.values(x, 1, n);
    let energy = vals
        .par_chunks(CHUNK as usize)
        .map(|c| c.iter().map(|v| v * v).collect::<CompensatedSum>().value())
        .collect::<Vec<f64>>()
        .into_iter()
        .collect::<CompensatedSum>()
        .value()
        / n as f64;
    if energy == 0.0 {
        return Err(Error::Undefined("spectral mass ratio of a zero-energy input".into()));
    }
    let mass = coeffs.iter().map(|c| c.value.norm_sqr()).collect::<CompensatedSum>().value();
    Ok(SpectralMass {
        q_max,
        cutoff: n,
        mass,
        energy,
        ratio: mass / energy,
    })
}

/// Total-variation distances between length-`len` word statistics at
/// consecutive cutoffs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenericityRow {
    pub len: usize,
    /// `distances[i]` compares `N_{i+1}` with `N_{i+2}`.
    pub distances: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenericityReport {
    pub cutoffs: Vec<u64>,
    pub rows: Vec<GenericityRow>,
}

impl GenericityReport {
    /// Largest distance over all lengths among the last `count` comparisons.
    pub fn tail_max(&self, count: usize) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.distances.iter().rev().take(count))
            .copied()
            .fold(0.0, f64::max)
    }
}

fn total_variation(a: &HashMap<Vec<Symbol>, u64>, na: u64, b: &HashMap<Vec<Symbol>, u64>, nb: u64) -> f64 {
    let fa = |w: &Vec<Symbol>| a.get(w).map_or(0.0, |&c| c as f64 / na as f64);
    let fb = |w: &Vec<Symbol>| b.get(w).map_or(0.0, |&c| c as f64 / nb as f64);
    // sorted so the summation order is fixed
    let mut words: Vec<&Vec<Symbol>> = a.keys().chain(b.keys().filter(|w| !a.contains_key(*w))).collect();
    words.sort();
    let acc: CompensatedSum = words.into_iter().map(|w| (fa(w) - fb(w)).abs()).collect();
    acc.value() / 2.0
}

/// Word-statistics drift along `N_1, ..., N_k` for lengths `1..=l_max`.
pub fn genericity_diagnostic(x: &Sequence, l_max: usize, scheme: &SubseqScheme, k: usize) -> Result<GenericityReport> {
    if l_max == 0 {
        return Err(invalid("L_max must be >= 1"));
    }
    if k < 2 {
        return Err(invalid("need at least two cutoffs"));
    }
    let cutoffs = scheme.cutoffs_upto(k)?;
    let rows = (1..=l_max)
        .map(|len| {
            let stats: Vec<_> = cutoffs.par_iter().map(|&n| word_counts(x, len, n)).collect();
            let distances = stats
                .windows(2)
                .zip(cutoffs.windows(2))
                .map(|(s, n)| total_variation(&s[0], n[0], &s[1], n[1]))
                .collect();
            GenericityRow { len, distances }
        })
        .collect();
    Ok(GenericityReport { cutoffs, rows })
}
