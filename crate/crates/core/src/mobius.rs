//! Möbius sieve and weighted Möbius averages: long averages, short
//! intervals, exceptional sets and the dyadic decomposition.

use num::{BigInt, BigRational};
use rayon::prelude::*;

use crate::arith::CompensatedSum;
use crate::error::{invalid, Result};
use crate::seqcore::{AverageSeries, Exact, Sequence, SubseqScheme, Weighting, CHUNK};

/// `μ(1), ..., μ(N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobiusTable {
    values: Vec<i8>,
}

impl MobiusTable {
    pub fn len(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `μ(n)` for `1 <= n <= N`.
    pub fn get(&self, n: u64) -> i8 {
        self.values[n as usize]
    }

    /// `μ(first), ..., μ(first + len - 1)`.
    pub fn slice(&self, first: u64, len: u64) -> &[i8] {
        &self.values[first as usize..(first + len) as usize]
    }

    /// `M(n) = Σ_{m <= n} μ(m)`.
    pub fn mertens(&self, n: u64) -> i64 {
        self.values[1..=n as usize].iter().map(|&v| v as i64).sum()
    }
}

/// Linear sieve for `μ` on `[1, N]`.
pub fn mobius_sieve(n: u64) -> Result<MobiusTable> {
    if n == 0 {
        return Err(invalid("N must be >= 1"));
    }
    if n > 1 << 33 {
        return Err(invalid("Möbius table too large"));
    }
    let n = n as usize;
    let mut mu = vec![0i8; n + 1];
    let mut composite = vec![false; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    mu[1] = 1;
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u32);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p as usize;
            if ip > n {
                break;
            }
            composite[ip] = true;
            if i % p as usize == 0 {
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    Ok(MobiusTable { values: mu })
}

fn ensure_covers(table: &MobiusTable, last: u64) -> Result<()> {
    if table.len() < last {
        return Err(invalid(format!("Möbius table covers {} < {last}", table.len())));
    }
    Ok(())
}

/// `Σ_{first <= n <= last} w(n) μ(n)`, chunked and reduced in order.
fn weighted_sum(x: &Sequence, w: &Weighting, table: &MobiusTable, first: u64, last: u64) -> f64 {
    if last < first {
        return 0.0;
    }
    let chunks = (last - first) / CHUNK + 1;
    let parts: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let s = first + c * CHUNK;
            let len = CHUNK.min(last - s + 1);
            let vals = w.values(x, s, len);
            let mut acc = CompensatedSum::default();
            for (v, &m) in vals.iter().zip(table.slice(s, len)) {
                if m != 0 {
                    acc.add(v * m as f64);
                }
            }
            acc.value()
        })
        .collect();
    parts.into_iter().collect::<CompensatedSum>().value()
}

/// `(1/N_k) Σ_{n <= N_k} w(x(n)) μ(n)`, sieving `μ` up to the last cutoff.
pub fn weighted_mobius_average(x: &Sequence, w: &Weighting, scheme: &SubseqScheme, k: usize) -> Result<AverageSeries> {
    let cutoffs = scheme.reported(k)?;
    let table = mobius_sieve(*cutoffs.last().unwrap())?;
    weighted_mobius_average_with(&table, x, w, scheme, k)
}

/// As [`weighted_mobius_average`] with a precomputed table.
pub fn weighted_mobius_average_with(
    table: &MobiusTable,
    x: &Sequence,
    w: &Weighting,
    scheme: &SubseqScheme,
    k: usize,
) -> Result<AverageSeries> {
    w.check(x.alphabet())?;
    let cutoffs = scheme.reported(k)?;
    ensure_covers(table, *cutoffs.last().unwrap())?;
    let mut sums = Vec::with_capacity(cutoffs.len());
    let mut acc = CompensatedSum::default();
    let mut prev = 0;
    for &n in &cutoffs {
        acc.add(weighted_sum(x, w, table, prev + 1, n));
        sums.push(acc.value());
        prev = n;
    }
    // integral weights keep every partial sum an exact integer
    let exact: Option<Vec<Exact>> = w.is_integral().then(|| {
        sums.iter()
            .zip(&cutoffs)
            .map(|(&s, &n)| BigRational::new(BigInt::from(s.round() as i64), BigInt::from(n)))
            .collect()
    });
    Ok(AverageSeries {
        label: format!("mobius-weighted {}", x.kind()),
        values: sums.iter().zip(&cutoffs).map(|(s, &n)| s / n as f64).collect(),
        cutoffs,
        exact,
    })
}

/// `Σ_{n <= N, n ≡ r (mod q)} μ(n)` for `r = 0..q`, indexed by `r`.
pub fn progression_mobius_sums(table: &MobiusTable, q: u64, n: u64) -> Result<Vec<i64>> {
    if q == 0 {
        return Err(invalid("q must be >= 1"));
    }
    ensure_covers(table, n)?;
    let mut sums = vec![0i64; q as usize];
    for m in 1..=n {
        sums[(m % q) as usize] += table.get(m) as i64;
    }
    Ok(sums)
}

/// `sup_a |(1/N) Σ a(n) μ(n)|` over all period-`q` weights with `|a| <= 1`,
/// which equals `Σ_r |Σ_{n ≡ r} μ(n)| / N`, for each `q = 1..=q_max`.
pub fn dirichlet_baseline(table: &MobiusTable, q_max: u64, n: u64) -> Result<Vec<(u64, f64)>> {
    (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let sums = progression_mobius_sums(table, q, n)?;
            Ok((q, sums.iter().map(|s| s.unsigned_abs()).sum::<u64>() as f64 / n as f64))
        })
        .collect()
}

/// `b_m(H) = (1/H) Σ_{m <= h < m + H} w(h) μ(h)` for `m = first..first + count`.
fn window_averages(
    x: &Sequence,
    w: &Weighting,
    table: &MobiusTable,
    h: u64,
    first: u64,
    count: u64,
) -> Result<Vec<f64>> {
    let last = first + count + h - 2;
    ensure_covers(table, last)?;
    let vals = w.values(x, first, count + h - 1);
    let terms: Vec<f64> = vals
        .iter()
        .zip(table.slice(first, count + h - 1))
        .map(|(v, &m)| v * m as f64)
        .collect();
    // windows recomputed every CHUNK positions to stop drift in the running sum
    let out: Vec<f64> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|c| {
            let start = (c * CHUNK) as usize;
            let end = ((c + 1) * CHUNK).min(count) as usize;
            let hh = h as usize;
            let mut acc: CompensatedSum = terms[start..start + hh].iter().copied().collect();
            let mut res = Vec::with_capacity(end - start);
            res.push(acc.value() / h as f64);
            for i in start + 1..end {
                acc.add(terms[i + hh - 1]);
                acc.add(-terms[i - 1]);
                res.push(acc.value() / h as f64);
            }
            res
        })
        .collect();
    Ok(out)
}

/// `(1/M) Σ_{M <= m < 2M} |(1/H) Σ_{m <= h < m + H} w(x(h)) μ(h)|`.
pub fn short_interval_double_average(x: &Sequence, w: &Weighting, h: u64, m: u64) -> Result<f64> {
    if h == 0 || m == 0 {
        return Err(invalid("H and M must be >= 1"));
    }
    w.check(x.alphabet())?;
    let table = mobius_sieve(2 * m + h)?;
    let b = window_averages(x, w, &table, h, m, m)?;
    Ok(b.iter().map(|v| v.abs()).collect::<CompensatedSum>().value() / m as f64)
}

/// Fraction of `m <= N` with `|(1/H) Σ_{m <= h < m + H} w(x(h)) μ(h)| < δ`.
pub fn short_interval_exceptional_density(x: &Sequence, w: &Weighting, h: u64, delta: f64, n: u64) -> Result<f64> {
    if h == 0 || n == 0 || delta <= 0.0 {
        return Err(invalid("need H >= 1, N >= 1 and delta > 0"));
    }
    w.check(x.alphabet())?;
    let table = mobius_sieve(n + h)?;
    let b = window_averages(x, w, &table, h, 1, n)?;
    Ok(b.iter().filter(|v| v.abs() < delta).count() as f64 / n as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicCheck {
    /// `(1/N) Σ_{m <= N} |b_m(H)|`.
    pub full: f64,
    /// `Σ_{j=1}^{ℓ} 2^{-j} · avg_{m ∈ [N/2^j, N/2^{j-1})} |b_m(H)|`.
    pub combined: f64,
    pub depth: u32,
    /// `2^{-ℓ} + ℓ/N` times `max |w|`.
    pub bound: f64,
}

impl DyadicCheck {
    pub fn holds(&self) -> bool {
        (self.full - self.combined).abs() <= self.bound + 1e-12
    }
}

/// Splits `[1, N]` into dyadic blocks `(N/2^j, N/2^{j-1}]` and compares the
/// full average of `|b_m(H)|` with the `2^{-j}`-weighted block averages.
pub fn dyadic_check(x: &Sequence, w: &Weighting, h: u64, n: u64, depth: u32) -> Result<DyadicCheck> {
    if h == 0 || n == 0 || depth == 0 || depth > 40 {
        return Err(invalid("need H >= 1, N >= 1 and 1 <= depth <= 40"));
    }
    w.check(x.alphabet())?;
    let table = mobius_sieve(n + h)?;
    let b: Vec<f64> = window_averages(x, w, &table, h, 1, n)?.into_iter().map(f64::abs).collect();
    let full = b.iter().copied().collect::<CompensatedSum>().value() / n as f64;
    let mut combined = CompensatedSum::default();
    for j in 1..=depth {
        let hi = n >> (j - 1);
        let lo = n >> j;
        if hi == lo {
            continue;
        }
        let block = &b[lo as usize..hi as usize];
        let avg = block.iter().copied().collect::<CompensatedSum>().value() / block.len() as f64;
        combined.add(avg / 2f64.powi(j as i32));
    }
    Ok(DyadicCheck {
        full,
        combined: combined.value(),
        depth,
        bound: w.bound() * (2f64.powi(-(depth as i32)) + depth as f64 / n as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith;
    use crate::generators::{periodic_binary, squarefree_seq};
    use crate::seqcore::{to_f64, Alphabet};

    fn ones() -> Sequence {
        Sequence::constant_binary(true)
    }

    fn unit() -> Weighting {
        Weighting::constant(1.0, &Alphabet::binary())
    }

    #[test]
    fn sieve_values() {
        let t = mobius_sieve(100_000).unwrap();
        assert_eq!((t.get(1), t.get(2), t.get(4), t.get(6), t.get(30)), (1, -1, 0, 1, -1));
        for n in 1..=100_000 {
            assert_eq!(t.get(n), arith::mobius(n), "n={n}");
        }
        let sq = (1..=10_000).filter(|&n| t.get(n) != 0).count() as f64 / 1e4;
        assert!((sq - 0.6083).abs() < 1e-3);
        assert!(mobius_sieve(0).is_err());
    }

    #[test]
    fn mu_squared_is_squarefree_indicator() {
        let n = 1_000_000;
        let t = mobius_sieve(n).unwrap();
        let q = squarefree_seq().prefix(n);
        for m in 1..=n {
            assert_eq!((t.get(m) as i32).pow(2), q[m as usize - 1] as i32);
        }
    }

    #[test]
    fn mertens_average() {
        let scheme = SubseqScheme::geometric(1000, 10, 4).unwrap();
        let a = weighted_mobius_average(&ones(), &unit(), &scheme, 4).unwrap();
        let t = mobius_sieve(1_000_000).unwrap();
        let ex = a.exact.clone().unwrap();
        for (i, &n) in a.cutoffs.iter().enumerate() {
            assert_eq!(ex[i], BigRational::new(t.mertens(n).into(), n.into()));
            assert!((a.values[i] - to_f64(&ex[i])).abs() < 1e-12);
        }
        assert!(a.tail().abs() < 0.005);
        let zero = Weighting::constant(0.0, &Alphabet::binary());
        assert!(weighted_mobius_average(&ones(), &zero, &scheme, 4).unwrap().values.iter().all(|&v| v == 0.0));
        // μ · 1_Q = μ
        let id = Weighting::identity(&Alphabet::binary());
        let q = weighted_mobius_average(&squarefree_seq(), &id, &scheme, 4).unwrap();
        assert_eq!(q.values, weighted_mobius_average(&ones(), &unit(), &scheme, 4).unwrap().values);
    }

    #[test]
    fn periodic_weights_follow_progressions() {
        let n = 100_000;
        let t = mobius_sieve(n).unwrap();
        let x = periodic_binary("0010").unwrap();
        let id = Weighting::identity(&Alphabet::binary());
        let a = weighted_mobius_average_with(&t, &x, &id, &SubseqScheme::single(n), 1).unwrap();
        let sums = progression_mobius_sums(&t, 4, n).unwrap();
        assert_eq!(a.values[0], sums[3] as f64 / n as f64);
        let base = dirichlet_baseline(&t, 6, n).unwrap();
        // q = 1: |M(N)|/N
        assert_eq!(base[0].1, t.mertens(n).unsigned_abs() as f64 / n as f64);
        // the baseline dominates the specific weight
        assert!(a.values[0].abs() <= base[3].1);
    }

    #[test]
    fn short_interval_cases() {
        let zero = Weighting::constant(0.0, &Alphabet::binary());
        assert_eq!(short_interval_double_average(&ones(), &zero, 10, 1000).unwrap(), 0.0);
        let m = 100_000;
        let h1 = short_interval_double_average(&ones(), &unit(), 1, m).unwrap();
        let sq = (m..2 * m).filter(|&k| arith::is_squarefree(k)).count() as f64 / m as f64;
        assert!((h1 - sq).abs() < 1e-12);
        assert!((h1 - 0.608).abs() < 0.005);
        let v = short_interval_double_average(&ones(), &unit(), 100, m).unwrap();
        assert!(v <= 0.15, "{v}");
        // direct oracle on a small block
        let t = mobius_sieve(3000).unwrap();
        let (hh, mm) = (7u64, 1000u64);
        let direct: f64 = (mm..2 * mm)
            .map(|s| ((s..s + hh).map(|k| t.get(k) as f64).sum::<f64>() / hh as f64).abs())
            .sum::<f64>()
            / mm as f64;
        assert!((short_interval_double_average(&ones(), &unit(), hh, mm).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn exceptional_density_cases() {
        let zero = Weighting::constant(0.0, &Alphabet::binary());
        assert_eq!(short_interval_exceptional_density(&ones(), &zero, 10, 0.01, 1000).unwrap(), 1.0);
        assert_eq!(short_interval_exceptional_density(&ones(), &unit(), 10, 1.5, 1000).unwrap(), 1.0);
        let f = short_interval_exceptional_density(&ones(), &unit(), 1000, 0.1, 100_000).unwrap();
        assert!(f >= 0.9, "{f}");
        assert!(short_interval_exceptional_density(&ones(), &unit(), 10, 0.0, 100).is_err());
    }

    #[test]
    fn dyadic_decomposition() {
        for depth in 1..=10 {
            let c = dyadic_check(&ones(), &unit(), 50, 1 << 18, depth).unwrap();
            assert!(c.holds(), "{c:?}");
            assert!(c.bound <= 2f64.powi(-(depth as i32)) + depth as f64 / (1u64 << 18) as f64);
        }
        let c = dyadic_check(&squarefree_seq(), &Weighting::identity(&Alphabet::binary()), 20, 300_001, 6).unwrap();
        assert!(c.holds());
    }
}
