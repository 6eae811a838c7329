//! Sets of multiples `ℳ_B = ⋃ bℕ` and B-free numbers `ℱ_B = ℕ ∖ ℳ_B`:
//! exact densities, truncation curves, tautness and shift divisibility.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::integer::Integer;
use num::{BigInt, BigRational, BigUint, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd, isqrt};
use crate::error::{invalid, Error, Result};
use crate::seqcore::{ratio, Exact, Sequence, CHUNK};

/// Default bound on `|B|` for inclusion–exclusion.
pub const DEFAULT_IE_CAP: usize = 25;

/// Memo entries allowed for the recursive free-density evaluation.
const RECURSION_BUDGET: usize = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BRule {
    /// `{p² : p prime}`
    PrimeSquares,
    /// all primes
    Primes,
    /// `{k² : k >= 2}` (not primitive)
    Squares,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primitivity {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Explicit(Vec<u64>),
    Rule(BRule),
}

/// A set `B ⊂ ℕ ∖ {1}`: an explicit sorted list or a rule with an enumerator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSet {
    repr: Repr,
}

impl BSet {
    pub fn explicit(mut elements: Vec<u64>) -> Result<Self> {
        if elements.iter().any(|&b| b < 2) {
            return Err(invalid("B-sets may not contain 0 or 1"));
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(BSet {
            repr: Repr::Explicit(elements),
        })
    }

    pub fn rule(rule: BRule) -> Self {
        BSet {
            repr: Repr::Rule(rule),
        }
    }

    pub fn prime_squares() -> Self {
        Self::rule(BRule::PrimeSquares)
    }

    /// Parses one integer per line; `#` starts a comment.
    pub fn parse_list(text: &str) -> Result<Self> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let v: u64 = body
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: expected an integer, got {body:?}", i + 1)))?;
            out.push(v);
        }
        Self::explicit(out)
    }

    /// The element list when `B` is given explicitly.
    pub fn elements(&self) -> Option<&[u64]> {
        match &self.repr {
            Repr::Explicit(v) => Some(v),
            Repr::Rule(_) => None,
        }
    }

    pub(crate) fn require_explicit(&self) -> Result<&[u64]> {
        self.elements()
            .ok_or_else(|| invalid("operation needs an explicit finite B; truncate rule sets first"))
    }

    pub fn primitivity(&self) -> Primitivity {
        match &self.repr {
            Repr::Explicit(v) => {
                if is_primitive(v) {
                    Primitivity::Yes
                } else {
                    Primitivity::No
                }
            }
            Repr::Rule(BRule::PrimeSquares | BRule::Primes) => Primitivity::Yes,
            Repr::Rule(BRule::Squares) => Primitivity::No,
        }
    }

    pub(crate) fn is_all_above_one(&self) -> bool {
        matches!(self.repr, Repr::Rule(BRule::Primes))
    }

    /// Is `n ∈ ℳ_B`?
    pub fn has_multiple(&self, n: u64) -> bool {
        match &self.repr {
            Repr::Explicit(v) => v.iter().any(|&b| n % b == 0),
            Repr::Rule(BRule::PrimeSquares | BRule::Squares) => !arith::is_squarefree(n),
            Repr::Rule(BRule::Primes) => n >= 2,
        }
    }

    /// Elements `<= bound`, ascending.
    pub fn elements_upto(&self, bound: u64) -> Vec<u64> {
        match &self.repr {
            Repr::Explicit(v) => v.iter().copied().take_while(|&b| b <= bound).collect(),
            Repr::Rule(BRule::PrimeSquares) => arith::primes_with_square_upto(bound)
                .into_iter()
                .map(|p| p * p)
                .collect(),
            Repr::Rule(BRule::Primes) => arith::primes_below(bound.saturating_add(1)),
            Repr::Rule(BRule::Squares) => (2..=isqrt(bound)).map(|k| k * k).collect(),
        }
    }

    /// `B(m) = {b_1 < ... < b_m}`.
    pub fn first(&self, m: usize) -> Result<Vec<u64>> {
        match &self.repr {
            Repr::Explicit(v) => {
                if m > v.len() {
                    Err(invalid(format!("B has only {} elements", v.len())))
                } else {
                    Ok(v[..m].to_vec())
                }
            }
            Repr::Rule(_) => {
                let mut bound = 64u64;
                loop {
                    let els = self.elements_upto(bound);
                    if els.len() >= m {
                        return Ok(els[..m].to_vec());
                    }
                    bound = bound
                        .checked_mul(4)
                        .ok_or_else(|| Error::Overflow("enumerating B".into()))?;
                }
            }
        }
    }
}

impl fmt::Display for BSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(u64::to_string).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            Repr::Rule(r) => write!(f, "{r:?}"),
        }
    }
}

fn is_primitive(sorted: &[u64]) -> bool {
    sorted
        .iter()
        .enumerate()
        .all(|(i, &b)| sorted[..i].iter().all(|&c| b % c != 0))
}

/// Removes every element divisible by a smaller one.
pub fn primitive_reduction(set: &BSet) -> Result<BSet> {
    let els = set.require_explicit()?;
    Ok(BSet {
        repr: Repr::Explicit(primitive_part(els)),
    })
}

fn primitive_part(sorted: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(sorted.len());
    for &b in sorted {
        if out.iter().all(|&c| b % c != 0) {
            out.push(b);
        }
    }
    out
}

/// Inclusion–exclusion terms grouped by `lcm(S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityDecomposition {
    /// `d(ℳ_B)`.
    pub value: Exact,
    /// `2^|B| - 1` subsets.
    pub term_count: u128,
    /// Distinct `lcm(S)` values with nonzero coefficient.
    pub lcm_classes: usize,
    /// `lcm(B)`, the period of `1_{ℳ_B}`.
    pub period: BigUint,
}

/// `Σ_{∅≠S⊆B} (-1)^{|S|+1} [lcm(S)]`, coefficients merged by lcm.
fn lcm_classes(els: &[u64], cap: usize) -> Result<BTreeMap<BigUint, BigInt>> {
    if els.len() > cap {
        return Err(Error::CapExceeded {
            size: els.len(),
            cap,
        });
    }
    let mut classes: BTreeMap<BigUint, BigInt> = BTreeMap::new();
    for &b in els {
        let bb = BigUint::from(b);
        let mut next = classes.clone();
        for (l, c) in &classes {
            *next.entry(l.lcm(&bb)).or_insert_with(BigInt::zero) -= c;
        }
        *next.entry(bb).or_insert_with(BigInt::zero) += 1;
        next.retain(|_, c| !c.is_zero());
        classes = next;
    }
    Ok(classes)
}

/// Exact `d(ℳ_B)` by inclusion–exclusion, for explicit `B` with `|B| <= cap`.
pub fn multiples_density_exact(set: &BSet, cap: usize) -> Result<DensityDecomposition> {
    let els = set.require_explicit()?;
    let classes = lcm_classes(els, cap)?;
    let value = classes.iter().fold(BigRational::zero(), |acc, (l, c)| {
        acc + BigRational::new(c.clone(), BigInt::from(l.clone()))
    });
    let period = els
        .iter()
        .fold(BigUint::one(), |acc, &b| acc.lcm(&BigUint::from(b)));
    Ok(DensityDecomposition {
        value,
        term_count: (1u128 << els.len()) - 1,
        lcm_classes: classes.len(),
        period,
    })
}

/// `d(ℱ_B)` via `d(ℱ_{B ∪ {b}}) = d(ℱ_B) - (1/b)·d(ℱ_{B'(b)})`, where
/// `B'(b) = {c / gcd(c, b) : c ∈ B}`. Exact, memoized on primitive sets.
#[derive(Debug, Default)]
pub struct FreeDensity {
    memo: HashMap<Vec<u64>, Exact>,
}

impl FreeDensity {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn free_density(&mut self, els: &[u64]) -> Result<Exact> {
        let mut v = els.to_vec();
        v.sort_unstable();
        v.dedup();
        if v.first() == Some(&1) {
            return Ok(BigRational::zero());
        }
        let v = primitive_part(&v);
        self.eval(v)
    }

    fn eval(&mut self, set: Vec<u64>) -> Result<Exact> {
        if set.is_empty() {
            return Ok(BigRational::one());
        }
        if let Some(v) = self.memo.get(&set) {
            return Ok(v.clone());
        }
        if self.memo.len() >= RECURSION_BUDGET {
            return Err(Error::Budget("free-density recursion".into()));
        }
        let (&b, rest) = set.split_last().unwrap();
        let without = self.eval(rest.to_vec())?;
        let mut quotient: Vec<u64> = rest.iter().map(|&c| c / gcd(c, b)).collect();
        quotient.sort_unstable();
        quotient.dedup();
        let inner = if quotient.first() == Some(&1) {
            BigRational::zero()
        } else {
            self.eval(primitive_part(&quotient))?
        };
        let value = without - inner / BigRational::from_integer(BigInt::from(b));
        self.memo.insert(set, value.clone());
        Ok(value)
    }
}

/// `d(ℳ_{B(m)})` for `m = 1..=m_max`; nondecreasing.
pub fn truncation_density_curve(set: &BSet, m_max: usize) -> Result<Vec<Exact>> {
    let els = set.first(m_max)?;
    let mut fd = FreeDensity::new();
    (1..=m_max)
        .map(|m| Ok(BigRational::one() - fd.free_density(&els[..m])?))
        .collect()
}

/// `(1/log N) Σ_{n<=N} seq(n)/n`.
pub fn log_density_estimate(seq: &Sequence, n: u64) -> Result<f64> {
    seq.require_binary()?;
    if n < 2 {
        return Err(invalid("log density needs N >= 2"));
    }
    use rayon::prelude::*;
    let chunks = (n - 1) / CHUNK + 1;
    let parts: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let s = 1 + c * CHUNK;
            let len = CHUNK.min(n - s + 1);
            let syms = seq.range(s, len);
            let mut acc = arith::CompensatedSum::default();
            for (i, &b) in syms.iter().enumerate() {
                if b == 1 {
                    acc.add(1.0 / (s + i as u64) as f64);
                }
            }
            acc.value()
        })
        .collect();
    let total: arith::CompensatedSum = parts.into_iter().collect();
    Ok(total.value() / (n as f64).ln())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TautVerdict {
    pub taut: bool,
    /// First `b` whose removal leaves the density unchanged.
    pub witness: Option<u64>,
}

/// Finite `B` is taut iff removing any element strictly lowers `d(ℳ_B)`.
pub fn is_taut_finite(set: &BSet, cap: usize) -> Result<TautVerdict> {
    let els = set.require_explicit()?;
    let full = multiples_density_exact(set, cap)?.value;
    for (i, &b) in els.iter().enumerate() {
        let mut rest = els.to_vec();
        rest.remove(i);
        let d = multiples_density_exact(&BSet::explicit(rest)?, cap)?.value;
        if d >= full {
            return Ok(TautVerdict {
                taut: false,
                witness: Some(b),
            });
        }
    }
    Ok(TautVerdict {
        taut: true,
        witness: None,
    })
}

/// Repeatedly drops the first density-neutral element until the set is taut.
pub fn taut_reduction(set: &BSet, cap: usize) -> Result<BSet> {
    let mut cur = set.clone();
    loop {
        match is_taut_finite(&cur, cap)?.witness {
            None => return Ok(cur),
            Some(b) => {
                let rest: Vec<u64> = cur.require_explicit()?.iter().copied().filter(|&c| c != b).collect();
                cur = BSet::explicit(rest)?;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoprimeQuotient {
    /// `{b / gcd(b, a)}`, sorted and deduplicated; may contain 1.
    pub elements: Vec<u64>,
    /// `1` occurs, i.e. `a ∈ ℳ_C`.
    pub a_in_multiples: bool,
}

pub fn coprime_quotient_set(set: &BSet, a: u64) -> Result<CoprimeQuotient> {
    if a == 0 {
        return Err(invalid("a must be positive"));
    }
    let mut elements: Vec<u64> = set.require_explicit()?.iter().map(|&b| b / gcd(b, a)).collect();
    elements.sort_unstable();
    elements.dedup();
    let a_in_multiples = elements.first() == Some(&1);
    Ok(CoprimeQuotient {
        elements,
        a_in_multiples,
    })
}

/// `({c : gcd(u, c) > 1}, {c : gcd(u, c) = 1})`.
pub fn split_by_coprimality(elements: &[u64], u: u64) -> (Vec<u64>, Vec<u64>) {
    elements.iter().partition(|&&c| gcd(u, c) > 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProgressionDensity {
    pub exact: Exact,
    pub cutoff: u64,
    /// `|{n <= N : n ≡ r (mod u), n > r, n ∈ ℱ_B}| / N`.
    pub empirical: f64,
}

/// Exact `d(ℳ_B ∩ (uℕ + r))` from the grouped inclusion–exclusion terms.
fn multiples_in_progression(classes: &BTreeMap<BigUint, BigInt>, r: u64, u: u64) -> Exact {
    let ub = BigUint::from(u);
    let rb = BigUint::from(r);
    classes.iter().fold(BigRational::zero(), |acc, (l, c)| {
        // n ≡ 0 (mod l), n ≡ r (mod u) is solvable iff gcd(l, u) | r
        if (&rb % l.gcd(&ub)).is_zero() {
            acc + BigRational::new(c.clone(), BigInt::from(l.lcm(&ub)))
        } else {
            acc
        }
    })
}

/// Density of `ℱ_B ∩ (uℕ + r)`, exact and sampled at `N`.
pub fn shifted_progression_density(
    set: &BSet,
    r: u64,
    u: u64,
    n: u64,
    cap: usize,
) -> Result<ProgressionDensity> {
    if u == 0 {
        return Err(invalid("u must be >= 1"));
    }
    let els = set.require_explicit()?;
    let classes = lcm_classes(els, cap)?;
    let exact = ratio(1, u) - multiples_in_progression(&classes, r, u);
    let count = (1..=n / u)
        .map(|k| k * u + r)
        .take_while(|&m| m <= n)
        .filter(|&m| !set.has_multiple(m))
        .count();
    Ok(ProgressionDensity {
        exact,
        cutoff: n,
        empirical: count as f64 / n.max(1) as f64,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftDivisibility {
    pub r: u64,
    /// `(u, d((ℱ_B - r) ∩ uℕ))`, `u = 1..=u_max`.
    pub rows: Vec<(u64, Exact)>,
    /// All tabulated densities positive.
    pub divisible: bool,
}

/// `u ↦ d((ℱ_B − r) ∩ uℕ) = d(ℱ_B ∩ (uℕ + r))` for `u <= u_max`.
pub fn shift_divisibility_table(set: &BSet, r: u64, u_max: u64, cap: usize) -> Result<ShiftDivisibility> {
    if u_max == 0 {
        return Err(invalid("u_max must be >= 1"));
    }
    let classes = lcm_classes(set.require_explicit()?, cap)?;
    let rows: Vec<(u64, Exact)> = (1..=u_max)
        .map(|u| (u, ratio(1, u) - multiples_in_progression(&classes, r, u)))
        .collect();
    let divisible = rows.iter().all(|(_, d)| d.is_positive());
    Ok(ShiftDivisibility { r, rows, divisible })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueClassReport {
    pub residue: u64,
    pub count: u64,
    /// `count / N`.
    pub density: f64,
    /// No element of the class in `[1, N]`.
    pub empty: bool,
    /// Nonempty and below `(1 − ε)/m`.
    pub flagged: bool,
}

/// Per-class densities of `R ∩ (mℕ + a)` on `[1, N]`.
pub fn inner_regularity_check(seq: &Sequence, m: u64, eps: f64, n: u64) -> Result<Vec<ResidueClassReport>> {
    seq.require_binary()?;
    if m == 0 || n == 0 {
        return Err(invalid("inner regularity needs m >= 1 and N >= 1"));
    }
    let syms = seq.prefix(n);
    let mut counts = vec![0u64; m as usize];
    for (i, &b) in syms.iter().enumerate() {
        if b == 1 {
            counts[((i as u64 + 1) % m) as usize] += 1;
        }
    }
    let threshold = (1.0 - eps) / m as f64;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(a, count)| {
            let density = count as f64 / n as f64;
            let empty = count == 0;
            ResidueClassReport {
                residue: a as u64,
                count,
                density,
                empty,
                flagged: !empty && density < threshold,
            }
        })
        .collect())
}

/// `d(ℳ_B)` over one period by direct sieving; test oracle.
pub fn sieve_density_over_period(els: &[u64]) -> Option<Exact> {
    let period = els.iter().try_fold(1u64, |acc, &b| arith::lcm(acc, b))?;
    if period > 1 << 28 {
        return None;
    }
    let mut hit = vec![false; period as usize + 1];
    for &b in els {
        let mut m = b;
        while m <= period {
            hit[m as usize] = true;
            m += b;
        }
    }
    let count = hit.iter().filter(|&&h| h).count() as u64;
    Some(ratio(count, period))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{bfree_seq, squarefree_seq};
    use crate::seqcore::{count_ones_range, to_f64};
    use proptest::prelude::*;

    fn b(v: &[u64]) -> BSet {
        BSet::explicit(v.to_vec()).unwrap()
    }

    #[test]
    fn primitive_reduction_cases() {
        assert_eq!(primitive_reduction(&b(&[2, 4, 6])).unwrap(), b(&[2]));
        assert_eq!(primitive_reduction(&b(&[4, 6, 9])).unwrap(), b(&[4, 6, 9]));
        assert_eq!(primitive_reduction(&b(&[6, 10, 15, 30])).unwrap(), b(&[6, 10, 15]));
    }

    #[test]
    fn primitive_reduction_preserves_multiples() {
        let orig = b(&[4, 6, 8, 12, 9, 18, 27]);
        let red = primitive_reduction(&orig).unwrap();
        for n in 1..=2000 {
            assert_eq!(orig.has_multiple(n), red.has_multiple(n));
        }
    }

    #[test]
    fn inclusion_exclusion_small() {
        assert_eq!(multiples_density_exact(&b(&[2, 3]), 25).unwrap().value, ratio(2, 3));
        assert_eq!(multiples_density_exact(&b(&[2]), 25).unwrap().value, ratio(1, 2));
        let d = multiples_density_exact(&b(&[4, 9, 25, 49, 121, 169]), 25).unwrap();
        assert_eq!(d.term_count, 63);
        // pairwise coprime: 1 - Π(1 - 1/b)
        let expected = [4u64, 9, 25, 49, 121, 169]
            .iter()
            .fold(BigRational::one(), |acc, &x| acc * (BigRational::one() - ratio(1, x)));
        assert_eq!(d.value, BigRational::one() - expected);
    }

    #[test]
    fn inclusion_exclusion_matches_period_sieve() {
        let oracle_b = [4u64, 9, 25, 49, 121];
        let d = multiples_density_exact(&b(&oracle_b), 25).unwrap();
        assert_eq!(Some(d.value), sieve_density_over_period(&oracle_b));
    }

    #[test]
    fn cap_is_enforced() {
        let big: Vec<u64> = (2..40).collect();
        assert!(matches!(
            multiples_density_exact(&b(&big), 25),
            Err(Error::CapExceeded { size: 38, cap: 25 })
        ));
        assert!(multiples_density_exact(&BSet::prime_squares(), 25).is_err());
    }

    #[test]
    fn truncation_curves() {
        let single = truncation_density_curve(&b(&[2]), 1).unwrap();
        assert_eq!(single, vec![ratio(1, 2)]);
        let primes = truncation_density_curve(&BSet::rule(BRule::Primes), 10).unwrap();
        assert!(primes.windows(2).all(|w| w[0] <= w[1]));
        // b_10 = 29; oracle: 1 - Π_{p<=29} (1 - 1/p)
        let oracle = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29]
            .iter()
            .fold(BigRational::one(), |acc, &p| acc * ratio(p - 1, p));
        assert_eq!(primes[9], BigRational::one() - oracle);
        assert!(to_f64(&primes[9]) > 0.8);
        // exceeds 0.9 once the primes reach past 300
        let long = truncation_density_curve(&BSet::rule(BRule::Primes), 70).unwrap();
        assert!(to_f64(&long[69]) > 0.9);
    }

    #[test]
    fn recursive_free_density_matches_inclusion_exclusion() {
        let sets: [&[u64]; 5] = [&[6, 10, 15], &[4, 6, 9], &[2, 4, 6], &[12, 18, 20, 45], &[8, 12, 14, 21, 35]];
        let mut fd = FreeDensity::new();
        for s in sets {
            let ie = multiples_density_exact(&b(s), 25).unwrap().value;
            assert_eq!(BigRational::one() - fd.free_density(s).unwrap(), ie, "{s:?}");
        }
    }

    #[test]
    fn log_density_cases() {
        let ones = Sequence::constant_binary(true);
        let n = 1_000_000u64;
        let v = log_density_estimate(&ones, n).unwrap();
        let harmonic: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
        assert!((v - harmonic / (n as f64).ln()).abs() < 1e-12);
        assert!((v - 1.0).abs() < 0.05);
        let zeros = Sequence::constant_binary(false);
        assert_eq!(log_density_estimate(&zeros, n).unwrap(), 0.0);
        let m23 = Sequence::binary_fn("M{2,3}", Some(6), |k| k % 2 == 0 || k % 3 == 0);
        let v = log_density_estimate(&m23, n).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 0.01, "{v}");
        assert!(log_density_estimate(&ones, 1).is_err());
    }

    #[test]
    fn tautness_cases() {
        assert_eq!(is_taut_finite(&b(&[2, 3]), 25).unwrap(), TautVerdict { taut: true, witness: None });
        assert_eq!(
            is_taut_finite(&b(&[2, 4]), 25).unwrap(),
            TautVerdict { taut: false, witness: Some(4) }
        );
        // finite primitive sets are taut; check the exact comparisons directly
        let full = multiples_density_exact(&b(&[6, 10, 15]), 25).unwrap().value;
        for rest in [[10u64, 15], [6, 15], [6, 10]] {
            assert!(multiples_density_exact(&b(&rest), 25).unwrap().value < full);
        }
        assert!(is_taut_finite(&b(&[6, 10, 15]), 25).unwrap().taut);
        assert_eq!(taut_reduction(&b(&[2, 4, 3, 9, 12]), 25).unwrap(), b(&[2, 3]));
    }

    #[test]
    fn quotient_and_split_cases() {
        let q = coprime_quotient_set(&b(&[4, 9]), 6).unwrap();
        assert_eq!(q.elements, vec![2, 3]);
        assert!(!q.a_in_multiples);
        assert_eq!(coprime_quotient_set(&b(&[5, 7]), 2).unwrap().elements, vec![5, 7]);
        let q = coprime_quotient_set(&b(&[6]), 6).unwrap();
        assert_eq!(q.elements, vec![1]);
        assert!(q.a_in_multiples);

        assert_eq!(split_by_coprimality(&[2, 3, 5], 6), (vec![2, 3], vec![5]));
        assert_eq!(split_by_coprimality(&[2, 3, 5], 1), (vec![], vec![2, 3, 5]));
        assert_eq!(split_by_coprimality(&[4, 9, 25], 10), (vec![4, 25], vec![9]));
    }

    #[test]
    fn quotient_containments() {
        // ℱ_{C'(a)} ⊆ ℱ_C
        let c = b(&[4, 9, 10, 21]);
        for a in 1..=40u64 {
            let q = coprime_quotient_set(&c, a).unwrap();
            if q.a_in_multiples {
                continue;
            }
            let cq = b(&q.elements);
            for n in 1..=100_000u64 {
                if !cq.has_multiple(n) {
                    assert!(!c.has_multiple(n), "a={a} n={n}");
                }
            }
        }
    }

    #[test]
    fn progression_density_cases() {
        let d = shifted_progression_density(&b(&[2, 3]), 0, 5, 100_000, 25).unwrap();
        assert_eq!(d.exact, ratio(1, 15));
        assert!((d.empirical - 1.0 / 15.0).abs() < 1e-3);
        let d = shifted_progression_density(&b(&[2]), 0, 2, 1000, 25).unwrap();
        assert!(d.exact.is_zero());
        // oracle: count over one period lcm(4, 9)·6
        let d = shifted_progression_density(&b(&[4, 9]), 1, 6, 10_000, 25).unwrap();
        let period = 36 * 6;
        let count = (1..=period as u64)
            .filter(|n| n % 6 == 1 && n % 4 != 0 && n % 9 != 0)
            .count() as u64;
        assert_eq!(d.exact, ratio(count, period));
    }

    #[test]
    fn coprime_modulus_scales_density() {
        let c = b(&[4, 9]);
        let free = BigRational::one() - multiples_density_exact(&c, 25).unwrap().value;
        for a in 0..5 {
            let d = shifted_progression_density(&c, a, 5, 1000, 25).unwrap();
            assert_eq!(d.exact, &free / BigRational::from_integer(5.into()));
        }
    }

    #[test]
    fn shift_divisibility_cases() {
        let t = shift_divisibility_table(&b(&[2, 3]), 1, 12, 25).unwrap();
        assert!(t.divisible);
        let t = shift_divisibility_table(&b(&[2, 3]), 2, 12, 25).unwrap();
        assert!(!t.divisible);
        let c = b(&[4, 9, 10]);
        let t = shift_divisibility_table(&c, 0, 1, 25).unwrap();
        let free = BigRational::one() - multiples_density_exact(&c, 25).unwrap().value;
        assert_eq!(t.rows[0].1, free);
    }

    #[test]
    fn taut_sets_shift_verdict_is_membership() {
        for els in [&[2u64, 3][..], &[4, 9], &[6, 10, 15], &[4, 6, 9], &[3, 10, 28]] {
            let set = b(els);
            assert!(is_taut_finite(&set, 25).unwrap().taut);
            for r in 0..=100u64 {
                let t = shift_divisibility_table(&set, r, 30, 25).unwrap();
                let member = r > 0 && !set.has_multiple(r);
                assert_eq!(t.divisible, member, "B={els:?} r={r}");
            }
        }
    }

    #[test]
    fn finite_sets_are_never_behrend() {
        for els in [&[2u64][..], &[2, 3, 5, 7, 11, 13], &[4, 6, 9, 10, 14, 15]] {
            assert!(multiples_density_exact(&b(els), 25).unwrap().value < BigRational::one());
        }
    }

    #[test]
    fn inner_regularity_cases() {
        let ones = Sequence::constant_binary(true);
        let r = inner_regularity_check(&ones, 7, 0.1, 70_000).unwrap();
        assert!(r.iter().all(|c| !c.flagged && (c.density - 1.0 / 7.0).abs() < 1e-4));

        let q = squarefree_seq();
        let r = inner_regularity_check(&q, 4, 0.1, 1_000_000).unwrap();
        assert!(r[0].empty);
        // each nonempty class has density (1/4)·(4/3)·(6/π²) ≈ 0.2026 < 0.225
        for c in &r[1..] {
            assert!((c.density - 0.2026).abs() < 1e-3);
            assert!(c.flagged);
        }
        let r = inner_regularity_check(&q, 4, 0.25, 1_000_000).unwrap();
        assert!(r.iter().all(|c| !c.flagged));

        let evens = Sequence::binary_fn("2N", Some(2), |n| n % 2 == 0);
        let r = inner_regularity_check(&evens, 2, 0.1, 1000).unwrap();
        assert!(r[1].empty && r[1].count == 0);
        assert_eq!(r[0].density, 0.5);
    }

    #[test]
    fn parse_list_format() {
        let set = BSet::parse_list("# prime squares\n4\n9 # three\n\n25\n").unwrap();
        assert_eq!(set, b(&[4, 9, 25]));
        assert!(BSet::parse_list("4\nx\n").is_err());
        assert!(BSet::parse_list("1\n").is_err());
    }

    #[test]
    fn rule_enumeration() {
        assert_eq!(BSet::prime_squares().first(4).unwrap(), vec![4, 9, 25, 49]);
        assert_eq!(BSet::rule(BRule::Squares).elements_upto(30), vec![4, 9, 16, 25]);
        assert_eq!(BSet::rule(BRule::Primes).first(5).unwrap(), vec![2, 3, 5, 7, 11]);
        assert_eq!(BSet::rule(BRule::Squares).primitivity(), Primitivity::No);
        assert_eq!(b(&[4, 6, 9]).primitivity(), Primitivity::Yes);
    }

    #[test]
    fn bfree_counts_use_sieve() {
        let s = bfree_seq(&b(&[4, 6]));
        assert_eq!(count_ones_range(&s, 1, 12), (1..=12).filter(|n| n % 4 != 0 && n % 6 != 0).count() as u64);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn inclusion_exclusion_equals_sieve(els in proptest::collection::vec(2u64..=16, 1..=8)) {
            let set = BSet::explicit(els.clone()).unwrap();
            let ie = multiples_density_exact(&set, 25).unwrap().value;
            let sieve = sieve_density_over_period(set.elements().unwrap()).unwrap();
            prop_assert_eq!(ie, sieve);
        }

        #[test]
        fn truncation_curve_is_monotone(els in proptest::collection::vec(2u64..=60, 1..=10)) {
            let set = BSet::explicit(els).unwrap();
            let m = set.elements().unwrap().len();
            let curve = truncation_density_curve(&set, m).unwrap();
            prop_assert!(curve.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
