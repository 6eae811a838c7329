//! Weighted polynomial multiple recurrence averages, divisibility tables
//! and orbit averages along a weight set.

use std::collections::HashMap;

use num::{BigInt, BigRational, Zero};
use rayon::prelude::*;

use super::poly::IntPolynomial;
use super::system::{CircleSystem, RotationSystem};
use crate::arith::CompensatedSum;
use crate::error::{invalid, Result};
use crate::seqcore::{ratio, to_f64, AverageSeries, Exact, Sequence, SubseqScheme, CHUNK};

/// An intersection measure; `exact` is present when no rounding occurred.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    pub exact: Option<Exact>,
    pub value: f64,
    /// Bound on `|value - true measure|`.
    pub error: f64,
}

/// `μ(A ∩ T^{-s_1} A ∩ ... ∩ T^{-s_ℓ} A)`.
pub fn intersection_measure(sys: &RotationSystem, shifts: &[i128]) -> Measure {
    match sys {
        RotationSystem::Cyclic(c) => {
            let p = c.period() as i128;
            let reduced: Vec<u64> = shifts.iter().map(|s| s.rem_euclid(p) as u64).collect();
            let exact = ratio(c.intersection_count(&reduced), c.size());
            Measure {
                value: to_f64(&exact),
                exact: Some(exact),
                error: 0.0,
            }
        }
        RotationSystem::Circle(c) => {
            let units: Vec<u128> = shifts.iter().map(|&s| c.shift_units(s)).collect();
            let m = c.units_to_exact(c.intersection_units(&units));
            let value = to_f64(&m);
            if c.is_exact() {
                Measure {
                    exact: Some(m),
                    value,
                    error: 0.0,
                }
            } else {
                Measure {
                    exact: None,
                    value,
                    error: c.shift_error(shifts),
                }
            }
        }
    }
}

fn check_polys(polys: &[IntPolynomial], require_zero_constant: bool) -> Result<()> {
    if polys.is_empty() {
        return Err(invalid("need at least one polynomial"));
    }
    if require_zero_constant && polys.iter().any(|p| !p.vanishes_at_zero()) {
        return Err(invalid("recurrence polynomials must satisfy p(0) = 0"));
    }
    Ok(())
}

/// Sums `1_R(n) · numerator(n)` over `1..=N_j` for each cutoff, where the
/// measure of the intersection at `n` is `numerator(n) / denominator`.
fn weighted_sums(
    sys: &RotationSystem,
    polys: &[IntPolynomial],
    r: &Sequence,
    cutoffs: &[u64],
) -> Result<Vec<u128>> {
    let mut totals = Vec::with_capacity(cutoffs.len());
    let mut acc: u128 = 0;
    let mut prev = 0;
    for &n_cut in cutoffs {
        acc += segment_sum(sys, polys, r, prev + 1, n_cut)?;
        totals.push(acc);
        prev = n_cut;
    }
    Ok(totals)
}

fn segment_sum(sys: &RotationSystem, polys: &[IntPolynomial], r: &Sequence, first: u64, last: u64) -> Result<u128> {
    if last < first {
        return Ok(0);
    }
    let chunks = (last - first) / CHUNK + 1;
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let s = first + c * CHUNK;
            let len = CHUNK.min(last - s + 1);
            let weights = r.range(s, len);
            let mut cache: HashMap<Vec<u128>, u128> = HashMap::new();
            let mut sum: u128 = 0;
            for (i, &w) in weights.iter().enumerate() {
                if w != 1 {
                    continue;
                }
                let n = (s + i as u64) as i128;
                let key = match sys {
                    RotationSystem::Cyclic(cy) => polys
                        .iter()
                        .map(|p| p.eval_mod(n, cy.period()).map(u128::from))
                        .collect::<Result<Vec<_>>>()?,
                    RotationSystem::Circle(ci) => polys
                        .iter()
                        .map(|p| Ok(ci.shift_units(p.eval(n)?)))
                        .collect::<Result<Vec<_>>>()?,
                };
                let value = match sys {
                    RotationSystem::Cyclic(cy) => *cache.entry(key).or_insert_with_key(|k| {
                        let shifts: Vec<u64> = k.iter().map(|&v| v as u64).collect();
                        cy.intersection_count(&shifts) as u128
                    }),
                    RotationSystem::Circle(ci) => ci.intersection_units(&key),
                };
                sum += value;
            }
            Ok(sum)
        })
        .collect::<Result<Vec<u128>>>()?;
    Ok(parts.into_iter().sum())
}

fn denominator(sys: &RotationSystem) -> u128 {
    match sys {
        RotationSystem::Cyclic(c) => c.size() as u128,
        RotationSystem::Circle(c) => c.den(),
    }
}

fn exact_system(sys: &RotationSystem) -> bool {
    match sys {
        RotationSystem::Cyclic(_) => true,
        RotationSystem::Circle(c) => c.is_exact(),
    }
}

/// `(1/N_k) Σ_{n <= N_k} 1_R(n) μ(A ∩ T^{-p_1(n)} A ∩ ... ∩ T^{-p_ℓ(n)} A)`.
///
/// With `require_zero_constant` unset, polynomials with `p(0) != 0` are
/// accepted (convergence experiments only).
pub fn weighted_poly_multirec_average(
    sys: &RotationSystem,
    polys: &[IntPolynomial],
    r: &Sequence,
    scheme: &SubseqScheme,
    k: usize,
    require_zero_constant: bool,
) -> Result<AverageSeries> {
    check_polys(polys, require_zero_constant)?;
    r.require_binary()?;
    let cutoffs = scheme.reported(k)?;
    let sums = weighted_sums(sys, polys, r, &cutoffs)?;
    let den = denominator(sys);
    let exact: Vec<Exact> = sums
        .iter()
        .zip(&cutoffs)
        .map(|(&s, &n)| BigRational::new(BigInt::from(s), BigInt::from(den) * BigInt::from(n)))
        .collect();
    let values = exact.iter().map(to_f64).collect();
    let labels: Vec<String> = polys.iter().map(|p| p.to_string()).collect();
    Ok(AverageSeries {
        label: format!("{} [{}] along {}", sys.label(), labels.join(", "), r.kind()),
        cutoffs,
        values,
        exact: exact_system(sys).then_some(exact),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivisibilityRow {
    pub u: u64,
    pub count: u64,
    /// `|{n <= N : u | n, n ∈ R}| / N`.
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivisibilityTable {
    pub cutoff: u64,
    pub rows: Vec<DivisibilityRow>,
    pub all_positive: bool,
}

/// `u ↦ d^{(N_k)}(R ∩ uℕ)` for `u = 1..=u_max`.
pub fn divisibility_table(r: &Sequence, u_max: u64, scheme: &SubseqScheme, k: usize) -> Result<DivisibilityTable> {
    r.require_binary()?;
    if u_max == 0 {
        return Err(invalid("u_max must be >= 1"));
    }
    let n = scheme.cutoff(k)?;
    let prefix = r.prefix(n);
    let rows: Vec<DivisibilityRow> = (1..=u_max)
        .into_par_iter()
        .map(|u| {
            let count = prefix
                .iter()
                .skip(u as usize - 1)
                .step_by(u as usize)
                .filter(|&&b| b == 1)
                .count() as u64;
            DivisibilityRow {
                u,
                count,
                density: count as f64 / n as f64,
            }
        })
        .collect();
    let all_positive = rows.iter().all(|row| row.count > 0);
    Ok(DivisibilityTable {
        cutoff: n,
        rows,
        all_positive,
    })
}

#[derive(Debug, Clone)]
pub struct BatteryEntry {
    pub system: RotationSystem,
    pub polys: Vec<IntPolynomial>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryRow {
    pub label: String,
    pub tail: f64,
    pub exact_tail: Option<Exact>,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryReport {
    pub rows: Vec<BatteryRow>,
    pub divisibility: DivisibilityTable,
    pub all_positive: bool,
    /// Smallest tail average.
    pub margin: f64,
    /// Divisibility verdict agrees with the all-positive verdict.
    pub consistent: bool,
}

/// Ergodic averages over a finite battery, next to the divisibility table
/// up to the largest cyclic period in the battery.
pub fn recurrence_battery(
    r: &Sequence,
    entries: &[BatteryEntry],
    scheme: &SubseqScheme,
    k: usize,
) -> Result<BatteryReport> {
    if entries.is_empty() {
        return Err(invalid("battery is empty"));
    }
    let rows = entries
        .iter()
        .map(|e| {
            let series = weighted_poly_multirec_average(&e.system, &e.polys, r, scheme, k, true)?;
            let tail = series.tail();
            let exact_tail = series.exact.as_ref().and_then(|v| v.last().cloned());
            let positive = match &exact_tail {
                Some(x) => !x.is_zero(),
                None => tail > 0.0,
            };
            Ok(BatteryRow {
                label: series.label,
                tail,
                exact_tail,
                positive,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let u_max = entries
        .iter()
        .filter_map(|e| match &e.system {
            RotationSystem::Cyclic(c) => Some(c.period()),
            RotationSystem::Circle(_) => None,
        })
        .max()
        .unwrap_or(1);
    let divisibility = divisibility_table(r, u_max, scheme, k)?;
    let all_positive = rows.iter().all(|row| row.positive);
    let margin = rows.iter().map(|row| row.tail).fold(f64::INFINITY, f64::min);
    Ok(BatteryReport {
        consistent: divisibility.all_positive == all_positive,
        rows,
        divisibility,
        all_positive,
        margin,
    })
}

/// Cyclic systems `ℤ/m` with `A = {0}` for each `m`, sharing one polynomial list.
pub fn cyclic_battery(moduli: impl IntoIterator<Item = u64>, polys: &[IntPolynomial]) -> Result<Vec<BatteryEntry>> {
    moduli
        .into_iter()
        .map(|m| {
            Ok(BatteryEntry {
                system: RotationSystem::cyclic(m, &[0])?,
                polys: polys.to_vec(),
            })
        })
        .collect()
}

/// `f(x) = Σ c_h e(h x)` with finitely many integer frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    /// `(h, Re c_h, Im c_h)`.
    pub terms: Vec<(i64, f64, f64)>,
}

impl TrigPolynomial {
    /// `e(h x)`.
    pub fn character(h: i64) -> Self {
        TrigPolynomial {
            terms: vec![(h, 1.0, 0.0)],
        }
    }

    pub fn constant(c: f64) -> Self {
        TrigPolynomial {
            terms: vec![(0, c, 0.0)],
        }
    }

    /// `∫ f = c_0`.
    pub fn mean(&self) -> (f64, f64) {
        self.terms
            .iter()
            .filter(|t| t.0 == 0)
            .fold((0.0, 0.0), |acc, t| (acc.0 + t.1, acc.1 + t.2))
    }

    pub fn eval(&self, x: f64) -> (f64, f64) {
        self.terms.iter().fold((0.0, 0.0), |acc, &(h, re, im)| {
            let (s, c) = (std::f64::consts::TAU * (h as f64) * x).sin_cos();
            (acc.0 + re * c - im * s, acc.1 + re * s + im * c)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitAverage {
    pub cutoffs: Vec<u64>,
    /// Real and imaginary parts of `(1/N) Σ 1_R(n) f(x_0 + nα)`.
    pub values: Vec<(f64, f64)>,
    /// `d^{(N)}(R) · ∫ f` at the last cutoff.
    pub baseline: (f64, f64),
}

impl OrbitAverage {
    pub fn abs_tail(&self) -> f64 {
        let (re, im) = *self.values.last().unwrap();
        re.hypot(im)
    }

    /// `|average - baseline|` at the last cutoff.
    pub fn deviation(&self) -> f64 {
        let (re, im) = *self.values.last().unwrap();
        (re - self.baseline.0).hypot(im - self.baseline.1)
    }
}

/// Partial averages of `1_R(n) f(x_0 + nα mod 1)`.
pub fn weighted_orbit_average(
    sys: &CircleSystem,
    f: &TrigPolynomial,
    x0: f64,
    r: &Sequence,
    scheme: &SubseqScheme,
    k: usize,
) -> Result<OrbitAverage> {
    r.require_binary()?;
    let cutoffs = scheme.reported(k)?;
    let x0_units = ((x0.rem_euclid(1.0)) * sys.den() as f64) as u128 % sys.den();
    let last = *cutoffs.last().unwrap();
    let chunks = (last - 1) / CHUNK + 1;
    // per-chunk partial sums, reduced in chunk order
    let parts: Vec<(f64, f64, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let s = 1 + c * CHUNK;
            let len = CHUNK.min(last - s + 1);
            let w = r.range(s, len);
            let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
            let mut ones = 0;
            for (i, &b) in w.iter().enumerate() {
                if b == 1 {
                    let (a, bb) = f.eval(sys.orbit_point(x0_units, s + i as u64));
                    re.add(a);
                    im.add(bb);
                    ones += 1;
                }
            }
            (re.value(), im.value(), ones)
        })
        .collect();
    let mut values = Vec::with_capacity(cutoffs.len());
    let mut ones_total = 0;
    for &n in &cutoffs {
        // re-sum the chunks covering [1, n], splitting the boundary chunk
        let full = n / CHUNK;
        let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
        let mut ones = 0;
        for part in parts.iter().take(full as usize) {
            re.add(part.0);
            im.add(part.1);
            ones += part.2;
        }
        let rem_start = full * CHUNK + 1;
        if rem_start <= n {
            let w = r.range(rem_start, n - rem_start + 1);
            for (i, &b) in w.iter().enumerate() {
                if b == 1 {
                    let (a, bb) = f.eval(sys.orbit_point(x0_units, rem_start + i as u64));
                    re.add(a);
                    im.add(bb);
                    ones += 1;
                }
            }
        }
        values.push((re.value() / n as f64, im.value() / n as f64));
        ones_total = ones;
    }
    let density = ones_total as f64 / last as f64;
    let (m_re, m_im) = f.mean();
    Ok(OrbitAverage {
        cutoffs,
        values,
        baseline: (density * m_re, density * m_im),
    })
}

/// Shift values `p_i(n)` for a fixed `n`.
fn shifts_at(polys: &[IntPolynomial], n: i128) -> Result<Vec<i128>> {
    polys.iter().map(|p| p.eval(n)).collect()
}

/// `|{1 <= a <= N : a ∈ E, a + p_i(n) ∈ E for all i}| / N`; points below 1
/// are outside `E`.
pub fn combinatorial_intersection_density(e: &Sequence, polys: &[IntPolynomial], n: i128, big_n: u64) -> Result<f64> {
    e.require_binary()?;
    if big_n == 0 {
        return Err(invalid("N must be >= 1"));
    }
    let shifts = shifts_at(polys, n)?;
    let bits = intersection_bits(e, &shifts, big_n, false)?;
    Ok(bits.iter().map(|w| w.count_ones() as u64).sum::<u64>() as f64 / big_n as f64)
}

/// Bitset over `a = 1..=N` of `{a ∈ E : a + s_i ∈ E for all i}`; with
/// `clip`, `E` is replaced by `E ∩ [1, N]`.
fn intersection_bits(e: &Sequence, shifts: &[i128], big_n: u64, clip: bool) -> Result<Vec<u64>> {
    let max_shift = shifts.iter().copied().max().unwrap_or(0).max(0);
    let hi = (big_n as i128 + max_shift) as u64;
    if hi > 1 << 34 {
        return Err(invalid("shifts reach beyond the materialization budget"));
    }
    let prefix = e.prefix(hi);
    let top = if clip { big_n as i128 } else { hi as i128 };
    let member = |m: i128| m >= 1 && m <= top && prefix[(m - 1) as usize] == 1;
    let mut bits = vec![0u64; big_n.div_ceil(64) as usize];
    for a in 1..=big_n {
        let ai = a as i128;
        if member(ai) && shifts.iter().all(|&s| member(ai + s)) {
            let idx = (a - 1) as usize;
            bits[idx / 64] |= 1 << (idx % 64);
        }
    }
    Ok(bits)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectivityWitness {
    pub set: Vec<u64>,
    /// `|{a <= N : a ∈ E ∩ ⋂_{n ∈ F} ⋂_i (E - p_i(n))}|`.
    pub count: u64,
}

/// Lexicographically first `F ⊆ R ∩ [1, bound]`, `|F| = f_size`, such that
/// `E_N ∩ ⋂_{n ∈ F} ⋂_i (E_N - p_i(n))` is nonempty, `E_N = E ∩ [1, N]`.
pub fn finite_intersectivity_search(
    e: &Sequence,
    polys: &[IntPolynomial],
    r: &Sequence,
    f_size: usize,
    bound: u64,
    big_n: u64,
) -> Result<Option<IntersectivityWitness>> {
    e.require_binary()?;
    r.require_binary()?;
    if f_size == 0 || f_size > 4 {
        return Err(invalid("F size must be in 1..=4"));
    }
    let candidates: Vec<u64> = (1..=bound).filter(|&n| r.at(n) == 1).collect();
    let sets: Vec<Vec<u64>> = candidates
        .par_iter()
        .map(|&n| intersection_bits(e, &shifts_at(polys, n as i128)?, big_n, true))
        .collect::<Result<_>>()?;
    let mut idx: Vec<usize> = (0..f_size).collect();
    if candidates.len() < f_size {
        return Ok(None);
    }
    loop {
        let count: u64 = (0..sets[0].len())
            .map(|w| idx.iter().fold(u64::MAX, |acc, &i| acc & sets[i][w]).count_ones() as u64)
            .sum();
        if count > 0 {
            return Ok(Some(IntersectivityWitness {
                set: idx.iter().map(|&i| candidates[i]).collect(),
                count,
            }));
        }
        // next combination in lexicographic order
        let mut pos = f_size;
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            if idx[pos] < candidates.len() - f_size + pos {
                break;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..f_size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformScan {
    /// `(s, tail average, exact tail)`.
    pub rows: Vec<(u64, f64, Option<Exact>)>,
    pub min: f64,
}

/// Averages along `p_i(s n)` for `s = 1..=s_max`, with `R = ℕ`.
pub fn uniform_recurrence_scan(
    sys: &RotationSystem,
    polys: &[IntPolynomial],
    s_max: u64,
    scheme: &SubseqScheme,
    k: usize,
) -> Result<UniformScan> {
    check_polys(polys, true)?;
    if s_max == 0 {
        return Err(invalid("s_max must be >= 1"));
    }
    let everything = Sequence::constant_binary(true);
    let rows = (1..=s_max)
        .map(|s| {
            let scaled = polys
                .iter()
                .map(|p| p.precompose_scale(s as i64))
                .collect::<Result<Vec<_>>>()?;
            let series = weighted_poly_multirec_average(sys, &scaled, &everything, scheme, k, true)?;
            Ok((s, series.tail(), series.exact.and_then(|v| v.last().cloned())))
        })
        .collect::<Result<Vec<_>>>()?;
    let min = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(UniformScan { rows, min })
}
