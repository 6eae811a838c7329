//! Rotations on finite cyclic groups, their products, and the circle.

use num::{BigInt, BigRational};

use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::seqcore::{ratio, Exact};

/// Largest `|X|` for cyclic and product systems.
pub const MAX_POINTS: u64 = 1 << 24;

/// `x ↦ x + (1, ..., 1)` on `ℤ/m_1 × ... × ℤ/m_r`, with a subset `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicSystem {
    moduli: Vec<u64>,
    /// `A` as a membership table in mixed radix (first coordinate slowest).
    set: Vec<bool>,
    /// `lcm(m_i)`: `T^n` depends only on `n mod period`.
    period: u64,
}

impl CyclicSystem {
    pub fn cyclic(m: u64, residues: &[u64]) -> Result<Self> {
        let points: Vec<Vec<u64>> = residues.iter().map(|&r| vec![r]).collect();
        Self::product(vec![m], &points)
    }

    pub fn product(moduli: Vec<u64>, points: &[Vec<u64>]) -> Result<Self> {
        if moduli.is_empty() || moduli.contains(&0) {
            return Err(invalid("moduli must be positive"));
        }
        let size = moduli
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m))
            .filter(|&s| s <= MAX_POINTS)
            .ok_or(Error::CapExceeded {
                size: usize::MAX,
                cap: MAX_POINTS as usize,
            })?;
        let period = moduli
            .iter()
            .try_fold(1u64, |acc, &m| arith::lcm(acc, m))
            .ok_or_else(|| Error::Overflow("lcm of moduli".into()))?;
        let mut set = vec![false; size as usize];
        for p in points {
            if p.len() != moduli.len() || p.iter().zip(&moduli).any(|(&x, &m)| x >= m) {
                return Err(invalid(format!("point {p:?} is not in the group")));
            }
            set[index(&moduli, p)] = true;
        }
        Ok(CyclicSystem { moduli, set, period })
    }

    /// The whole space as `A`.
    pub fn full(moduli: Vec<u64>) -> Result<Self> {
        let mut sys = Self::product(moduli, &[])?;
        sys.set.iter_mut().for_each(|b| *b = true);
        Ok(sys)
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn size(&self) -> u64 {
        self.set.len() as u64
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn set_size(&self) -> u64 {
        self.set.iter().filter(|&&b| b).count() as u64
    }

    /// `μ(A)`.
    pub fn measure(&self) -> Exact {
        ratio(self.set_size(), self.size())
    }

    fn shifted_index(&self, coords: &[u64], shift: u64) -> usize {
        let mut idx = 0u64;
        for (&c, &m) in coords.iter().zip(&self.moduli) {
            idx = idx * m + (c + shift % m) % m;
        }
        idx as usize
    }

    /// `|{x ∈ A : x + s_i ∈ A for all i}|`, shifts already reduced mod the period.
    pub fn intersection_count(&self, shifts: &[u64]) -> u64 {
        let mut coords = vec![0u64; self.moduli.len()];
        let mut count = 0;
        for (i, &inside) in self.set.iter().enumerate() {
            if inside {
                decode(&self.moduli, i as u64, &mut coords);
                if shifts.iter().all(|&s| self.set[self.shifted_index(&coords, s)]) {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z/{m}")).collect();
        format!("{} |A|={}", parts.join("x"), self.set_size())
    }
}

fn index(moduli: &[u64], p: &[u64]) -> usize {
    p.iter().zip(moduli).fold(0u64, |acc, (&x, &m)| acc * m + x) as usize
}

fn decode(moduli: &[u64], mut idx: u64, out: &mut [u64]) {
    for (slot, &m) in out.iter_mut().zip(moduli).rev() {
        *slot = idx % m;
        idx /= m;
    }
}

/// `x ↦ x + α mod 1`. Points are multiples of `1/den`; `A` is a finite
/// union of half-open arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSystem {
    den: u128,
    alpha: u128,
    /// Sorted disjoint arcs `[a, b)` with `0 <= a < b <= den`.
    arcs: Vec<(u128, u128)>,
    /// Bound on `|α - alpha/den|`; zero when α is represented exactly.
    alpha_error: f64,
}

/// Resolution used for irrational rotation numbers.
pub const CIRCLE_BITS: u32 = 64;

impl CircleSystem {
    /// Exact rational rotation `α = num/den`, arcs with endpoints `k/den`.
    pub fn rational(num: u64, den: u64, arcs: &[(u64, u64)]) -> Result<Self> {
        if den == 0 {
            return Err(invalid("denominator must be positive"));
        }
        let arcs = arcs.iter().map(|&(a, b)| (a as u128, b as u128)).collect();
        Self::build(den as u128, num as u128 % den as u128, arcs, 0.0)
    }

    /// Rational rotation with arcs given as fractions; uses the common
    /// denominator of all inputs.
    pub fn rational_fractions(alpha: (u64, u64), arcs: &[((u64, u64), (u64, u64))]) -> Result<Self> {
        let mut den = alpha.1;
        for &((_, d1), (_, d2)) in arcs {
            den = arith::lcm(den, d1)
                .and_then(|v| arith::lcm(v, d2))
                .filter(|&d| d <= 1 << 62)
                .ok_or_else(|| Error::Overflow("common denominator".into()))?;
        }
        if den == 0 {
            return Err(invalid("denominator must be positive"));
        }
        let scale = |(n, d): (u64, u64)| n as u128 * (den / d) as u128;
        let converted: Vec<(u128, u128)> = arcs.iter().map(|&(a, b)| (scale(a), scale(b))).collect();
        Self::build(den as u128, scale(alpha) % den as u128, converted, 0.0)
    }

    /// Fixed-point rotation with resolution `2^-64`; arcs given in `[0, 1]`.
    pub fn fixed_point(alpha_turns: u64, arcs: &[(f64, f64)], alpha_error: f64) -> Result<Self> {
        let den = 1u128 << CIRCLE_BITS;
        let conv = |x: f64| -> Result<u128> {
            if !(0.0..=1.0).contains(&x) {
                return Err(invalid("arc endpoints must lie in [0, 1]"));
            }
            Ok(((x * den as f64).round() as u128).min(den))
        };
        let arcs = arcs
            .iter()
            .map(|&(a, b)| Ok((conv(a)?, conv(b)?)))
            .collect::<Result<Vec<_>>>()?;
        let err = alpha_error + 0.5 / den as f64;
        Self::build(den, alpha_turns as u128, arcs, err)
    }

    /// `α = √2 - 1` at `2^-64` resolution.
    pub fn sqrt2_minus_one(arcs: &[(f64, f64)]) -> Result<Self> {
        // floor(√2 · 2^64) via integer square root of 2^129
        let root = isqrt_u128(1u128 << 127) << 1;
        let frac = (root - (1u128 << 64)) as u64;
        Self::fixed_point(frac, arcs, 2.0_f64.powi(-63))
    }

    /// Rotation by a real `α` (rounded to `2^-64`).
    pub fn real(alpha: f64, arcs: &[(f64, f64)]) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(invalid("rotation number must be finite"));
        }
        let frac = alpha.rem_euclid(1.0);
        let turns = (frac * 2f64.powi(64)) as u64;
        Self::fixed_point(turns, arcs, f64::EPSILON * alpha.abs().max(1.0))
    }

    fn build(den: u128, alpha: u128, arcs: Vec<(u128, u128)>, alpha_error: f64) -> Result<Self> {
        for &(a, b) in &arcs {
            if a > b || b > den {
                return Err(invalid("arcs must satisfy 0 <= a <= b <= 1"));
            }
        }
        Ok(CircleSystem {
            den,
            alpha,
            arcs: normalize(arcs),
            alpha_error,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha as f64 / self.den as f64
    }

    pub fn alpha_error(&self) -> f64 {
        self.alpha_error
    }

    pub fn is_exact(&self) -> bool {
        self.alpha_error == 0.0
    }

    pub(crate) fn den(&self) -> u128 {
        self.den
    }

    /// `μ(A)`.
    pub fn measure(&self) -> Exact {
        self.units_to_exact(self.arcs.iter().map(|(a, b)| b - a).sum())
    }

    pub(crate) fn units_to_exact(&self, units: u128) -> Exact {
        BigRational::new(BigInt::from(units), BigInt::from(self.den))
    }

    /// `s α mod 1` in units.
    pub(crate) fn shift_units(&self, s: i128) -> u128 {
        let s = s.rem_euclid(self.den as i128) as u128;
        // s < den and alpha < den; den <= 2^64 keeps the product in range
        (s * self.alpha) % self.den
    }

    /// `A - t` as sorted disjoint arcs.
    fn translated(&self, t: u128) -> Vec<(u128, u128)> {
        let t = (self.den - t % self.den) % self.den;
        let mut out = Vec::with_capacity(self.arcs.len() + 1);
        for &(a, b) in &self.arcs {
            let (a, b) = (a + t, b + t);
            if b <= self.den {
                out.push((a, b));
            } else if a >= self.den {
                out.push((a - self.den, b - self.den));
            } else {
                out.push((a, self.den));
                out.push((0, b - self.den));
            }
        }
        normalize(out)
    }

    /// Length in units of `A ∩ (A - t_1) ∩ ...`.
    pub(crate) fn intersection_units(&self, shifts: &[u128]) -> u128 {
        let mut cur = self.arcs.clone();
        for &t in shifts {
            cur = intersect(&cur, &self.translated(t));
            if cur.is_empty() {
                return 0;
            }
        }
        cur.iter().map(|(a, b)| b - a).sum()
    }

    /// Error bound on an intersection measure with shift multipliers `s_i`.
    pub(crate) fn shift_error(&self, multipliers: &[i128]) -> f64 {
        let arcs = self.arcs.len() as f64;
        multipliers
            .iter()
            .map(|&s| 2.0 * arcs * (s.unsigned_abs() as f64) * self.alpha_error)
            .sum()
    }

    /// `x_0 + n α mod 1` as a float in `[0, 1)`.
    pub(crate) fn orbit_point(&self, x0_units: u128, n: u64) -> f64 {
        let p = (x0_units + self.shift_units(n as i128)) % self.den;
        p as f64 / self.den as f64
    }

    pub fn label(&self) -> String {
        format!("circle(alpha={:.12})", self.alpha())
    }
}

fn isqrt_u128(n: u128) -> u128 {
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn normalize(mut arcs: Vec<(u128, u128)>) -> Vec<(u128, u128)> {
    arcs.retain(|(a, b)| a < b);
    arcs.sort_unstable();
    let mut out: Vec<(u128, u128)> = Vec::with_capacity(arcs.len());
    for (a, b) in arcs {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn intersect(x: &[(u128, u128)], y: &[(u128, u128)]) -> Vec<(u128, u128)> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < x.len() && j < y.len() {
        let lo = x[i].0.max(y[j].0);
        let hi = x[i].1.min(y[j].1);
        if lo < hi {
            out.push((lo, hi));
        }
        if x[i].1 < y[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum RotationSystem {
    Cyclic(CyclicSystem),
    Circle(CircleSystem),
}

impl RotationSystem {
    pub fn cyclic(m: u64, residues: &[u64]) -> Result<Self> {
        Ok(RotationSystem::Cyclic(CyclicSystem::cyclic(m, residues)?))
    }

    pub fn measure(&self) -> Exact {
        match self {
            RotationSystem::Cyclic(c) => c.measure(),
            RotationSystem::Circle(c) => c.measure(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            RotationSystem::Cyclic(c) => c.label(),
            RotationSystem::Circle(c) => c.label(),
        }
    }
}

impl From<CyclicSystem> for RotationSystem {
    fn from(c: CyclicSystem) -> Self {
        RotationSystem::Cyclic(c)
    }
}

impl From<CircleSystem> for RotationSystem {
    fn from(c: CircleSystem) -> Self {
        RotationSystem::Circle(c)
    }
}
