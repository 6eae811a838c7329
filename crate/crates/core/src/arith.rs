//! Integer sieves shared by the generators and the Möbius module.

use std::sync::OnceLock;

/// Primes below `limit` (simple Eratosthenes).
pub fn primes_below(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n];
    let mut primes = Vec::new();
    for i in 2..n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

const SMALL_PRIME_LIMIT: u64 = 1 << 16;

/// Primes below 2^16, enough to sieve squares up to 2^32.
pub(crate) fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_below(SMALL_PRIME_LIMIT))
}

/// Primes `p` with `p*p <= bound`, extending past the cached table if needed.
pub(crate) fn primes_with_square_upto(bound: u64) -> Vec<u64> {
    let root = isqrt(bound);
    if root < SMALL_PRIME_LIMIT {
        small_primes().iter().copied().take_while(|&p| p <= root).collect()
    } else {
        primes_below(root + 1)
    }
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least common multiple, `None` on overflow.
pub fn lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

pub fn is_squarefree(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    for &p in small_primes() {
        if p * p > n {
            return true;
        }
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
    }
    // n has no prime factor below 2^16; a square factor would need n >= 2^32.
    let r = isqrt(n);
    r * r != n
}

/// Linear sieve output: Euler totient and Möbius values on `0..=n`.
pub struct LinearSieve {
    pub phi: Vec<u64>,
    pub mobius: Vec<i8>,
    pub primes: Vec<u64>,
}

pub fn linear_sieve(n: usize) -> LinearSieve {
    let mut phi = vec![0u64; n + 1];
    let mut mobius = vec![0i8; n + 1];
    let mut is_comp = vec![false; n + 1];
    let mut primes: Vec<u64> = Vec::new();
    if n >= 1 {
        phi[1] = 1;
        mobius[1] = 1;
    }
    for i in 2..=n {
        if !is_comp[i] {
            primes.push(i as u64);
            phi[i] = i as u64 - 1;
            mobius[i] = -1;
        }
        for &p in &primes {
            let p = p as usize;
            let ip = i * p;
            if ip > n {
                break;
            }
            is_comp[ip] = true;
            if i % p == 0 {
                phi[ip] = phi[i] * p as u64;
                mobius[ip] = 0;
                break;
            }
            phi[ip] = phi[i] * (p as u64 - 1);
            mobius[ip] = -mobius[i];
        }
    }
    LinearSieve { phi, mobius, primes }
}

/// Sum of divisors σ(n) for `0..=n` by a divisor sieve.
pub fn divisor_sum_sieve(n: usize) -> Vec<u64> {
    let mut sigma = vec![0u64; n + 1];
    for d in 1..=n {
        let mut m = d;
        while m <= n {
            sigma[m] += d as u64;
            m += d;
        }
    }
    sigma
}

/// Trial-division factorization into (prime, exponent) pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn divisor_sum(n: u64) -> u128 {
    factorize(n).into_iter().fold(1u128, |acc, (p, e)| {
        let p = p as u128;
        acc * (p.pow(e + 1) - 1) / (p - 1)
    })
}

pub fn mobius(n: u64) -> i8 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Neumaier-compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
