//! Integer-valued polynomials in the binomial basis `p(t) = Σ c_j C(t, j)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    /// Binomial-basis coefficients, no trailing zeros.
    coeffs: Vec<i64>,
}

fn overflow() -> Error {
    Error::Overflow("polynomial arithmetic".into())
}

/// `C(n, j)` for any integer `n`.
fn binom(n: i128, j: usize) -> Result<i128> {
    let mut acc: i128 = 1;
    for i in 0..j as i128 {
        // acc = C(n, i) here; C(n, i+1) = C(n, i) (n - i) / (i + 1), exact
        acc = acc.checked_mul(n - i).ok_or_else(overflow)? / (i + 1);
    }
    Ok(acc)
}

/// Stirling numbers of the second kind `S(i, j)` for `i, j <= d`.
fn stirling2(d: usize) -> Vec<Vec<i128>> {
    let mut s = vec![vec![0i128; d + 1]; d + 1];
    s[0][0] = 1;
    for i in 1..=d {
        for j in 1..=i {
            s[i][j] = j as i128 * s[i - 1][j] + s[i - 1][j - 1];
        }
    }
    s
}

impl IntPolynomial {
    pub fn from_binomial(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    /// From integer power-basis coefficients `a_0 + a_1 t + ...`, using
    /// `t^i = Σ_j j! S(i, j) C(t, j)`.
    pub fn from_power(power: &[i64]) -> Result<Self> {
        let d = power.len().saturating_sub(1);
        let s = stirling2(d);
        let mut out = vec![0i128; power.len()];
        let mut fact: i128 = 1;
        for j in 0..power.len() {
            if j > 0 {
                fact = fact.checked_mul(j as i128).ok_or_else(overflow)?;
            }
            for (i, &a) in power.iter().enumerate().skip(j) {
                let term = (a as i128)
                    .checked_mul(s[i][j])
                    .and_then(|v| v.checked_mul(fact))
                    .ok_or_else(overflow)?;
                out[j] = out[j].checked_add(term).ok_or_else(overflow)?;
            }
        }
        let coeffs = out
            .into_iter()
            .map(|c| i64::try_from(c).map_err(|_| overflow()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_binomial(coeffs))
    }

    /// Newton interpolation from `p(0), ..., p(d)`.
    pub fn from_values(values: &[i128]) -> Result<Self> {
        let mut diff = values.to_vec();
        let mut coeffs = Vec::with_capacity(values.len());
        for _ in 0..values.len() {
            coeffs.push(i64::try_from(diff[0]).map_err(|_| overflow())?);
            diff = diff
                .windows(2)
                .map(|w| w[1].checked_sub(w[0]).ok_or_else(overflow))
                .collect::<Result<Vec<_>>>()?;
        }
        Ok(Self::from_binomial(coeffs))
    }

    /// `t ↦ t`.
    pub fn identity() -> Self {
        Self::from_binomial(vec![0, 1])
    }

    /// `t ↦ t^d`.
    pub fn monomial(d: usize) -> Self {
        let mut power = vec![0; d + 1];
        power[d] = 1;
        Self::from_power(&power).expect("small monomial")
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `p(0) = 0`.
    pub fn vanishes_at_zero(&self) -> bool {
        self.coeffs.first().is_none_or(|&c| c == 0)
    }

    pub fn eval(&self, n: i128) -> Result<i128> {
        let mut acc: i128 = 0;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let term = (c as i128).checked_mul(binom(n, j)?).ok_or_else(overflow)?;
                acc = acc.checked_add(term).ok_or_else(overflow)?;
            }
        }
        Ok(acc)
    }

    /// `p(n) mod m`, in `[0, m)`.
    pub fn eval_mod(&self, n: i128, m: u64) -> Result<u64> {
        Ok(self.eval(n)?.rem_euclid(m as i128) as u64)
    }

    /// `t ↦ p(s t)`, computed exactly from `p(0), p(s), ..., p(d s)`.
    pub fn precompose_scale(&self, s: i64) -> Result<Self> {
        let d = self.coeffs.len();
        let values = (0..d as i128)
            .map(|j| self.eval(j.checked_mul(s as i128).ok_or_else(overflow)?))
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(&values)
    }

    /// Power-basis coefficients as reduced fractions `(num, den)`.
    pub fn power_coefficients(&self) -> Vec<(i128, i128)> {
        use num::integer::Integer;
        let d = self.coeffs.len();
        // C(t, j) = t (t-1) ... (t-j+1) / j!
        let mut num = vec![0i128; d];
        let mut den: i128 = 1;
        for j in 1..d {
            den *= j as i128;
        }
        let mut falling = vec![1i128];
        let mut fact: i128 = 1;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                let mut next = vec![0i128; falling.len() + 1];
                for (i, &f) in falling.iter().enumerate() {
                    next[i + 1] += f;
                    next[i] -= f * (j as i128 - 1);
                }
                falling = next;
                fact *= j as i128;
            }
            for (i, &f) in falling.iter().enumerate() {
                num[i] += c as i128 * f * (den / fact);
            }
        }
        num.into_iter()
            .map(|n| {
                let g = n.gcd(&den).max(1);
                (n / g, den / g)
            })
            .collect()
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .power_coefficients()
            .into_iter()
            .enumerate()
            .rev()
            .filter(|(_, (n, _))| *n != 0)
            .map(|(i, (n, d))| {
                let coef = if d == 1 { n.to_string() } else { format!("{n}/{d}") };
                match (i, coef.as_str()) {
                    (0, _) => coef,
                    (_, "1") => mono(i),
                    (_, "-1") => format!("-{}", mono(i)),
                    _ => format!("{coef}*{}", mono(i)),
                }
            })
            .collect();
        if terms.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", terms.join(" + ").replace("+ -", "- "))
    }
}

fn mono(i: usize) -> String {
    if i == 1 {
        "n".into()
    } else {
        format!("n^{i}")
    }
}

/// Parses integer-coefficient expressions such as `n`, `2n`, `n^2+n`, `3*n^2 - 1`.
impl FromStr for IntPolynomial {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let src: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if src.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut power: Vec<i64> = Vec::new();
        let mut rest = src.as_str();
        let bad = || Error::Parse(format!("cannot parse polynomial {text:?}"));
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'+' => (1i64, &rest[1..]),
                b'-' => (-1, &rest[1..]),
                _ if rest.len() == src.len() => (1, rest),
                _ => return Err(bad()),
            };
            let end = body[1.min(body.len())..]
                .find(['+', '-'])
                .map_or(body.len(), |i| i + 1);
            let term = &body[..end];
            if term.is_empty() || term.starts_with(['+', '-']) {
                return Err(bad());
            }
            rest = &body[end..];
            let (coef, exp) = match term.find(['n', 't', 'x']) {
                None => (term.parse::<i64>().map_err(|_| bad())?, 0usize),
                Some(pos) => {
                    let c = term[..pos].trim_end_matches('*');
                    let c = if c.is_empty() { 1 } else { c.parse::<i64>().map_err(|_| bad())? };
                    let tail = &term[pos + 1..];
                    let e = if tail.is_empty() {
                        1
                    } else {
                        tail.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
                    };
                    (c, e)
                }
            };
            if exp > 20 {
                return Err(invalid("polynomial degree above 20"));
            }
            if power.len() <= exp {
                power.resize(exp + 1, 0);
            }
            power[exp] = power[exp]
                .checked_add(sign * coef)
                .ok_or_else(overflow)?;
        }
        Self::from_power(&power)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PolyRepr {
    Text(String),
    Binomial { binomial: Vec<i64> },
    Power { power: Vec<i64> },
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr::Binomial {
            binomial: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match PolyRepr::deserialize(d)? {
            PolyRepr::Text(t) => t.parse().map_err(D::Error::custom),
            PolyRepr::Binomial { binomial } => Ok(Self::from_binomial(binomial)),
            PolyRepr::Power { power } => Self::from_power(&power).map_err(D::Error::custom),
        }
    }
}
