//! Sequences over finite alphabets, words, cylinder sets, cutoff schemes and
//! the basic frequency estimators built on top of them.
//!
//! Sequences are 1-indexed: `seq.at(1)` is the first symbol. Symbols are
//! stored as indices into the sequence's [`Alphabet`].

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, ToPrimitive};
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

/// Index of a symbol inside an [`Alphabet`].
pub type Symbol = u8;

/// Exact rational values.
pub type Exact = BigRational;

pub(crate) fn ratio(num: u64, den: u64) -> Exact {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn to_f64(x: &Exact) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Periods above this are treated as non-periodic for exact statistics.
pub const EXACT_PERIOD_CAP: u64 = 1 << 26;

/// Block length used when estimators split `[1, N]` across workers. Fixed so
/// that floating reductions do not depend on the worker count.
pub const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(invalid("alphabet must contain at least one symbol"));
        }
        if symbols.len() > Symbol::MAX as usize + 1 {
            return Err(invalid("alphabet too large"));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(invalid(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// The alphabet `{0, 1}`.
    pub fn binary() -> Self {
        Alphabet {
            symbols: vec!["0".into(), "1".into()],
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, token: &str) -> Option<Symbol> {
        self.symbols
            .iter()
            .position(|s| s == token)
            .map(|i| i as Symbol)
    }

    pub fn token(&self, s: Symbol) -> &str {
        &self.symbols[s as usize]
    }

    pub fn is_binary(&self) -> bool {
        self.symbols.len() == 2 && self.symbols[0] == "0" && self.symbols[1] == "1"
    }

    /// Parses a string of single-character tokens into symbols.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Symbol>> {
        let mut out = Vec::with_capacity(text.len());
        for c in text.chars() {
            let mut buf = [0u8; 4];
            let tok = c.encode_utf8(&mut buf);
            out.push(
                self.index_of(tok)
                    .ok_or_else(|| invalid(format!("symbol {tok:?} not in alphabet")))?,
            );
        }
        Ok(out)
    }

    pub fn render(&self, symbols: &[Symbol]) -> String {
        let single = self.symbols.iter().all(|s| s.chars().count() == 1);
        let parts: Vec<&str> = symbols.iter().map(|&s| self.token(s)).collect();
        if single {
            parts.concat()
        } else {
            parts.join(",")
        }
    }
}

/// Anything that can produce the symbols of a one-sided sequence.
pub trait SymbolSource: Send + Sync + fmt::Debug {
    fn alphabet(&self) -> &Alphabet;

    /// Symbol at position `n >= 1`.
    fn at(&self, n: u64) -> Symbol;

    /// Writes `at(start), at(start + 1), ...` into `out`.
    fn fill(&self, start: u64, out: &mut [Symbol]) {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.at(start + i as u64);
        }
    }

    /// A period `q` with `at(n + q) == at(n)` for all `n >= 1`, when known.
    fn period(&self) -> Option<u64> {
        None
    }

    fn kind(&self) -> String;
}

/// A cheaply clonable handle to a [`SymbolSource`].
#[derive(Clone)]
pub struct Sequence {
    inner: Arc<dyn SymbolSource>,
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence({})", self.inner.kind())
    }
}

impl Sequence {
    pub fn new(source: impl SymbolSource + 'static) -> Self {
        Sequence {
            inner: Arc::new(source),
        }
    }

    /// Binary sequence given by a predicate on `n`.
    pub fn binary_fn<F>(kind: impl Into<String>, period: Option<u64>, f: F) -> Self
    where
        F: Fn(u64) -> bool + Send + Sync + 'static,
    {
        Sequence::new(FnSource {
            alphabet: Alphabet::binary(),
            kind: kind.into(),
            period,
            f: Box::new(move |n| f(n) as Symbol),
        })
    }

    /// Sequence given by an arbitrary symbol function.
    pub fn from_fn<F>(alphabet: Alphabet, kind: impl Into<String>, period: Option<u64>, f: F) -> Self
    where
        F: Fn(u64) -> Symbol + Send + Sync + 'static,
    {
        Sequence::new(FnSource {
            alphabet,
            kind: kind.into(),
            period,
            f: Box::new(f),
        })
    }

    /// Constant binary sequence.
    pub fn constant_binary(bit: bool) -> Self {
        Sequence::binary_fn(if bit { "ones" } else { "zeros" }, Some(1), move |_| bit)
    }

    /// Seeded fair coin flips; reproducible per position.
    pub fn coin_flips(seed: u64) -> Self {
        Sequence::new(CoinFlips { seed })
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.inner.alphabet()
    }

    pub fn at(&self, n: u64) -> Symbol {
        debug_assert!(n >= 1, "sequences are 1-indexed");
        self.inner.at(n)
    }

    pub fn token(&self, n: u64) -> &str {
        self.alphabet().token(self.at(n))
    }

    pub fn fill(&self, start: u64, out: &mut [Symbol]) {
        self.inner.fill(start, out)
    }

    pub fn period(&self) -> Option<u64> {
        self.inner.period()
    }

    pub fn kind(&self) -> String {
        self.inner.kind()
    }

    pub fn is_binary(&self) -> bool {
        self.alphabet().is_binary()
    }

    pub(crate) fn require_binary(&self) -> Result<()> {
        if self.is_binary() {
            Ok(())
        } else {
            Err(Error::NotBinary(self.alphabet().symbols().to_vec()))
        }
    }

    /// Symbols at positions `start..start + len`, materialized in parallel.
    pub fn range(&self, start: u64, len: u64) -> Vec<Symbol> {
        let mut out = vec![0 as Symbol; len as usize];
        out.par_chunks_mut(CHUNK as usize)
            .enumerate()
            .for_each(|(c, buf)| self.fill(start + c as u64 * CHUNK, buf));
        out
    }

    /// Symbols at positions `1..=n`.
    pub fn prefix(&self, n: u64) -> Vec<Symbol> {
        self.range(1, n)
    }

    /// The sequence `n ↦ self(n + by)`. Positions that fall below 1 read as
    /// symbol index 0 (zero padding of the two-sided extension).
    pub fn shifted(&self, by: i64) -> Sequence {
        Sequence::new(Shifted {
            base: self.clone(),
            by,
        })
    }
}

struct FnSource {
    alphabet: Alphabet,
    kind: String,
    period: Option<u64>,
    f: Box<dyn Fn(u64) -> Symbol + Send + Sync>,
}

impl fmt::Debug for FnSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnSource").field("kind", &self.kind).finish()
    }
}

impl SymbolSource for FnSource {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn at(&self, n: u64) -> Symbol {
        (self.f)(n)
    }
    fn period(&self) -> Option<u64> {
        self.period
    }
    fn kind(&self) -> String {
        self.kind.clone()
    }
}

#[derive(Debug)]
struct Shifted {
    base: Sequence,
    by: i64,
}

impl SymbolSource for Shifted {
    fn alphabet(&self) -> &Alphabet {
        self.base.alphabet()
    }
    fn at(&self, n: u64) -> Symbol {
        let m = n as i64 + self.by;
        if m < 1 {
            0
        } else {
            self.base.at(m as u64)
        }
    }
    fn fill(&self, start: u64, out: &mut [Symbol]) {
        let first = start as i64 + self.by;
        if first >= 1 {
            self.base.fill(first as u64, out);
        } else {
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = self.at(start + i as u64);
            }
        }
    }
    fn period(&self) -> Option<u64> {
        if self.by >= 0 {
            self.base.period()
        } else {
            None
        }
    }
    fn kind(&self) -> String {
        format!("shift({},{})", self.base.kind(), self.by)
    }
}

#[derive(Debug)]
struct CoinFlips {
    seed: u64,
}

impl SymbolSource for CoinFlips {
    fn alphabet(&self) -> &Alphabet {
        static BIN: std::sync::OnceLock<Alphabet> = std::sync::OnceLock::new();
        BIN.get_or_init(Alphabet::binary)
    }
    fn at(&self, n: u64) -> Symbol {
        let mut out = [0];
        self.fill(n, &mut out);
        out[0]
    }
    fn fill(&self, start: u64, out: &mut [Symbol]) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        // one 32-bit word per position
        rng.set_word_pos((start - 1) as u128);
        for slot in out.iter_mut() {
            *slot = (rng.next_u32() & 1) as Symbol;
        }
    }
    fn kind(&self) -> String {
        format!("coin_flips({})", self.seed)
    }
}

/// A finite word, optionally anchored at a start index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub symbols: Vec<Symbol>,
    pub start: Option<u64>,
}

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word {
            symbols,
            start: None,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        alphabet.render(&self.symbols)
    }
}

/// The cylinder `{x : x(n + n_i) = α_i for all i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderSpec {
    offsets: Vec<i64>,
    symbols: Vec<Symbol>,
}

impl CylinderSpec {
    pub fn new(offsets: Vec<i64>, symbols: Vec<Symbol>) -> Result<Self> {
        if offsets.is_empty() || offsets.len() != symbols.len() {
            return Err(invalid("cylinder needs matching, nonempty offsets and symbols"));
        }
        if offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("cylinder offsets must be strictly increasing"));
        }
        Ok(CylinderSpec { offsets, symbols })
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Cutoffs {
    Identity,
    Explicit(Vec<u64>),
}

/// A strictly increasing sequence of cutoffs `N_1 < N_2 < ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubseqScheme {
    cutoffs: Cutoffs,
    label: String,
}

impl SubseqScheme {
    /// The trivial scheme `N_k = k`.
    pub fn identity() -> Self {
        SubseqScheme {
            cutoffs: Cutoffs::Identity,
            label: "N_k=k".into(),
        }
    }

    pub fn explicit(cutoffs: Vec<u64>, label: impl Into<String>) -> Result<Self> {
        if cutoffs.is_empty() {
            return Err(invalid("scheme needs at least one cutoff"));
        }
        if cutoffs[0] == 0 || cutoffs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("scheme cutoffs must be positive and strictly increasing"));
        }
        Ok(SubseqScheme {
            cutoffs: Cutoffs::Explicit(cutoffs),
            label: label.into(),
        })
    }

    /// One-cutoff scheme `(N)`.
    pub fn single(n: u64) -> Self {
        Self::explicit(vec![n.max(1)], format!("N={n}")).expect("single cutoff")
    }

    /// `start, start*ratio, ...`, `count` terms.
    pub fn geometric(start: u64, ratio: u64, count: usize) -> Result<Self> {
        if start == 0 || ratio < 2 || count == 0 {
            return Err(invalid("geometric scheme needs start >= 1, ratio >= 2, count >= 1"));
        }
        let mut v = Vec::with_capacity(count);
        let mut n = start;
        for _ in 0..count {
            v.push(n);
            n = n
                .checked_mul(ratio)
                .ok_or_else(|| Error::Overflow("geometric scheme".into()))?;
        }
        Self::explicit(v, format!("geometric({start},{ratio})"))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of cutoffs, or `None` for the unbounded identity scheme.
    pub fn len(&self) -> Option<usize> {
        match &self.cutoffs {
            Cutoffs::Identity => None,
            Cutoffs::Explicit(v) => Some(v.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `N_k` for `k >= 1`.
    pub fn cutoff(&self, k: usize) -> Result<u64> {
        match &self.cutoffs {
            Cutoffs::Identity if k >= 1 => Ok(k as u64),
            Cutoffs::Explicit(v) if k >= 1 && k <= v.len() => Ok(v[k - 1]),
            _ => Err(Error::SchemeIndex {
                index: k,
                len: self.len().unwrap_or(usize::MAX),
            }),
        }
    }

    /// `N_1, ..., N_k`.
    pub fn cutoffs_upto(&self, k: usize) -> Result<Vec<u64>> {
        (1..=k).map(|i| self.cutoff(i)).collect()
    }

    /// Cutoffs reported by averaging operations: all of `N_1..=N_k` for a
    /// finite scheme, the last three for the identity scheme.
    pub(crate) fn reported(&self, k: usize) -> Result<Vec<u64>> {
        match self.cutoffs {
            Cutoffs::Identity => self.tail(k),
            Cutoffs::Explicit(_) => self.cutoffs_upto(k),
        }
    }

    /// The last (up to) three cutoffs ending at `N_k`.
    pub(crate) fn tail(&self, k: usize) -> Result<Vec<u64>> {
        let lo = k.saturating_sub(2).max(1);
        (lo..=k).map(|i| self.cutoff(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub cutoff: u64,
    /// Closed-form value for periodic input, otherwise the empirical value.
    pub value: f64,
    /// `|{1<=n<=N : x(n)=1}| / N` at the cutoff.
    pub empirical: f64,
    /// Exact limit, present only for periodic input.
    pub exact: Option<Exact>,
    /// Smallest and largest empirical values over the last three cutoffs.
    pub tail_window: (f64, f64),
}

/// A real-valued observable on sequence positions.
#[derive(Debug, Clone, PartialEq)]
pub enum Weighting {
    /// `w(x(n)) = table[x(n)]`.
    Symbols(Vec<f64>),
    /// `w = table[x(n) .. x(n + width - 1)]`, `default` for unlisted words.
    Window {
        width: usize,
        table: HashMap<Vec<Symbol>, f64>,
        default: f64,
    },
}

impl Weighting {
    /// `0 ↦ 0, 1 ↦ 1` on binary sequences; symbol index otherwise.
    pub fn identity(alphabet: &Alphabet) -> Self {
        Weighting::Symbols((0..alphabet.len()).map(|i| i as f64).collect())
    }

    pub fn constant(c: f64, alphabet: &Alphabet) -> Self {
        Weighting::Symbols(vec![c; alphabet.len()])
    }

    /// `max |w|`.
    pub fn bound(&self) -> f64 {
        match self {
            Weighting::Symbols(t) => t.iter().fold(0.0, |m, v| m.max(v.abs())),
            Weighting::Window { table, default, .. } => {
                table.values().fold(default.abs(), |m, v| m.max(v.abs()))
            }
        }
    }

    fn width(&self) -> usize {
        match self {
            Weighting::Symbols(_) => 1,
            Weighting::Window { width, .. } => (*width).max(1),
        }
    }

    pub(crate) fn is_integral(&self) -> bool {
        let int = |v: &f64| v.fract() == 0.0 && v.abs() < 1e15;
        match self {
            Weighting::Symbols(t) => t.iter().all(int),
            Weighting::Window { table, default, .. } => int(default) && table.values().all(int),
        }
    }

    pub(crate) fn check(&self, alphabet: &Alphabet) -> Result<()> {
        match self {
            Weighting::Symbols(t) if t.len() != alphabet.len() => Err(invalid(format!(
                "weighting has {} entries for an alphabet of {}",
                t.len(),
                alphabet.len()
            ))),
            Weighting::Window { width: 0, .. } => Err(invalid("window weighting needs width >= 1")),
            _ => Ok(()),
        }
    }

    /// `w` at positions `first..first + len`.
    pub fn values(&self, seq: &Sequence, first: u64, len: u64) -> Vec<f64> {
        let span = len + self.width() as u64 - 1;
        let syms = seq.range(first, span);
        match self {
            Weighting::Symbols(t) => syms.iter().map(|&s| t[s as usize]).collect(),
            Weighting::Window {
                width,
                table,
                default,
            } => (0..len as usize)
                .map(|i| *table.get(&syms[i..i + width]).unwrap_or(default))
                .collect(),
        }
    }
}

/// Counts positions in `1..=N` with symbol `1` at each given cutoff (sorted).
pub(crate) fn count_ones_at(seq: &Sequence, cutoffs: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(cutoffs.len());
    let mut acc = 0u64;
    let mut prev = 0u64;
    for &n in cutoffs {
        acc += count_ones_range(seq, prev + 1, n);
        out.push(acc);
        prev = n;
    }
    out
}

/// Counts ones on `first..=last`.
pub(crate) fn count_ones_range(seq: &Sequence, first: u64, last: u64) -> u64 {
    if last < first {
        return 0;
    }
    let chunks = (last - first) / CHUNK + 1;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let s = first + c * CHUNK;
            let e = (s + CHUNK - 1).min(last);
            let mut buf = vec![0 as Symbol; (e - s + 1) as usize];
            seq.fill(s, &mut buf);
            buf.iter().filter(|&&b| b == 1).count() as u64
        })
        .sum()
}

/// Exact density of ones for a periodic binary sequence.
pub(crate) fn periodic_density(seq: &Sequence) -> Option<Exact> {
    let q = seq.period().filter(|&q| q <= EXACT_PERIOD_CAP)?;
    Some(ratio(count_ones_range(seq, 1, q), q))
}

/// `(seq(start), ..., seq(start + len - 1))`.
pub fn evaluate_window(seq: &Sequence, start: u64, len: u64) -> Result<Word> {
    if start == 0 {
        return Err(invalid("sequences are 1-indexed; start must be >= 1"));
    }
    Ok(Word {
        symbols: seq.range(start, len),
        start: Some(start),
    })
}

/// Density of ones along `[1, N_k]`.
pub fn empirical_density(seq: &Sequence, scheme: &SubseqScheme, k: usize) -> Result<DensityReport> {
    seq.require_binary()?;
    let tail = scheme.tail(k)?;
    let counts = count_ones_at(seq, &tail);
    let vals: Vec<f64> = counts
        .iter()
        .zip(&tail)
        .map(|(&c, &n)| c as f64 / n as f64)
        .collect();
    let n = *tail.last().unwrap();
    let empirical = *vals.last().unwrap();
    let exact = periodic_density(seq);
    let value = exact.as_ref().map_or(empirical, to_f64);
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(DensityReport {
        cutoff: n,
        value,
        empirical,
        exact,
        tail_window: (lo, hi),
    })
}

/// `(1/N_k) |{1 <= n <= N_k : seq(n + n_i) = α_i for all i}|`; positions
/// with `n + n_i < 1` are skipped, the denominator stays `N_k`.
pub fn cylinder_frequency(
    seq: &Sequence,
    cyl: &CylinderSpec,
    scheme: &SubseqScheme,
    k: usize,
) -> Result<f64> {
    let n = scheme.cutoff(k)?;
    let min_off = cyl.offsets[0];
    let max_off = *cyl.offsets.last().unwrap();
    // materialize positions lo..=hi
    let lo = (1 + min_off).max(1) as u64;
    let hi = (n as i64 + max_off).max(0) as u64;
    if hi < lo {
        return Ok(0.0);
    }
    let syms = seq.range(lo, hi - lo + 1);
    let first_n = (1 - min_off).max(1) as u64;
    if first_n > n {
        return Ok(0.0);
    }
    let hits = (0..(n - first_n + 1) as usize)
        .into_par_iter()
        .with_min_len(CHUNK as usize)
        .map(|i| first_n + i as u64)
        .filter(|&m| {
            cyl.offsets.iter().zip(&cyl.symbols).all(|(&off, &a)| {
                let pos = m as i64 + off;
                syms[(pos as u64 - lo) as usize] == a
            })
        })
        .count();
    Ok(hits as f64 / n as f64)
}

/// Frequencies of the length-`len` words starting at `1..=N_k`, sorted by word.
pub fn word_statistics(
    seq: &Sequence,
    len: usize,
    scheme: &SubseqScheme,
    k: usize,
) -> Result<Vec<(Word, f64)>> {
    if len == 0 {
        return Err(invalid("word length must be >= 1"));
    }
    let n = scheme.cutoff(k)?;
    let counts = word_counts(seq, len, n);
    let mut out: Vec<(Word, f64)> = counts
        .into_iter()
        .map(|(w, c)| (Word::new(w), c as f64 / n as f64))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

pub(crate) fn word_counts(seq: &Sequence, len: usize, n: u64) -> HashMap<Vec<Symbol>, u64> {
    let syms = seq.range(1, n + len as u64 - 1);
    let base = seq.alphabet().len() as u128;
    let fits = base.checked_pow(len as u32).is_some_and(|v| v < u64::MAX as u128);
    let mut out: HashMap<Vec<Symbol>, u64> = HashMap::new();
    if fits {
        let mut coded: HashMap<u64, u64> = HashMap::new();
        let base = base as u64;
        let top = base.pow(len as u32 - 1);
        let mut code = syms[..len].iter().fold(0u64, |c, &s| c * base + s as u64);
        *coded.entry(code).or_default() += 1;
        for i in 1..n as usize {
            code = (code - syms[i - 1] as u64 * top) * base + syms[i + len - 1] as u64;
            *coded.entry(code).or_default() += 1;
        }
        for (mut c, cnt) in coded {
            let mut w = vec![0 as Symbol; len];
            for slot in w.iter_mut().rev() {
                *slot = (c % base) as Symbol;
                c /= base;
            }
            out.insert(w, cnt);
        }
    } else {
        for i in 0..n as usize {
            *out.entry(syms[i..i + len].to_vec()).or_default() += 1;
        }
    }
    out
}

/// Partial Cesàro averages indexed by cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageSeries {
    pub label: String,
    pub cutoffs: Vec<u64>,
    pub values: Vec<f64>,
    /// Exact values where the summands are exact rationals.
    pub exact: Option<Vec<Exact>>,
}

impl AverageSeries {
    /// Value at the largest cutoff.
    pub fn tail(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }

    /// Max over the last three cutoffs.
    pub fn tail_max(&self) -> f64 {
        self.values
            .iter()
            .rev()
            .take(3)
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
