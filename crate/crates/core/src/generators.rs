//! Concrete sequence families: periodic words, squarefree and B-free
//! indicators, abundance classes, totient-ratio sets, paperfolding,
//! Toeplitz, alternating blocks and sequences with erased ones.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{self, isqrt, primes_with_square_upto};
use crate::bfree::BSet;
use crate::error::{invalid, Error, Result};
use crate::seqcore::{ratio, Alphabet, Exact, Sequence, Symbol, SymbolSource, EXACT_PERIOD_CAP};

fn binary() -> &'static Alphabet {
    static BIN: std::sync::OnceLock<Alphabet> = std::sync::OnceLock::new();
    BIN.get_or_init(Alphabet::binary)
}

#[derive(Debug)]
struct Periodic {
    alphabet: Alphabet,
    word: Vec<Symbol>,
}

impl SymbolSource for Periodic {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn at(&self, n: u64) -> Symbol {
        self.word[((n - 1) % self.word.len() as u64) as usize]
    }
    fn fill(&self, start: u64, out: &mut [Symbol]) {
        let q = self.word.len();
        let mut i = ((start - 1) % q as u64) as usize;
        for slot in out {
            *slot = self.word[i];
            i += 1;
            if i == q {
                i = 0;
            }
        }
    }
    fn period(&self) -> Option<u64> {
        Some(self.word.len() as u64)
    }
    fn kind(&self) -> String {
        format!("periodic({})", self.alphabet.render(&self.word))
    }
}

/// `seq(n) = word[(n - 1) mod |word|]`.
pub fn periodic_seq(alphabet: Alphabet, word: Vec<Symbol>) -> Result<Sequence> {
    if word.is_empty() {
        return Err(invalid("periodic sequence needs a nonempty word"));
    }
    if word.iter().any(|&s| s as usize >= alphabet.len()) {
        return Err(invalid("word uses symbols outside the alphabet"));
    }
    Ok(Sequence::new(Periodic { alphabet, word }))
}

/// Binary periodic sequence from a `0`/`1` string.
pub fn periodic_binary(word: &str) -> Result<Sequence> {
    let alphabet = Alphabet::binary();
    let w = alphabet.parse_word(word)?;
    periodic_seq(alphabet, w)
}

#[derive(Debug)]
struct Squarefree;

impl SymbolSource for Squarefree {
    fn alphabet(&self) -> &Alphabet {
        binary()
    }
    fn at(&self, n: u64) -> Symbol {
        arith::is_squarefree(n) as Symbol
    }
    fn fill(&self, start: u64, out: &mut [Symbol]) {
        out.fill(1);
        let end = start + out.len() as u64 - 1;
        for p in primes_with_square_upto(end) {
            let sq = p * p;
            let mut m = start.div_ceil(sq) * sq;
            while m <= end {
                out[(m - start) as usize] = 0;
                m += sq;
            }
        }
    }
    fn kind(&self) -> String {
        "squarefree".into()
    }
}

/// Indicator of the squarefree numbers.
pub fn squarefree_seq() -> Sequence {
    Sequence::new(Squarefree)
}

#[derive(Debug)]
struct BFree {
    set: BSet,
    period: Option<u64>,
}

impl SymbolSource for BFree {
    fn alphabet(&self) -> &Alphabet {
        binary()
    }
    fn at(&self, n: u64) -> Symbol {
        (!self.set.has_multiple(n)) as Symbol
    }
    fn fill(&self, start: u64, out: &mut [Symbol]) {
        let end = start + out.len() as u64 - 1;
        if self.set.is_all_above_one() {
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = (start + i as u64 == 1) as Symbol;
            }
            return;
        }
        out.fill(1);
        for b in self.set.elements_upto(end) {
            let mut m = start.div_ceil(b) * b;
            while m <= end {
                out[(m - start) as usize] = 0;
                m += b;
            }
        }
    }
    fn period(&self) -> Option<u64> {
        self.period
    }
    fn kind(&self) -> String {
        format!("bfree({})", self.set)
    }
}

/// Indicator of `ℱ_B`, the integers divisible by no element of `B`.
pub fn bfree_seq(set: &BSet) -> Sequence {
    let period = set
        .elements()
        .and_then(|els| els.iter().try_fold(1u64, |acc, &b| arith::lcm(acc, b)))
        .filter(|&p| p <= EXACT_PERIOD_CAP);
    Sequence::new(BFree {
        set: set.clone(),
        period,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbundanceClass {
    /// `σ(n) > 2n`
    Abundant,
    /// `σ(n) < 2n`
    Deficient,
    /// `σ(n) = 2n`
    Perfect,
}

impl AbundanceClass {
    pub fn of(n: u64, sigma: u128) -> Self {
        match sigma.cmp(&(2 * n as u128)) {
            std::cmp::Ordering::Greater => AbundanceClass::Abundant,
            std::cmp::Ordering::Less => AbundanceClass::Deficient,
            std::cmp::Ordering::Equal => AbundanceClass::Perfect,
        }
    }
}

#[derive(Debug)]
struct Abundance {
    class: AbundanceClass,
}

impl SymbolSource for Abundance {
    fn alphabet(&self) -> &Alphabet {
        binary()
    }
    fn at(&self, n: u64) -> Symbol {
        (AbundanceClass::of(n, arith::divisor_sum(n)) == self.class) as Symbol
    }
    fn fill(&self, start: u64, out: &mut [Symbol]) {
        let end = start + out.len() as u64 - 1;
        let mut sigma = vec![0u128; out.len()];
        // pairs (d, m/d) with d <= sqrt(m)
        for d in 1..=isqrt(end) {
            let first = start.max(d * d);
            let mut m = first.div_ceil(d) * d;
            while m <= end {
                let i = (m - start) as usize;
                sigma[i] += d as u128;
                let e = m / d;
                if e != d {
                    sigma[i] += e as u128;
                }
                m += d;
            }
        }
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = (AbundanceClass::of(start + i as u64, sigma[i]) == self.class) as Symbol;
        }
    }
    fn kind(&self) -> String {
        format!("abundance({:?})", self.class)
    }
}

/// Indicator of the abundant, deficient or perfect numbers.
pub fn abundance_class_seq(class: AbundanceClass) -> Sequence {
    Sequence::new(Abundance { class })
}

#[derive(Debug)]
struct TotientRatio {
    num: u64,
    den: u64,
}

impl TotientRatio {
    fn below(&self, n: u64, phi: u64) -> bool {
        // φ(n)/n < num/den
        (phi as u128) * (self.den as u128) < (self.num as u128) * (n as u128)
    }
}

impl SymbolSource for TotientRatio {
    fn alphabet(&self) -> &Alphabet {
        binary()
    }
    fn at(&self, n: u64) -> Symbol {
        self.below(n, arith::euler_phi(n)) as Symbol
    }
    fn fill(&self, start: u64, out: &mut [Symbol]) {
        let end = start + out.len() as u64 - 1;
        let mut rest: Vec<u64> = (start..=end).collect();
        let mut phi = rest.clone();
        for p in primes_with_square_upto(end) {
            let mut m = start.div_ceil(p) * p;
            while m <= end {
                let i = (m - start) as usize;
                phi[i] = phi[i] / p * (p - 1);
                while rest[i] % p == 0 {
                    rest[i] /= p;
                }
                m += p;
            }
        }
        for (i, slot) in out.iter_mut().enumerate() {
            if rest[i] > 1 {
                phi[i] = phi[i] / rest[i] * (rest[i] - 1);
            }
            *slot = self.below(start + i as u64, phi[i]) as Symbol;
        }
    }
    fn kind(&self) -> String {
        format!("totient_ratio({}/{})", self.num, self.den)
    }
}

/// Indicator of `Φ_x = {n : φ(n)/n < x}` with `x = num/den`, compared exactly.
pub fn totient_ratio_seq(num: u64, den: u64) -> Result<Sequence> {
    if den == 0 || num > den {
        return Err(invalid("totient threshold must be a fraction in [0, 1]"));
    }
    Ok(Sequence::new(TotientRatio { num, den }))
}

/// Folding instructions `k ↦ i(k)`, `k >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FoldingInstructions {
    Constant { bit: u8 },
    /// `i(k) = bits[(k - 1) mod len]`.
    Periodic { bits: Vec<u8> },
}

impl FoldingInstructions {
    pub fn bit(&self, k: u32) -> u8 {
        match self {
            FoldingInstructions::Constant { bit } => *bit,
            FoldingInstructions::Periodic { bits } => bits[(k as usize - 1) % bits.len()],
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            FoldingInstructions::Constant { bit } => *bit <= 1,
            FoldingInstructions::Periodic { bits } => {
                !bits.is_empty() && bits.iter().all(|&b| b <= 1)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("folding instructions must be nonempty bits"))
        }
    }
}

#[derive(Debug)]
struct Paperfolding {
    instr: FoldingInstructions,
    complemented: bool,
}

impl SymbolSource for Paperfolding {
    fn alphabet(&self) -> &Alphabet {
        binary()
    }
    fn at(&self, mut n: u64) -> Symbol {
        // t(1) = i(1); t(2^k) = i(k); t(n) = t(2^{k+1} - n) for 2^k < n < 2^{k+1}
        let mut flips = 0u32;
        loop {
            if n == 1 {
                break (self.instr.bit(1) ^ (flips & 1) as u8) as Symbol;
            }
            let k = 63 - n.leading_zeros();
            if n == 1u64 << k {
                break (self.instr.bit(k) ^ (flips & 1) as u8) as Symbol;
            }
            n = (1u64 << (k + 1)) - n;
            if self.complemented {
                flips += 1;
            }
        }
    }
    fn kind(&self) -> String {
        if self.complemented {
            "paperfolding(complemented)".into()
        } else {
            "paperfolding".into()
        }
    }
}

/// Paperfolding sequence with the given folding instructions. With
/// `complemented` set, the reflected bit is complemented (the classical
/// regular paperfolding recursion); the default reflects without complement.
pub fn paperfolding_seq(instr: FoldingInstructions, complemented: bool) -> Result<Sequence> {
    instr.validate()?;
    Ok(Sequence::new(Paperfolding {
        instr,
        complemented,
    }))
}

/// Fill positions `n ≡ residue (mod period)` with `symbol`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToeplitzRule {
    pub period: u64,
    pub residue: u64,
    pub symbol: Symbol,
}

#[derive(Debug)]
struct Toeplitz {
    alphabet: Alphabet,
    rules: Vec<ToeplitzRule>,
    default: Symbol,
    period: Option<u64>,
}

impl SymbolSource for Toeplitz {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn at(&self, n: u64) -> Symbol {
        self.rules
            .iter()
            .find(|r| n % r.period == r.residue)
            .map_or(self.default, |r| r.symbol)
    }
    fn period(&self) -> Option<u64> {
        self.period
    }
    fn kind(&self) -> String {
        format!("toeplitz({} rules)", self.rules.len())
    }
}

/// Position `n` takes the symbol of the first rule with `n ≡ r (mod p)`;
/// positions no rule fills take `default`.
pub fn toeplitz_seq(alphabet: Alphabet, rules: Vec<ToeplitzRule>, default: Symbol) -> Result<Sequence> {
    for r in &rules {
        if r.period == 0 || r.residue >= r.period {
            return Err(invalid("toeplitz rule needs period >= 1 and residue < period"));
        }
        if r.symbol as usize >= alphabet.len() {
            return Err(invalid("toeplitz rule symbol outside alphabet"));
        }
    }
    if default as usize >= alphabet.len() {
        return Err(invalid("toeplitz default symbol outside alphabet"));
    }
    let period = rules
        .iter()
        .try_fold(1u64, |acc, r| arith::lcm(acc, r.period))
        .filter(|&p| p <= EXACT_PERIOD_CAP);
    Ok(Sequence::new(Toeplitz {
        alphabet,
        rules,
        default,
        period,
    }))
}

/// Exact density of positions filled by the first `j` rules, `j = 1..=len`.
pub fn toeplitz_filled_density(rules: &[ToeplitzRule]) -> Result<Vec<Exact>> {
    let mut out = Vec::with_capacity(rules.len());
    let mut period = 1u64;
    for j in 0..rules.len() {
        period = arith::lcm(period, rules[j].period)
            .filter(|&p| p <= EXACT_PERIOD_CAP)
            .ok_or_else(|| Error::Budget("toeplitz period too large".into()))?;
        let prefix = &rules[..=j];
        let filled = (1..=period)
            .filter(|n| prefix.iter().any(|r| n % r.period == r.residue))
            .count() as u64;
        out.push(ratio(filled, period));
    }
    Ok(out)
}

/// Block lengths `b_1 < b_2 < ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockSpec {
    /// `b_k = base^k`.
    Power { base: u64 },
    /// `b_k = step * k`.
    Linear { step: u64 },
    /// Listed lengths; beyond the list, `b_{m+j} = b_m + j`.
    Explicit { lengths: Vec<u64> },
}

impl BlockSpec {
    fn validate(&self) -> Result<()> {
        match self {
            BlockSpec::Power { base } if *base >= 2 => Ok(()),
            BlockSpec::Linear { step } if *step >= 1 => Ok(()),
            BlockSpec::Explicit { lengths }
                if !lengths.is_empty()
                    && lengths[0] >= 1
                    && lengths.windows(2).all(|w| w[0] < w[1]) =>
            {
                Ok(())
            }
            _ => Err(invalid("block lengths must be positive and strictly increasing")),
        }
    }

    /// `b_k`, `k >= 1`.
    pub fn length(&self, k: u64) -> Option<u64> {
        match self {
            BlockSpec::Power { base } => base.checked_pow(k as u32),
            BlockSpec::Linear { step } => step.checked_mul(k),
            BlockSpec::Explicit { lengths } => {
                let m = lengths.len() as u64;
                if k <= m {
                    Some(lengths[k as usize - 1])
                } else {
                    lengths[m as usize - 1].checked_add(k - m)
                }
            }
        }
    }

    /// `N_k = b_1 + ... + b_k`.
    pub fn partial_sum(&self, k: u64) -> Option<u64> {
        match self {
            BlockSpec::Power { base } => {
                // base (base^k - 1) / (base - 1)
                let pk = base.checked_pow(k as u32)?;
                ((pk - 1) / (base - 1)).checked_mul(*base)
            }
            BlockSpec::Linear { step } => {
                let t = (k as u128) * (k as u128 + 1) / 2 * (*step as u128);
                u64::try_from(t).ok()
            }
            BlockSpec::Explicit { lengths } => {
                let m = lengths.len() as u64;
                let head: u64 = lengths[..k.min(m) as usize].iter().sum();
                if k <= m {
                    Some(head)
                } else {
                    let j = (k - m) as u128;
                    let last = lengths[m as usize - 1] as u128;
                    u64::try_from(head as u128 + j * last + j * (j + 1) / 2).ok()
                }
            }
        }
    }

    /// Smallest `k` with `N_k >= n`.
    fn block_of(&self, n: u64) -> u64 {
        let mut hi = 1u64;
        while self.partial_sum(hi).is_some_and(|s| s < n) {
            hi *= 2;
        }
        let mut lo = 1u64;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.partial_sum(mid).is_some_and(|s| s < n) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockVariant {
    /// `0101..01 1010..10 0101..01 ...` with block lengths `b_k`.
    Alternating,
    /// `0..0 1..1 0..0 ...` with block lengths `b_k / 2`.
    Constant,
}

#[derive(Debug)]
struct AlternatingBlocks {
    spec: BlockSpec,
    variant: BlockVariant,
}

impl AlternatingBlocks {
    fn scale(&self) -> u64 {
        match self.variant {
            BlockVariant::Alternating => 1,
            BlockVariant::Constant => 2,
        }
    }

    fn symbol(&self, k: u64, offset: u64) -> Symbol {
        let second = k % 2 == 0;
        match self.variant {
            BlockVariant::Alternating => ((offset % 2 == 1) ^ second) as Symbol,
            BlockVariant::Constant => second as Symbol,
        }
    }
}

impl SymbolSource for AlternatingBlocks {
    fn alphabet(&self) -> &Alphabet {
        binary()
    }
    fn at(&self, n: u64) -> Symbol {
        let mut out = [0];
        self.fill(n, &mut out);
        out[0]
    }
    fn fill(&self, start: u64, out: &mut [Symbol]) {
        let s = self.scale();
        let mut k = self.spec.block_of(start.saturating_mul(s)).max(1);
        // block k covers (N_{k-1}/s, N_k/s]
        let mut block_start = self.spec.partial_sum(k - 1).map_or(u64::MAX, |v| v / s) + 1;
        let mut block_end = self.spec.partial_sum(k).map_or(u64::MAX, |v| v / s);
        while block_end < start {
            k += 1;
            block_start = block_end + 1;
            block_end = self.spec.partial_sum(k).map_or(u64::MAX, |v| v / s);
        }
        for (i, slot) in out.iter_mut().enumerate() {
            let n = start + i as u64;
            while n > block_end {
                k += 1;
                block_start = block_end + 1;
                block_end = self.spec.partial_sum(k).map_or(u64::MAX, |v| v / s);
            }
            *slot = self.symbol(k, n - block_start);
        }
    }
    fn kind(&self) -> String {
        format!("alternating_blocks({:?},{:?})", self.spec, self.variant)
    }
}

/// Concatenated alternating (or constant half-length) blocks.
pub fn alternating_blocks_seq(spec: BlockSpec, variant: BlockVariant) -> Result<Sequence> {
    spec.validate()?;
    if variant == BlockVariant::Constant {
        let all_even = match &spec {
            BlockSpec::Power { base } => base % 2 == 0,
            BlockSpec::Linear { step } => step % 2 == 0,
            // the continuation b_m + j alternates parity
            BlockSpec::Explicit { .. } => false,
        };
        if !all_even {
            return Err(invalid("constant-block variant needs every b_k even"));
        }
    }
    Ok(Sequence::new(AlternatingBlocks { spec, variant }))
}

/// Block boundaries `N_1, ..., N_m` in sequence positions (halved for the
/// constant variant).
pub fn block_cutoffs(spec: &BlockSpec, variant: BlockVariant, m: u64) -> Result<Vec<u64>> {
    let s = match variant {
        BlockVariant::Alternating => 1,
        BlockVariant::Constant => 2,
    };
    (1..=m)
        .map(|k| {
            spec.partial_sum(k)
                .map(|v| v / s)
                .ok_or_else(|| Error::Overflow(format!("block partial sum N_{k}")))
        })
        .collect()
}

/// Gaps between consecutive erased ones (counted in ones of `0101...`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapRule {
    /// Finitely many erasures.
    Explicit { gaps: Vec<u64> },
    /// `gap_k = step * k`.
    Linear { step: u64 },
    /// `gap_k = base^k`.
    Power { base: u64 },
}

impl GapRule {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            GapRule::Explicit { gaps } => {
                gaps.first().map_or(true, |&g| g >= 1) && gaps.windows(2).all(|w| w[0] < w[1])
            }
            GapRule::Linear { step } => *step >= 1,
            GapRule::Power { base } => *base >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("erasure gaps must be positive and strictly increasing"))
        }
    }

    /// `c_k = gap_1 + ... + gap_k`, `None` past the last erasure or on overflow.
    pub fn cumulative(&self, k: u64) -> Option<u64> {
        match self {
            GapRule::Explicit { gaps } => {
                if k as usize > gaps.len() {
                    None
                } else {
                    Some(gaps[..k as usize].iter().sum())
                }
            }
            GapRule::Linear { step } => {
                u64::try_from((k as u128) * (k as u128 + 1) / 2 * (*step as u128)).ok()
            }
            GapRule::Power { base } => {
                let pk = base.checked_pow(k as u32)?;
                ((pk - 1) / (base - 1)).checked_mul(*base)
            }
        }
    }

    /// Number of `k >= 1` with `c_k <= m`.
    fn count_upto(&self, m: u64) -> u64 {
        let le = |k: u64| self.cumulative(k).is_some_and(|c| c <= m);
        if !le(1) {
            return 0;
        }
        let mut hi = 2u64;
        while le(hi) {
            hi *= 2;
        }
        let mut lo = 1u64;
        // le(lo) holds, le(hi) fails
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if le(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErasureMode {
    /// The erased `1` becomes `0`; positions are unchanged.
    Replace,
    /// The erased `1` is removed and later symbols move up by one, so each
    /// erasure flips the phase of the remaining `0101...` pattern.
    Delete,
}

#[derive(Debug)]
struct ErasedOnes {
    gaps: GapRule,
    mode: ErasureMode,
}

impl ErasedOnes {
    /// Is source position `m` (in `0101...`) an erased one?
    fn erased(&self, m: u64) -> bool {
        m % 2 == 0 && {
            let c = m / 2;
            let j = self.gaps.count_upto(c);
            j > 0 && self.gaps.cumulative(j) == Some(c)
        }
    }
}

impl SymbolSource for ErasedOnes {
    fn alphabet(&self) -> &Alphabet {
        binary()
    }
    fn at(&self, n: u64) -> Symbol {
        match self.mode {
            ErasureMode::Replace => (n % 2 == 0 && !self.erased(n)) as Symbol,
            ErasureMode::Delete => {
                // least m with m - #{deleted <= m} = n
                let mut m = n;
                loop {
                    let next = n + self.gaps.count_upto(m / 2);
                    if next == m {
                        break;
                    }
                    m = next;
                }
                (m % 2 == 0) as Symbol
            }
        }
    }
    fn kind(&self) -> String {
        format!("erased_ones({:?},{:?})", self.gaps, self.mode)
    }
}

/// `0101...` with the `c_k`-th one erased, `c_k` the cumulative gaps.
pub fn erased_ones_seq(gaps: GapRule, mode: ErasureMode) -> Result<Sequence> {
    gaps.validate()?;
    Ok(Sequence::new(ErasedOnes { gaps, mode }))
}

impl fmt::Display for AbundanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AbundanceClass::Abundant => "abundant",
            AbundanceClass::Deficient => "deficient",
            AbundanceClass::Perfect => "perfect",
        };
        f.write_str(s)
    }
}
