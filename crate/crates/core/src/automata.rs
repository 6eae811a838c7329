//! Complete deterministic automata with output, synchronizing words and
//! the periodic approximant built from synchronizing digit blocks.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::generators::periodic_seq;
use crate::metrics::PeriodicApproximant;
use crate::seqcore::{ratio, to_f64, Alphabet, Exact, Sequence, Symbol, SymbolSource};

/// Largest `|Q|` for the subset search.
pub const MAX_SUBSET_STATES: usize = 20;
/// Largest `k^{n1}` enumerated by [`synchronizing_residues`].
pub const RESIDUE_BUDGET: u64 = 1 << 24;

pub type State = usize;

/// `M = (Q, Σ_k, δ, q_0, τ)` with `q_0` the first state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    names: Vec<String>,
    k: u32,
    delta: Vec<Vec<State>>,
    outputs: Vec<Symbol>,
    output_alphabet: Alphabet,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Token {
    Text(String),
    Int(u64),
}

impl Token {
    fn text(&self) -> String {
        match self {
            Token::Text(s) => s.clone(),
            Token::Int(v) => v.to_string(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonFile {
    states: Vec<String>,
    k: u32,
    transitions: Vec<Vec<State>>,
    outputs: Vec<Token>,
    #[serde(default)]
    output_alphabet: Option<Vec<String>>,
}

impl Automaton {
    pub fn new(
        names: Vec<String>,
        k: u32,
        delta: Vec<Vec<State>>,
        outputs: Vec<Symbol>,
        output_alphabet: Alphabet,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(invalid("automaton needs at least one state"));
        }
        if k < 2 {
            return Err(invalid("digit base k must be >= 2"));
        }
        if delta.len() != n || delta.iter().any(|row| row.len() != k as usize) {
            return Err(invalid(format!("transition table must be {n} x {k}")));
        }
        if delta.iter().flatten().any(|&t| t >= n) {
            return Err(invalid("transition target out of range"));
        }
        if outputs.len() != n {
            return Err(invalid("need one output per state"));
        }
        if outputs.iter().any(|&o| o as usize >= output_alphabet.len()) {
            return Err(invalid("output symbol outside the output alphabet"));
        }
        Ok(Automaton {
            names,
            k,
            delta,
            outputs,
            output_alphabet,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: AutomatonFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let alphabet = match file.output_alphabet {
            Some(symbols) => Alphabet::new(symbols)?,
            None => Alphabet::binary(),
        };
        let outputs = file
            .outputs
            .iter()
            .map(|t| {
                let s = t.text();
                alphabet
                    .index_of(&s)
                    .ok_or_else(|| invalid(format!("output {s:?} is not in the output alphabet")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.states, file.k, file.transitions, outputs, alphabet)
    }

    pub fn to_json(&self) -> String {
        let file = AutomatonFile {
            states: self.names.clone(),
            k: self.k,
            transitions: self.delta.clone(),
            outputs: self
                .outputs
                .iter()
                .map(|&o| Token::Text(self.output_alphabet.token(o).to_string()))
                .collect(),
            output_alphabet: Some(self.output_alphabet.symbols().to_vec()),
        };
        serde_json::to_string_pretty(&file).expect("automaton serializes")
    }

    /// Binary-output automaton with states named `q0, q1, ...`.
    pub fn binary(k: u32, delta: Vec<Vec<State>>, outputs: Vec<Symbol>) -> Result<Self> {
        let names = (0..delta.len()).map(|i| format!("q{i}")).collect();
        Self::new(names, k, delta, outputs, Alphabet::binary())
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn output(&self, q: State) -> Symbol {
        self.outputs[q]
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output_alphabet
    }

    pub fn step(&self, q: State, digit: u32) -> State {
        self.delta[q][digit as usize]
    }

    fn check_word(&self, w: &[u32]) -> Result<()> {
        match w.iter().find(|&&d| d >= self.k) {
            Some(d) => Err(invalid(format!("digit {d} out of range for base {}", self.k))),
            None => Ok(()),
        }
    }

    fn run_from(&self, q: State, w: &[u32]) -> State {
        w.iter().fold(q, |s, &d| self.step(s, d))
    }
}

/// `δ(q_0, w)`.
pub fn run(m: &Automaton, w: &[u32]) -> Result<State> {
    m.check_word(w)?;
    Ok(m.run_from(0, w))
}

/// Most-significant-first base-`k` digits of `n >= 1`.
pub fn digits(mut n: u64, k: u32) -> Vec<u32> {
    let mut out = Vec::new();
    while n > 0 {
        out.push((n % k as u64) as u32);
        n /= k as u64;
    }
    out.reverse();
    out
}

/// The length-`len` zero-padded base-`k` block of `m`.
pub fn padded_digits(m: u64, k: u32, len: u32) -> Vec<u32> {
    let mut out = vec![0; len as usize];
    let mut v = m;
    for slot in out.iter_mut().rev() {
        *slot = (v % k as u64) as u32;
        v /= k as u64;
    }
    out
}

#[derive(Debug)]
struct Automatic(Automaton);

impl SymbolSource for Automatic {
    fn alphabet(&self) -> &Alphabet {
        &self.0.output_alphabet
    }
    fn at(&self, n: u64) -> Symbol {
        let m = &self.0;
        let k = m.k as u64;
        let mut pow = 1u64;
        while n / pow >= k {
            pow *= k;
        }
        let mut q = 0;
        let mut v = n;
        while pow > 0 {
            q = m.step(q, (v / pow) as u32);
            v %= pow;
            pow /= k;
        }
        m.output(q)
    }
    fn kind(&self) -> String {
        format!("automatic(k={}, |Q|={})", self.0.k, self.0.num_states())
    }
}

/// `a(n) = τ(δ(q_0, [n]_k))`.
pub fn automatic_seq(m: &Automaton) -> Sequence {
    Sequence::new(Automatic(m.clone()))
}

fn image_all(m: &Automaton, w: &[u32]) -> Vec<State> {
    (0..m.num_states()).map(|q| m.run_from(q, w)).collect()
}

pub fn is_synchronizing_word(m: &Automaton, w: &[u32]) -> Result<bool> {
    m.check_word(w)?;
    let img = image_all(m, w);
    Ok(img.iter().all(|&q| q == img[0]))
}

/// Shortest, then lexicographically smallest, word merging all states.
pub fn find_synchronizing_word(m: &Automaton, max_len: usize) -> Result<Option<Vec<u32>>> {
    if max_len == 0 {
        return Err(invalid("max_len must be >= 1"));
    }
    let n = m.num_states();
    if n > MAX_SUBSET_STATES {
        return Err(Error::Budget(format!(
            "subset search needs |Q| <= {MAX_SUBSET_STATES}, got {n}"
        )));
    }
    let full: u32 = (1u32 << n) - 1;
    if full.count_ones() == 1 {
        return Ok(Some(Vec::new()));
    }
    // parent[mask] = (previous mask, digit); u32::MAX marks unvisited
    let mut parent = vec![(u32::MAX, 0u32); 1usize << n];
    let mut depth = vec![0u16; 1usize << n];
    parent[full as usize] = (full, 0);
    let mut queue = VecDeque::from([full]);
    while let Some(mask) = queue.pop_front() {
        if depth[mask as usize] as usize >= max_len {
            continue;
        }
        for d in 0..m.k {
            let mut next = 0u32;
            let mut bits = mask;
            while bits != 0 {
                let q = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                next |= 1 << m.step(q, d);
            }
            if parent[next as usize].0 != u32::MAX {
                continue;
            }
            parent[next as usize] = (mask, d);
            depth[next as usize] = depth[mask as usize] + 1;
            if next.count_ones() == 1 {
                let mut word = Vec::with_capacity(depth[next as usize] as usize);
                let mut cur = next;
                while cur != full {
                    let (p, digit) = parent[cur as usize];
                    word.push(digit);
                    cur = p;
                }
                word.reverse();
                return Ok(Some(word));
            }
            queue.push_back(next);
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyncReport {
    pub n1: u32,
    pub k: u32,
    /// `K = {m < k^{n1} : padded [m]_k is synchronizing}`, ascending.
    pub residues: Vec<u64>,
    pub fraction: Exact,
}

impl SyncReport {
    pub fn modulus(&self) -> u64 {
        (self.k as u64).pow(self.n1)
    }

    pub fn fraction_f64(&self) -> f64 {
        to_f64(&self.fraction)
    }
}

fn residue_modulus(m: &Automaton, n1: u32) -> Result<u64> {
    let q = (m.k as u64)
        .checked_pow(n1)
        .filter(|&q| q <= RESIDUE_BUDGET)
        .ok_or_else(|| Error::Budget(format!("k^n1 exceeds {RESIDUE_BUDGET}")))?;
    Ok(q)
}

pub fn synchronizing_residues(m: &Automaton, n1: u32) -> Result<SyncReport> {
    let q = residue_modulus(m, n1)?;
    let residues: Vec<u64> = (0..q)
        .into_par_iter()
        .filter(|&r| {
            let img = image_all(m, &padded_digits(r, m.k, n1));
            img.iter().all(|&s| s == img[0])
        })
        .collect();
    let fraction = ratio(residues.len() as u64, q);
    Ok(SyncReport {
        n1,
        k: m.k,
        residues,
        fraction,
    })
}

#[derive(Debug, Clone)]
pub struct WrapApproximant {
    /// Period `k^{n1}`; `distance` holds the bound and `cutoff` the period.
    pub approximant: PeriodicApproximant,
    pub sequence: Sequence,
    /// `(k^{n1} - |K|) / k^{n1}`.
    pub bound: Exact,
    pub report: SyncReport,
}

/// `a'(n) = τ(δ(q_0, padded [n mod k^{n1}]_k))` on synchronizing residues,
/// the first output symbol elsewhere.
pub fn wrap_approximant(m: &Automaton, n1: u32) -> Result<WrapApproximant> {
    let report = synchronizing_residues(m, n1)?;
    let q = report.modulus();
    let mut by_residue = vec![0 as Symbol; q as usize];
    for &r in &report.residues {
        let state = m.run_from(0, &padded_digits(r, m.k, n1));
        by_residue[r as usize] = m.output(state);
    }
    // word[i] is the value at n ≡ i + 1
    let word: Vec<Symbol> = (0..q).map(|i| by_residue[((i + 1) % q) as usize]).collect();
    let bound = ratio(q - report.residues.len() as u64, q);
    let sequence = periodic_seq(m.output_alphabet.clone(), word.clone())?;
    Ok(WrapApproximant {
        approximant: PeriodicApproximant {
            period: q,
            word,
            distance: to_f64(&bound),
            cutoff: q,
        },
        sequence,
        bound,
        report,
    })
}

/// Digit 0 resets every state to `q_0`; digit 1 advances `q -> q + 1 mod n`.
/// Output is the parity of the state index.
pub fn reset_automaton(states: usize) -> Automaton {
    let delta = (0..states).map(|q| vec![0, (q + 1) % states]).collect();
    let outputs = (0..states).map(|q| (q % 2) as Symbol).collect();
    Automaton::binary(2, delta, outputs).expect("valid reset automaton")
}

/// Two states; digit 1 swaps them, digit 0 fixes them. Output is the state,
/// giving the Thue–Morse sequence.
pub fn toggle_automaton() -> Automaton {
    Automaton::binary(2, vec![vec![0, 1], vec![1, 0]], vec![0, 1]).expect("valid toggle automaton")
}

/// Černý automaton `C_n`: digit 0 rotates, digit 1 merges `n-1` into `0`.
pub fn cerny_automaton(states: usize) -> Automaton {
    let delta = (0..states)
        .map(|q| vec![(q + 1) % states, if q == states - 1 { 0 } else { q }])
        .collect();
    Automaton::binary(2, delta, vec![0; states]).expect("valid Cerny automaton")
}
