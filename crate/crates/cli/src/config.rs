//! JSON descriptors for sequences, sets, schemes, systems and grids.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use ratdyn_core::automata::{cerny_automaton, reset_automaton, toggle_automaton};
use ratdyn_core::bfree::BRule;
use ratdyn_core::generators::{
    abundance_class_seq, alternating_blocks_seq, bfree_seq, block_cutoffs, erased_ones_seq, paperfolding_seq,
    periodic_seq, squarefree_seq, toeplitz_seq, totient_ratio_seq, AbundanceClass, BlockSpec, BlockVariant,
    ErasureMode, FoldingInstructions, GapRule, ToeplitzRule,
};
use ratdyn_core::{
    automatic_seq, Alphabet, Automaton, BSet, CircleSystem, CyclicSystem, Grid, RotationSystem, Sequence,
    SubseqScheme, Symbol, TrigPolynomial, Weighting,
};

use crate::CliError;

/// Values shared by every descriptor of one run.
#[derive(Debug, Clone, Copy, Default)]
pub struct Context {
    pub seed: u64,
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn default_alternating() -> BlockVariant {
    BlockVariant::Alternating
}

fn default_replace() -> ErasureMode {
    ErasureMode::Replace
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceDesc {
    /// `word` uses one character per symbol; the alphabet defaults to `0`/`1`.
    Periodic {
        word: String,
        #[serde(default)]
        alphabet: Option<Vec<String>>,
    },
    Squarefree,
    Bfree {
        set: BSetDesc,
    },
    Abundance {
        class: AbundanceClass,
    },
    TotientRatio {
        num: u64,
        den: u64,
    },
    Paperfolding {
        instructions: FoldingInstructions,
        #[serde(default)]
        complemented: bool,
    },
    Toeplitz {
        alphabet: Vec<String>,
        rules: Vec<ToeplitzRule>,
        #[serde(default)]
        default: Symbol,
    },
    AlternatingBlocks {
        blocks: BlockSpec,
        #[serde(default = "default_alternating")]
        variant: BlockVariant,
    },
    ErasedOnes {
        gaps: GapRule,
        #[serde(default = "default_replace")]
        mode: ErasureMode,
    },
    /// Seeded fair coin; falls back to the run seed.
    CoinFlips {
        #[serde(default)]
        seed: Option<u64>,
    },
    Constant {
        bit: bool,
    },
    Automatic {
        automaton: AutomatonDesc,
    },
    /// `n ↦ base(n + by)`.
    Shifted {
        base: Box<SequenceDesc>,
        by: i64,
    },
}

impl SequenceDesc {
    pub fn kind(&self) -> &'static str {
        match self {
            SequenceDesc::Periodic { .. } => "periodic",
            SequenceDesc::Squarefree => "squarefree",
            SequenceDesc::Bfree { .. } => "bfree",
            SequenceDesc::Abundance { .. } => "abundance",
            SequenceDesc::TotientRatio { .. } => "totient_ratio",
            SequenceDesc::Paperfolding { .. } => "paperfolding",
            SequenceDesc::Toeplitz { .. } => "toeplitz",
            SequenceDesc::AlternatingBlocks { .. } => "alternating_blocks",
            SequenceDesc::ErasedOnes { .. } => "erased_ones",
            SequenceDesc::CoinFlips { .. } => "coin_flips",
            SequenceDesc::Constant { .. } => "constant",
            SequenceDesc::Automatic { .. } => "automatic",
            SequenceDesc::Shifted { .. } => "shifted",
        }
    }

    pub fn build(&self, ctx: &Context) -> Result<Sequence, CliError> {
        Ok(match self {
            SequenceDesc::Periodic { word, alphabet } => {
                let alphabet = match alphabet {
                    Some(a) => Alphabet::new(a.clone())?,
                    None => Alphabet::binary(),
                };
                let w = alphabet.parse_word(word)?;
                periodic_seq(alphabet, w)?
            }
            SequenceDesc::Squarefree => squarefree_seq(),
            SequenceDesc::Bfree { set } => bfree_seq(&set.build()?),
            SequenceDesc::Abundance { class } => abundance_class_seq(*class),
            SequenceDesc::TotientRatio { num, den } => totient_ratio_seq(*num, *den)?,
            SequenceDesc::Paperfolding {
                instructions,
                complemented,
            } => paperfolding_seq(instructions.clone(), *complemented)?,
            SequenceDesc::Toeplitz {
                alphabet,
                rules,
                default,
            } => toeplitz_seq(Alphabet::new(alphabet.clone())?, rules.clone(), *default)?,
            SequenceDesc::AlternatingBlocks { blocks, variant } => alternating_blocks_seq(blocks.clone(), *variant)?,
            SequenceDesc::ErasedOnes { gaps, mode } => erased_ones_seq(gaps.clone(), *mode)?,
            SequenceDesc::CoinFlips { seed } => Sequence::coin_flips(seed.unwrap_or(ctx.seed)),
            SequenceDesc::Constant { bit } => Sequence::constant_binary(*bit),
            SequenceDesc::Automatic { automaton } => automatic_seq(&automaton.build()?),
            SequenceDesc::Shifted { base, by } => base.build(ctx)?.shifted(*by),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BSetDesc {
    Explicit { elements: Vec<u64> },
    PrimeSquares,
    Primes,
    Squares,
    /// One integer per line, `#` comments.
    File { path: PathBuf },
}

impl BSetDesc {
    pub fn build(&self) -> Result<BSet, CliError> {
        Ok(match self {
            BSetDesc::Explicit { elements } => BSet::explicit(elements.clone())?,
            BSetDesc::PrimeSquares => BSet::rule(BRule::PrimeSquares),
            BSetDesc::Primes => BSet::rule(BRule::Primes),
            BSetDesc::Squares => BSet::rule(BRule::Squares),
            BSetDesc::File { path } => BSet::parse_list(&read(path)?)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutomatonDesc {
    Path { path: PathBuf },
    Preset { preset: Preset, #[serde(default)] states: Option<usize> },
    Inline(serde_json::Value),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Reset,
    Toggle,
    Cerny,
}

impl AutomatonDesc {
    pub fn build(&self) -> Result<Automaton, CliError> {
        match self {
            AutomatonDesc::Path { path } => Ok(Automaton::from_json(&read(path)?)?),
            AutomatonDesc::Inline(v) => Ok(Automaton::from_json(&v.to_string())?),
            AutomatonDesc::Preset { preset, states } => {
                let s = states.unwrap_or(4);
                if s == 0 {
                    return Err(CliError::Config("preset automata need states >= 1".into()));
                }
                Ok(match preset {
                    Preset::Reset => reset_automaton(s),
                    Preset::Toggle => toggle_automaton(),
                    Preset::Cerny => cerny_automaton(s),
                })
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeDesc {
    Single { n: u64 },
    Identity,
    Geometric { start: u64, ratio: u64, count: usize },
    Explicit { cutoffs: Vec<u64> },
    /// Block boundaries of an alternating-block sequence.
    Blocks {
        blocks: BlockSpec,
        #[serde(default = "default_alternating")]
        variant: BlockVariant,
        count: u64,
    },
}

impl SchemeDesc {
    /// The scheme and the index `k` to evaluate at (its last cutoff by default).
    pub fn build(&self, k: Option<usize>) -> Result<(SubseqScheme, usize), CliError> {
        let scheme = match self {
            SchemeDesc::Single { n } => SubseqScheme::single(*n),
            SchemeDesc::Identity => SubseqScheme::identity(),
            SchemeDesc::Geometric { start, ratio, count } => SubseqScheme::geometric(*start, *ratio, *count)?,
            SchemeDesc::Explicit { cutoffs } => SubseqScheme::explicit(cutoffs.clone(), "explicit")?,
            SchemeDesc::Blocks { blocks, variant, count } => {
                SubseqScheme::explicit(block_cutoffs(blocks, *variant, *count)?, "blocks")?
            }
        };
        let k = match (k, scheme.len()) {
            (Some(k), _) => k,
            (None, Some(len)) => len,
            (None, None) => return Err(CliError::Config("the identity scheme needs an explicit k".into())),
        };
        Ok((scheme, k))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightingDesc {
    /// One value per symbol.
    Symbols(Vec<f64>),
    /// Values on words of length `width`; keys use one character per symbol.
    Window {
        width: usize,
        table: BTreeMap<String, f64>,
        #[serde(default)]
        default: f64,
    },
}

pub fn weighting(desc: &Option<WeightingDesc>, alphabet: &Alphabet) -> Result<Weighting, CliError> {
    Ok(match desc {
        None => Weighting::identity(alphabet),
        Some(WeightingDesc::Symbols(v)) => Weighting::Symbols(v.clone()),
        Some(WeightingDesc::Window { width, table, default }) => {
            let mut t = std::collections::HashMap::new();
            for (word, v) in table {
                let w = alphabet.parse_word(word)?;
                if w.len() != *width {
                    return Err(CliError::Config(format!("window key {word:?} is not of length {width}")));
                }
                t.insert(w, *v);
            }
            Weighting::Window {
                width: *width,
                table: t,
                default: *default,
            }
        }
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemDesc {
    /// `ℤ/m` with `A` a set of residues.
    Cyclic { modulus: u64, set: Vec<u64> },
    Product { moduli: Vec<u64>, points: Vec<Vec<u64>> },
    Full { moduli: Vec<u64> },
    /// `α = num/den`, arcs `[a/den, b/den)`.
    CircleRational { num: u64, den: u64, arcs: Vec<(u64, u64)> },
    CircleSqrt2MinusOne { arcs: Vec<(f64, f64)> },
    CircleReal { alpha: f64, arcs: Vec<(f64, f64)> },
}

impl SystemDesc {
    pub fn build(&self) -> Result<RotationSystem, CliError> {
        Ok(match self {
            SystemDesc::Cyclic { modulus, set } => RotationSystem::cyclic(*modulus, set)?,
            SystemDesc::Product { moduli, points } => CyclicSystem::product(moduli.clone(), points)?.into(),
            SystemDesc::Full { moduli } => CyclicSystem::full(moduli.clone())?.into(),
            _ => RotationSystem::Circle(self.circle()?),
        })
    }

    pub fn circle(&self) -> Result<CircleSystem, CliError> {
        Ok(match self {
            SystemDesc::CircleRational { num, den, arcs } => CircleSystem::rational(*num, *den, arcs)?,
            SystemDesc::CircleSqrt2MinusOne { arcs } => CircleSystem::sqrt2_minus_one(arcs)?,
            SystemDesc::CircleReal { alpha, arcs } => CircleSystem::real(*alpha, arcs)?,
            _ => return Err(CliError::Config("expected a circle rotation".into())),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridDesc {
    /// Text dump: header `grid <dim> <side>` then one 0/1 character per cell.
    Path { path: PathBuf },
    Points { dim: usize, side: u64, points: Vec<Vec<u64>> },
    Line { side: u64, elements: Vec<u64> },
}

impl GridDesc {
    pub fn build(&self) -> Result<Grid, CliError> {
        Ok(match self {
            GridDesc::Path { path } => Grid::from_text(&read(path)?)?,
            GridDesc::Points { dim, side, points } => Grid::from_points(*dim, *side, points)?,
            GridDesc::Line { side, elements } => Grid::line(*side, elements)?,
        })
    }
}

/// `f(x) = Σ c e(h x)` as `[h, re, im]` triples.
pub fn trig(terms: &[(i64, f64, f64)]) -> TrigPolynomial {
    TrigPolynomial { terms: terms.to_vec() }
}
