//! One enum of operations per experiment family, each variant mapped onto
//! core calls and flattened into a [`Table`].

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use ratdyn_core::automata::{self, digits};
use ratdyn_core::bfree::{split_by_coprimality, taut_reduction, DEFAULT_IE_CAP};
use ratdyn_core::dynamics::{intersection_measure, BatteryEntry};
use ratdyn_core::generators::{block_cutoffs, toeplitz_filled_density, BlockSpec, BlockVariant, ToeplitzRule};
use ratdyn_core::metrics::rap_profile_at;
use ratdyn_core::mobius::{progression_mobius_sums, short_interval_double_average};
use ratdyn_core::spectrum::default_floor;
use ratdyn_core::*;
use std::result::Result;

use crate::cells;
use crate::config::{
    trig, weighting, AutomatonDesc, BSetDesc, Context, GridDesc, SchemeDesc, SequenceDesc, SystemDesc,
    WeightingDesc,
};
use crate::output::Table;
use crate::CliError;

type Out = Result<Table, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Generate,
    Distance,
    Approx,
    Density,
    Bfree,
    Automaton,
    Recurrence,
    Psz,
    Mobius,
    Spectrum,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Generate,
        Family::Distance,
        Family::Approx,
        Family::Density,
        Family::Bfree,
        Family::Automaton,
        Family::Recurrence,
        Family::Psz,
        Family::Mobius,
        Family::Spectrum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Generate => "generate",
            Family::Distance => "distance",
            Family::Approx => "approx",
            Family::Density => "density",
            Family::Bfree => "bfree",
            Family::Automaton => "automaton",
            Family::Recurrence => "recurrence",
            Family::Psz => "psz",
            Family::Mobius => "mobius",
            Family::Spectrum => "spectrum",
        }
    }
}

/// `(family, op, core operations reached)`.
pub const DISPATCH: &[(&str, &str, &[&str])] = &[
    ("generate", "window", &["evaluate_window"]),
    ("generate", "toeplitz_density", &["toeplitz_filled_density"]),
    ("generate", "block_cutoffs", &["block_cutoffs"]),
    ("density", "empirical_density", &["empirical_density"]),
    ("density", "cylinder_frequency", &["cylinder_frequency"]),
    ("density", "word_statistics", &["word_statistics"]),
    ("distance", "besicovitch", &["db_estimate"]),
    ("distance", "weyl", &["dw_estimate"]),
    ("approx", "best_periodic", &["best_periodic_approx"]),
    ("approx", "rap_profile", &["rap_profile"]),
    ("bfree", "multiples_density", &["multiples_density_exact"]),
    ("bfree", "primitive_reduction", &["primitive_reduction"]),
    ("bfree", "truncation_curve", &["truncation_density_curve"]),
    ("bfree", "log_density", &["log_density_estimate"]),
    ("bfree", "taut", &["is_taut_finite"]),
    ("bfree", "taut_reduction", &["is_taut_finite"]),
    ("bfree", "coprime_quotient", &["coprime_quotient_set"]),
    ("bfree", "split_by_coprimality", &["split_by_coprimality"]),
    ("bfree", "progression_density", &["shifted_progression_density"]),
    ("bfree", "shift_divisibility", &["shift_divisibility_table"]),
    ("bfree", "inner_regularity", &["inner_regularity_check"]),
    ("automaton", "generate", &["automatic_seq"]),
    ("automaton", "run", &["run"]),
    ("automaton", "synchronizing_word", &["find_synchronizing_word"]),
    ("automaton", "is_synchronizing", &["is_synchronizing_word"]),
    ("automaton", "residues", &["synchronizing_residues"]),
    ("automaton", "wrap_approximant", &["wrap_approximant", "dw_estimate"]),
    ("recurrence", "measure", &["intersection_measure"]),
    ("recurrence", "average", &["weighted_poly_multirec_average"]),
    ("recurrence", "divisibility", &["divisibility_table"]),
    ("recurrence", "battery", &["recurrence_battery", "weighted_poly_multirec_average"]),
    ("recurrence", "orbit_average", &["weighted_orbit_average"]),
    ("recurrence", "combinatorial_density", &["combinatorial_intersection_density"]),
    ("recurrence", "intersectivity", &["finite_intersectivity_search"]),
    ("recurrence", "uniform_scan", &["uniform_recurrence_scan"]),
    ("psz", "search", &["finite_psz_search"]),
    ("psz", "census", &["basic_arrangement_census"]),
    ("mobius", "mertens", &["mobius_sieve"]),
    ("mobius", "average", &["weighted_mobius_average"]),
    ("mobius", "progression_sums", &["mobius_sieve", "progression_mobius_sums"]),
    ("mobius", "dirichlet", &["mobius_sieve", "dirichlet_baseline"]),
    ("mobius", "short_interval", &["short_interval_double_average"]),
    ("mobius", "exceptional_density", &["short_interval_exceptional_density"]),
    ("mobius", "dyadic", &["dyadic_check"]),
    ("spectrum", "coefficient", &["fourier_bohr"]),
    ("spectrum", "scan", &["rational_spectrum_scan"]),
    ("spectrum", "mass_ratio", &["spectral_mass_ratio"]),
    ("spectrum", "genericity", &["genericity_diagnostic"]),
];

/// Sequence descriptor kinds and the generator each one reaches.
pub const SEQUENCE_KINDS: &[(&str, &str)] = &[
    ("periodic", "periodic_seq"),
    ("squarefree", "squarefree_seq"),
    ("bfree", "bfree_seq"),
    ("abundance", "abundance_class_seq"),
    ("totient_ratio", "totient_ratio_seq"),
    ("paperfolding", "paperfolding_seq"),
    ("toeplitz", "toeplitz_seq"),
    ("alternating_blocks", "alternating_blocks_seq"),
    ("erased_ones", "erased_ones_seq"),
    ("coin_flips", "coin_flips"),
    ("constant", "constant_binary"),
    ("automatic", "automatic_seq"),
    ("shifted", "shifted"),
];

fn parse<T: DeserializeOwned>(family: Family, body: Value) -> Result<T, CliError> {
    serde_json::from_value(body).map_err(|e| CliError::Config(format!("{} config: {e}", family.name())))
}

/// Parses the config body for `family` and runs it; returns the op name.
pub fn dispatch(family: Family, body: Value, ctx: &Context) -> Result<(String, Table), CliError> {
    let op = body
        .get("op")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Config("config needs a string \"op\"".into()))?
        .to_string();
    let table = match family {
        Family::Generate => parse::<GenerateOp>(family, body)?.run(ctx),
        Family::Density => parse::<DensityOp>(family, body)?.run(ctx),
        Family::Distance => parse::<DistanceOp>(family, body)?.run(ctx),
        Family::Approx => parse::<ApproxOp>(family, body)?.run(ctx),
        Family::Bfree => parse::<BfreeOp>(family, body)?.run(ctx),
        Family::Automaton => parse::<AutomatonOp>(family, body)?.run(ctx),
        Family::Recurrence => parse::<RecurrenceOp>(family, body)?.run(ctx),
        Family::Psz => parse::<PszOp>(family, body)?.run(),
        Family::Mobius => parse::<MobiusOp>(family, body)?.run(ctx),
        Family::Spectrum => parse::<SpectrumOp>(family, body)?.run(ctx),
    }?;
    Ok((op, table))
}

fn one() -> u64 {
    1
}

fn yes() -> bool {
    true
}

fn ie_cap() -> usize {
    DEFAULT_IE_CAP
}

fn alternating() -> BlockVariant {
    BlockVariant::Alternating
}

fn seq_cells(x: &Sequence, start: u64, syms: &[Symbol], t: &mut Table) {
    for (i, &s) in syms.iter().enumerate() {
        t.push(cells![start + i as u64, x.alphabet().token(s)]);
    }
}

fn join<T: ToString>(v: &[T], sep: &str) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn series(avg: &AverageSeries) -> Table {
    let mut t = Table::new(&["cutoff", "value", "exact"]);
    for (i, (&n, &v)) in avg.cutoffs.iter().zip(&avg.values).enumerate() {
        t.push(cells![n, v, avg.exact.as_ref().map(|e| &e[i])]);
    }
    t.note("label", &avg.label);
    t
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum GenerateOp {
    Window {
        sequence: SequenceDesc,
        #[serde(default = "one")]
        start: u64,
        len: u64,
    },
    ToeplitzDensity {
        rules: Vec<ToeplitzRule>,
    },
    BlockCutoffs {
        blocks: BlockSpec,
        #[serde(default = "alternating")]
        variant: BlockVariant,
        count: u64,
    },
}

impl GenerateOp {
    fn run(self, ctx: &Context) -> Out {
        match self {
            GenerateOp::Window { sequence, start, len } => {
                let x = sequence.build(ctx)?;
                let w = evaluate_window(&x, start, len)?;
                let mut t = Table::new(&["n", "symbol"]);
                seq_cells(&x, w.start.unwrap_or(start), &w.symbols, &mut t);
                t.note("kind", x.kind());
                Ok(t)
            }
            GenerateOp::ToeplitzDensity { rules } => {
                let mut t = Table::new(&["step", "filled_exact", "filled"]);
                for (i, d) in toeplitz_filled_density(&rules)?.iter().enumerate() {
                    t.push(cells![i + 1, d, num::ToPrimitive::to_f64(d).unwrap_or(f64::NAN)]);
                }
                Ok(t)
            }
            GenerateOp::BlockCutoffs { blocks, variant, count } => {
                let mut t = Table::new(&["k", "cutoff"]);
                for (i, c) in block_cutoffs(&blocks, variant, count)?.into_iter().enumerate() {
                    t.push(cells![i + 1, c]);
                }
                Ok(t)
            }
        }
    }
}

fn f64_of(e: &Exact) -> f64 {
    num::ToPrimitive::to_f64(e).unwrap_or(f64::NAN)
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum DensityOp {
    EmpiricalDensity {
        sequence: SequenceDesc,
        scheme: SchemeDesc,
        #[serde(default)]
        k: Option<usize>,
    },
    /// `symbols` uses one character per symbol, aligned with `offsets`.
    CylinderFrequency {
        sequence: SequenceDesc,
        offsets: Vec<i64>,
        symbols: String,
        scheme: SchemeDesc,
        #[serde(default)]
        k: Option<usize>,
    },
    WordStatistics {
        sequence: SequenceDesc,
        len: usize,
        scheme: SchemeDesc,
        #[serde(default)]
        k: Option<usize>,
    },
}

impl DensityOp {
    fn run(self, ctx: &Context) -> Out {
        match self {
            DensityOp::EmpiricalDensity { sequence, scheme, k } => {
                let x = sequence.build(ctx)?;
                let (s, k) = scheme.build(k)?;
                let d = empirical_density(&x, &s, k)?;
                let mut t = Table::new(&["cutoff", "value", "empirical", "exact", "tail_min", "tail_max"]);
                t.push(cells![d.cutoff, d.value, d.empirical, d.exact.as_ref(), d.tail_window.0, d.tail_window.1]);
                Ok(t)
            }
            DensityOp::CylinderFrequency {
                sequence,
                offsets,
                symbols,
                scheme,
                k,
            } => {
                let x = sequence.build(ctx)?;
                let (s, k) = scheme.build(k)?;
                let cyl = CylinderSpec::new(offsets, x.alphabet().parse_word(&symbols)?)?;
                let f = cylinder_frequency(&x, &cyl, &s, k)?;
                let mut t = Table::new(&["cutoff", "frequency"]);
                t.push(cells![s.cutoff(k)?, f]);
                Ok(t)
            }
            DensityOp::WordStatistics { sequence, len, scheme, k } => {
                let x = sequence.build(ctx)?;
                let (s, k) = scheme.build(k)?;
                let mut t = Table::new(&["word", "frequency"]);
                for (w, f) in word_statistics(&x, len, &s, k)? {
                    t.push(cells![w.render(x.alphabet()), f]);
                }
                t.note("cutoff", s.cutoff(k)?);
                Ok(t)
            }
        }
    }
}

fn metric_row(t: &mut Table, m: &MetricEstimate) {
    t.push(cells![m.cutoff, m.window_cap, m.value, m.empirical, m.exact.as_ref(), m.tail_max]);
}

const METRIC_COLUMNS: [&str; 6] = ["cutoff", "window_cap", "value", "empirical", "exact", "tail_max"];

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum DistanceOp {
    Besicovitch {
        x: SequenceDesc,
        y: SequenceDesc,
        scheme: SchemeDesc,
        #[serde(default)]
        k: Option<usize>,
    },
    /// Windows of length up to `n` starting at most at `l`.
    Weyl {
        x: SequenceDesc,
        y: SequenceDesc,
        n: u64,
        l: u64,
    },
}

impl DistanceOp {
    fn run(self, ctx: &Context) -> Out {
        let mut t = Table::new(&METRIC_COLUMNS);
        match self {
            DistanceOp::Besicovitch { x, y, scheme, k } => {
                let (s, k) = scheme.build(k)?;
                metric_row(&mut t, &db_estimate(&x.build(ctx)?, &y.build(ctx)?, &s, k)?);
            }
            DistanceOp::Weyl { x, y, n, l } => {
                metric_row(&mut t, &dw_estimate(&x.build(ctx)?, &y.build(ctx)?, n, l)?);
            }
        }
        Ok(t)
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum ApproxOp {
    BestPeriodic {
        sequence: SequenceDesc,
        q: u64,
        scheme: SchemeDesc,
        #[serde(default)]
        k: Option<usize>,
    },
    /// All periods up to `q_max`, or only the listed `periods`.
    RapProfile {
        sequence: SequenceDesc,
        #[serde(default)]
        q_max: Option<u64>,
        #[serde(default)]
        periods: Option<Vec<u64>>,
        scheme: SchemeDesc,
        #[serde(default)]
        k: Option<usize>,
    },
}

impl ApproxOp {
    fn run(self, ctx: &Context) -> Out {
        match self {
            ApproxOp::BestPeriodic { sequence, q, scheme, k } => {
                let x = sequence.build(ctx)?;
                let (s, k) = scheme.build(k)?;
                let a = best_periodic_approx(&x, q, &s, k)?;
                let mut t = Table::new(&["period", "word", "distance", "cutoff"]);
                t.push(cells![a.period, x.alphabet().render(&a.word), a.distance, a.cutoff]);
                Ok(t)
            }
            ApproxOp::RapProfile {
                sequence,
                q_max,
                periods,
                scheme,
                k,
            } => {
                let x = sequence.build(ctx)?;
                let (s, k) = scheme.build(k)?;
                let rows = match (q_max, periods) {
                    (Some(q), None) => rap_profile(&x, q, &s, k)?,
                    (None, Some(p)) => rap_profile_at(&x, &p, &s, k)?,
                    _ => return Err(CliError::Config("rap_profile needs exactly one of q_max, periods".into())),
                };
                let mut t = Table::new(&["q", "distance"]);
                for (q, d) in rows {
                    t.push(cells![q, d]);
                }
                t.note("cutoff", s.cutoff(k)?);
                Ok(t)
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum BfreeOp {
    MultiplesDensity {
        set: BSetDesc,
        #[serde(default = "ie_cap")]
        cap: usize,
    },
    /// Rule-based sets are listed up to their first `count` elements.
    PrimitiveReduction {
        set: BSetDesc,
        #[serde(default)]
        count: Option<usize>,
    },
    TruncationCurve {
        set: BSetDesc,
        m_max: usize,
    },
    LogDensity {
        sequence: SequenceDesc,
        n: u64,
    },
    Taut {
        set: BSetDesc,
        #[serde(default = "ie_cap")]
        cap: usize,
    },
    TautReduction {
        set: BSetDesc,
        #[serde(default = "ie_cap")]
        cap: usize,
    },
    CoprimeQuotient {
        set: BSetDesc,
        a: u64,
    },
    SplitByCoprimality {
        elements: Vec<u64>,
        u: u64,
    },
    /// Every residue `0..u` unless `r` is given.
    ProgressionDensity {
        set: BSetDesc,
        #[serde(default)]
        r: Option<u64>,
        u: u64,
        n: u64,
        #[serde(default = "ie_cap")]
        cap: usize,
    },
    ShiftDivisibility {
        set: BSetDesc,
        r: u64,
        u_max: u64,
        #[serde(default = "ie_cap")]
        cap: usize,
    },
    InnerRegularity {
        sequence: SequenceDesc,
        m: u64,
        eps: f64,
        n: u64,
    },
}

fn element_table(els: &[u64]) -> Table {
    let mut t = Table::new(&["index", "element"]);
    for (i, &b) in els.iter().enumerate() {
        t.push(cells![i + 1, b]);
    }
    t
}

impl BfreeOp {
    fn run(self, ctx: &Context) -> Out {
        match self {
            BfreeOp::MultiplesDensity { set, cap } => {
                let d = multiples_density_exact(&set.build()?, cap)?;
                let mut t = Table::new(&["exact", "value", "term_count", "lcm_classes", "period"]);
                t.push(cells![
                    &d.value,
                    f64_of(&d.value),
                    d.term_count.to_string(),
                    d.lcm_classes,
                    d.period.to_string()
                ]);
                Ok(t)
            }
            BfreeOp::PrimitiveReduction { set, count } => {
                let reduced = primitive_reduction(&set.build()?)?;
                let els = match (reduced.elements(), count) {
                    (Some(e), None) => e.to_vec(),
                    (_, Some(c)) => reduced.first(c)?,
                    (None, None) => return Err(CliError::Config("rule-based sets need a count".into())),
                };
                let mut t = element_table(&els);
                t.note("set", &reduced);
                Ok(t)
            }
            BfreeOp::TruncationCurve { set, m_max } => {
                let set = set.build()?;
                let curve = truncation_density_curve(&set, m_max)?;
                let els = set.first(m_max)?;
                let mut t = Table::new(&["m", "b_m", "exact", "value"]);
                for (i, d) in curve.iter().enumerate() {
                    t.push(cells![i + 1, els[i], d, f64_of(d)]);
                }
                Ok(t)
            }
            BfreeOp::LogDensity { sequence, n } => {
                let mut t = Table::new(&["n", "value"]);
                t.push(cells![n, log_density_estimate(&sequence.build(ctx)?, n)?]);
                Ok(t)
            }
            BfreeOp::Taut { set, cap } => {
                let v = is_taut_finite(&set.build()?, cap)?;
                let mut t = Table::new(&["taut", "witness"]);
                t.push(cells![v.taut, v.witness]);
                Ok(t)
            }
            BfreeOp::TautReduction { set, cap } => {
                let reduced = taut_reduction(&set.build()?, cap)?;
                Ok(element_table(reduced.elements().unwrap_or_default()))
            }
            BfreeOp::CoprimeQuotient { set, a } => {
                let c = coprime_quotient_set(&set.build()?, a)?;
                let mut t = Table::new(&["a", "elements", "a_in_multiples"]);
                t.push(cells![a, join(&c.elements, " "), c.a_in_multiples]);
                Ok(t)
            }
            BfreeOp::SplitByCoprimality { elements, u } => {
                let (shared, coprime) = split_by_coprimality(&elements, u);
                let mut t = Table::new(&["element", "coprime_to_u"]);
                for b in shared {
                    t.push(cells![b, false]);
                }
                for b in coprime {
                    t.push(cells![b, true]);
                }
                t.note("u", u);
                Ok(t)
            }
            BfreeOp::ProgressionDensity { set, r, u, n, cap } => {
                let set = set.build()?;
                let mut t = Table::new(&["r", "u", "exact", "value", "cutoff", "empirical"]);
                let residues: Vec<u64> = match r {
                    Some(r) => vec![r],
                    None => (0..u).collect(),
                };
                for r in residues {
                    let p = shifted_progression_density(&set, r, u, n, cap)?;
                    t.push(cells![r, u, &p.exact, f64_of(&p.exact), p.cutoff, p.empirical]);
                }
                Ok(t)
            }
            BfreeOp::ShiftDivisibility { set, r, u_max, cap } => {
                let d = shift_divisibility_table(&set.build()?, r, u_max, cap)?;
                let mut t = Table::new(&["u", "exact", "value"]);
                for (u, e) in &d.rows {
                    t.push(cells![*u, e, f64_of(e)]);
                }
                t.note("r", r);
                t.note("divisible", d.divisible);
                Ok(t)
            }
            BfreeOp::InnerRegularity { sequence, m, eps, n } => {
                let rows = inner_regularity_check(&sequence.build(ctx)?, m, eps, n)?;
                let mut t = Table::new(&["residue", "count", "density", "empty", "flagged"]);
                for r in rows {
                    t.push(cells![r.residue, r.count, r.density, r.empty, r.flagged]);
                }
                Ok(t)
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum AutomatonOp {
    Generate {
        automaton: AutomatonDesc,
        #[serde(default = "one")]
        start: u64,
        len: u64,
    },
    /// Reads `word` (most significant digit first), or the digits of `n`.
    Run {
        automaton: AutomatonDesc,
        #[serde(default)]
        word: Option<Vec<u32>>,
        #[serde(default)]
        n: Option<u64>,
    },
    SynchronizingWord {
        automaton: AutomatonDesc,
        max_len: usize,
    },
    IsSynchronizing {
        automaton: AutomatonDesc,
        word: Vec<u32>,
    },
    Residues {
        automaton: AutomatonDesc,
        n1: u32,
        #[serde(default)]
        list: bool,
    },
    /// With `n`, also measures `d_W` against the sequence on windows up to
    /// `n` starting below `l`.
    WrapApproximant {
        automaton: AutomatonDesc,
        n1: u32,
        #[serde(default)]
        n: Option<u64>,
        #[serde(default)]
        l: Option<u64>,
    },
}

impl AutomatonOp {
    fn run(self, _ctx: &Context) -> Out {
        match self {
            AutomatonOp::Generate { automaton, start, len } => {
                let x = automatic_seq(&automaton.build()?);
                let mut t = Table::new(&["n", "symbol"]);
                seq_cells(&x, start, &x.range(start, len), &mut t);
                Ok(t)
            }
            AutomatonOp::Run { automaton, word, n } => {
                let m = automaton.build()?;
                let w = match (word, n) {
                    (Some(w), None) => w,
                    (None, Some(n)) => digits(n, m.k()),
                    _ => return Err(CliError::Config("run needs exactly one of word, n".into())),
                };
                let q = automata::run(&m, &w)?;
                let mut t = Table::new(&["word", "state", "state_name", "output"]);
                t.push(cells![
                    join(&w, ""),
                    q,
                    m.state_names()[q].as_str(),
                    m.output_alphabet().token(m.output(q))
                ]);
                Ok(t)
            }
            AutomatonOp::SynchronizingWord { automaton, max_len } => {
                let found = find_synchronizing_word(&automaton.build()?, max_len)?;
                let mut t = Table::new(&["found", "length", "word"]);
                t.push(cells![found.is_some(), found.as_ref().map(Vec::len), found.map(|w| join(&w, ""))]);
                Ok(t)
            }
            AutomatonOp::IsSynchronizing { automaton, word } => {
                let ok = is_synchronizing_word(&automaton.build()?, &word)?;
                let mut t = Table::new(&["word", "synchronizing"]);
                t.push(cells![join(&word, ""), ok]);
                Ok(t)
            }
            AutomatonOp::Residues { automaton, n1, list } => {
                let r = synchronizing_residues(&automaton.build()?, n1)?;
                if list {
                    let mut t = Table::new(&["residue"]);
                    for &x in &r.residues {
                        t.push(cells![x]);
                    }
                    t.note("fraction", &r.fraction);
                    return Ok(t);
                }
                let mut t = Table::new(&["n1", "modulus", "count", "fraction_exact", "fraction"]);
                t.push(cells![n1, r.modulus(), r.residues.len(), &r.fraction, r.fraction_f64()]);
                Ok(t)
            }
            AutomatonOp::WrapApproximant { automaton, n1, n, l } => {
                let m = automaton.build()?;
                let w = wrap_approximant(&m, n1)?;
                let measured = match n {
                    Some(n) => Some(dw_estimate(&automatic_seq(&m), &w.sequence, n, l.unwrap_or(n))?.value),
                    None => None,
                };
                let mut t = Table::new(&["n1", "period", "word", "bound_exact", "bound", "dw"]);
                t.push(cells![
                    n1,
                    w.approximant.period,
                    m.output_alphabet().render(&w.approximant.word),
                    &w.bound,
                    w.approximant.distance,
                    measured
                ]);
                Ok(t)
            }
        }
    }
}

type Polys = Vec<IntPolynomial>;

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum RecurrenceOp {
    Measure {
        system: SystemDesc,
        shifts: Vec<i64>,
    },
    Average {
        system: SystemDesc,
        polys: Polys,
        weight: SequenceDesc,
        scheme: SchemeDesc,
        #[serde(default)]
        k: Option<usize>,
        #[serde(default = "yes")]
        require_zero_constant: bool,
    },
    Divisibility {
        weight: SequenceDesc,
        u_max: u64,
        scheme: SchemeDesc,
        #[serde(default)]
        k: Option<usize>,
    },
    /// Every system against every polynomial family, each rescaled by
    /// `n ↦ s n` for `s` in `scales`; `cyclic_moduli` adds `ℤ/m, A = {0}`.
    Battery {
        weight: SequenceDesc,
        #[serde(default)]
        systems: Vec<SystemDesc>,
        #[serde(default)]
        cyclic_moduli: Vec<u64>,
        families: Vec<Polys>,
        #[serde(default = "unit_scale")]
        scales: Vec<i64>,
        scheme: SchemeDesc,
        #[serde(default)]
        k: Option<usize>,
    },
    /// `f` as `[h, re, im]` terms of `Σ c e(h x)`.
    OrbitAverage {
        system: SystemDesc,
        f: Vec<(i64, f64, f64)>,
        #[serde(default)]
        x0: f64,
        weight: SequenceDesc,
        scheme: SchemeDesc,
        #[serde(default)]
        k: Option<usize>,
    },
    CombinatorialDensity {
        set: SequenceDesc,
        polys: Polys,
        n: i64,
        cutoff: u64,
    },
    Intersectivity {
        set: SequenceDesc,
        polys: Polys,
        weight: SequenceDesc,
        size: usize,
        bound: u64,
        cutoff: u64,
    },
    UniformScan {
        system: SystemDesc,
        polys: Polys,
        s_max: u64,
        scheme: SchemeDesc,
        #[serde(default)]
        k: Option<usize>,
    },
}

fn unit_scale() -> Vec<i64> {
    vec![1]
}

impl RecurrenceOp {
    fn run(self, ctx: &Context) -> Out {
        match self {
            RecurrenceOp::Measure { system, shifts } => {
                let shifts: Vec<i128> = shifts.into_iter().map(i128::from).collect();
                let m = intersection_measure(&system.build()?, &shifts);
                let mut t = Table::new(&["exact", "value", "error"]);
                t.push(cells![m.exact.as_ref(), m.value, m.error]);
                Ok(t)
            }
            RecurrenceOp::Average {
                system,
                polys,
                weight,
                scheme,
                k,
                require_zero_constant,
            } => {
                let (s, k) = scheme.build(k)?;
                let avg = weighted_poly_multirec_average(
                    &system.build()?,
                    &polys,
                    &weight.build(ctx)?,
                    &s,
                    k,
                    require_zero_constant,
                )?;
                Ok(series(&avg))
            }
            RecurrenceOp::Divisibility { weight, u_max, scheme, k } => {
                let (s, k) = scheme.build(k)?;
                let d = divisibility_table(&weight.build(ctx)?, u_max, &s, k)?;
                let mut t = Table::new(&["u", "count", "density"]);
                for r in &d.rows {
                    t.push(cells![r.u, r.count, r.density]);
                }
                t.note("cutoff", d.cutoff);
                t.note("all_positive", d.all_positive);
                Ok(t)
            }
            RecurrenceOp::Battery {
                weight,
                systems,
                cyclic_moduli,
                families,
                scales,
                scheme,
                k,
            } => {
                let r = weight.build(ctx)?;
                let (s, k) = scheme.build(k)?;
                let mut built: Vec<RotationSystem> = systems.iter().map(SystemDesc::build).collect::<Result<_, _>>()?;
                for &m in &cyclic_moduli {
                    built.push(RotationSystem::cyclic(m, &[0])?);
                }
                if built.is_empty() || families.is_empty() || scales.is_empty() {
                    return Err(CliError::Config("battery needs systems, families and scales".into()));
                }
                let entries: Vec<BatteryEntry> = built
                    .iter()
                    .flat_map(|sys| {
                        families.iter().map(|f| BatteryEntry {
                            system: sys.clone(),
                            polys: f.clone(),
                        })
                    })
                    .collect();
                let report = recurrence_battery(&r, &entries, &s, k)?;
                let mut t = Table::new(&["system", "polys", "s", "cutoff", "value", "exact"]);
                for e in &entries {
                    for &sc in &scales {
                        let scaled: Polys = e.polys.iter().map(|p| p.precompose_scale(sc)).collect::<Result<_, _>>()?;
                        let avg = weighted_poly_multirec_average(&e.system, &scaled, &r, &s, k, true)?;
                        for (i, (&n, &v)) in avg.cutoffs.iter().zip(&avg.values).enumerate() {
                            t.push(cells![
                                e.system.label(),
                                join(&e.polys, "; "),
                                sc,
                                n,
                                v,
                                avg.exact.as_ref().map(|x| &x[i])
                            ]);
                        }
                    }
                }
                t.note("all_positive", report.all_positive);
                t.note("margin", report.margin);
                t.note("divisibility_consistent", report.consistent);
                Ok(t)
            }
            RecurrenceOp::OrbitAverage {
                system,
                f,
                x0,
                weight,
                scheme,
                k,
            } => {
                let (s, k) = scheme.build(k)?;
                let o = weighted_orbit_average(&system.circle()?, &trig(&f), x0, &weight.build(ctx)?, &s, k)?;
                let mut t = Table::new(&["cutoff", "re", "im", "abs"]);
                for (&n, &(re, im)) in o.cutoffs.iter().zip(&o.values) {
                    t.push(cells![n, re, im, re.hypot(im)]);
                }
                t.note("baseline", format!("{} {}", o.baseline.0, o.baseline.1));
                t.note("deviation", o.deviation());
                Ok(t)
            }
            RecurrenceOp::CombinatorialDensity { set, polys, n, cutoff } => {
                let d = combinatorial_intersection_density(&set.build(ctx)?, &polys, n.into(), cutoff)?;
                let mut t = Table::new(&["n", "cutoff", "density"]);
                t.push(cells![n, cutoff, d]);
                Ok(t)
            }
            RecurrenceOp::Intersectivity {
                set,
                polys,
                weight,
                size,
                bound,
                cutoff,
            } => {
                let w = finite_intersectivity_search(&set.build(ctx)?, &polys, &weight.build(ctx)?, size, bound, cutoff)?;
                let mut t = Table::new(&["found", "set", "count"]);
                t.push(cells![w.is_some(), w.as_ref().map(|w| join(&w.set, " ")), w.map(|w| w.count)]);
                Ok(t)
            }
            RecurrenceOp::UniformScan {
                system,
                polys,
                s_max,
                scheme,
                k,
            } => {
                let (sch, k) = scheme.build(k)?;
                let scan = uniform_recurrence_scan(&system.build()?, &polys, s_max, &sch, k)?;
                let mut t = Table::new(&["s", "tail", "exact"]);
                for (s, v, e) in &scan.rows {
                    t.push(cells![*s, *v, e.as_ref()]);
                }
                t.note("min", scan.min);
                Ok(t)
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum PszOp {
    /// `polys[i]` is the displacement `(p_{i,1}(n), ..., p_{i,u}(n))`.
    Search {
        grid: GridDesc,
        polys: Vec<Polys>,
        n_max: u64,
    },
    Census {
        side: u64,
        polys: Vec<Polys>,
        #[serde(default = "one")]
        n_min: u64,
        n_max: u64,
        #[serde(default)]
        eps: Option<f64>,
    },
}

impl PszOp {
    fn run(self) -> Out {
        match self {
            PszOp::Search { grid, polys, n_max } => {
                let g = grid.build()?;
                let w = finite_psz_search(&g, &polys, n_max)?;
                let mut t = Table::new(&["found", "n", "a"]);
                t.push(cells![w.is_some(), w.as_ref().map(|w| w.n), w.map(|w| join(&w.a, " "))]);
                t.note("points", g.len());
                Ok(t)
            }
            PszOp::Census {
                side,
                polys,
                n_min,
                n_max,
                eps,
            } => {
                let c = basic_arrangement_census(side, &polys, n_min..=n_max)?;
                let mut t = Table::new(&["count", "eps", "beta"]);
                t.push(cells![c.count(), eps, eps.and_then(|e| c.beta(e))]);
                Ok(t)
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum MobiusOp {
    /// `M(x)` at each point (default: `n` only).
    Mertens {
        n: u64,
        #[serde(default)]
        points: Option<Vec<u64>>,
    },
    Average {
        sequence: SequenceDesc,
        #[serde(default)]
        weighting: Option<WeightingDesc>,
        scheme: SchemeDesc,
        #[serde(default)]
        k: Option<usize>,
    },
    ProgressionSums {
        n: u64,
        q: u64,
    },
    Dirichlet {
        n: u64,
        q_max: u64,
    },
    /// Every pair of `h` and `m`.
    ShortInterval {
        sequence: SequenceDesc,
        #[serde(default)]
        weighting: Option<WeightingDesc>,
        h: Vec<u64>,
        m: Vec<u64>,
    },
    ExceptionalDensity {
        sequence: SequenceDesc,
        #[serde(default)]
        weighting: Option<WeightingDesc>,
        h: u64,
        delta: f64,
        n: u64,
    },
    Dyadic {
        sequence: SequenceDesc,
        #[serde(default)]
        weighting: Option<WeightingDesc>,
        h: u64,
        n: u64,
        depth: u32,
    },
}

fn weighted(seq: SequenceDesc, w: &Option<WeightingDesc>, ctx: &Context) -> Result<(Sequence, Weighting), CliError> {
    let x = seq.build(ctx)?;
    let w = weighting(w, x.alphabet())?;
    Ok((x, w))
}

impl MobiusOp {
    fn run(self, ctx: &Context) -> Out {
        match self {
            MobiusOp::Mertens { n, points } => {
                let table = mobius_sieve(n)?;
                let mut t = Table::new(&["x", "mertens", "ratio"]);
                for x in points.unwrap_or_else(|| vec![n]) {
                    if x == 0 || x > n {
                        return Err(CliError::Config(format!("point {x} outside [1, {n}]")));
                    }
                    let m = table.mertens(x);
                    t.push(cells![x, m, m as f64 / x as f64]);
                }
                Ok(t)
            }
            MobiusOp::Average {
                sequence,
                weighting,
                scheme,
                k,
            } => {
                let (x, w) = weighted(sequence, &weighting, ctx)?;
                let (s, k) = scheme.build(k)?;
                Ok(series(&weighted_mobius_average(&x, &w, &s, k)?))
            }
            MobiusOp::ProgressionSums { n, q } => {
                let sums = progression_mobius_sums(&mobius_sieve(n)?, q, n)?;
                let mut t = Table::new(&["residue", "sum", "normalized"]);
                for (r, s) in sums.iter().enumerate() {
                    t.push(cells![r, *s, *s as f64 / n as f64]);
                }
                Ok(t)
            }
            MobiusOp::Dirichlet { n, q_max } => {
                let rows = dirichlet_baseline(&mobius_sieve(n)?, q_max, n)?;
                let mut t = Table::new(&["q", "sup"]);
                for (q, v) in rows {
                    t.push(cells![q, v]);
                }
                Ok(t)
            }
            MobiusOp::ShortInterval {
                sequence,
                weighting,
                h,
                m,
            } => {
                let (x, w) = weighted(sequence, &weighting, ctx)?;
                let mut t = Table::new(&["h", "m", "value"]);
                for &hh in &h {
                    for &mm in &m {
                        t.push(cells![hh, mm, short_interval_double_average(&x, &w, hh, mm)?]);
                    }
                }
                Ok(t)
            }
            MobiusOp::ExceptionalDensity {
                sequence,
                weighting,
                h,
                delta,
                n,
            } => {
                let (x, w) = weighted(sequence, &weighting, ctx)?;
                let mut t = Table::new(&["h", "delta", "n", "density"]);
                t.push(cells![h, delta, n, short_interval_exceptional_density(&x, &w, h, delta, n)?]);
                Ok(t)
            }
            MobiusOp::Dyadic {
                sequence,
                weighting,
                h,
                n,
                depth,
            } => {
                let (x, w) = weighted(sequence, &weighting, ctx)?;
                let c = dyadic_check(&x, &w, h, n, depth)?;
                let mut t = Table::new(&["depth", "full", "combined", "bound", "holds"]);
                t.push(cells![c.depth, c.full, c.combined, c.bound, c.holds()]);
                Ok(t)
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum SpectrumOp {
    Coefficient {
        sequence: SequenceDesc,
        #[serde(default)]
        weighting: Option<WeightingDesc>,
        p: u64,
        q: u64,
        n: u64,
    },
    /// Coefficients above `floor` (default `3/√n`), largest first.
    Scan {
        sequence: SequenceDesc,
        #[serde(default)]
        weighting: Option<WeightingDesc>,
        q_max: u64,
        n: u64,
        #[serde(default)]
        floor: Option<f64>,
    },
    MassRatio {
        sequence: SequenceDesc,
        #[serde(default)]
        weighting: Option<WeightingDesc>,
        q_max: u64,
        n: u64,
    },
    Genericity {
        sequence: SequenceDesc,
        l_max: usize,
        scheme: SchemeDesc,
        #[serde(default)]
        k: Option<usize>,
    },
}

const COEFF_COLUMNS: [&str; 6] = ["p", "q", "re", "im", "abs", "n"];

fn coeff_row(t: &mut Table, c: &FourierBohrCoefficient) {
    t.push(cells![c.p, c.q, c.value.re, c.value.im, c.abs(), c.cutoff]);
}

impl SpectrumOp {
    fn run(self, ctx: &Context) -> Out {
        match self {
            SpectrumOp::Coefficient {
                sequence,
                weighting,
                p,
                q,
                n,
            } => {
                let (x, w) = weighted(sequence, &weighting, ctx)?;
                let mut t = Table::new(&COEFF_COLUMNS);
                coeff_row(&mut t, &fourier_bohr(&x, &w, p, q, n)?);
                Ok(t)
            }
            SpectrumOp::Scan {
                sequence,
                weighting,
                q_max,
                n,
                floor,
            } => {
                let (x, w) = weighted(sequence, &weighting, ctx)?;
                let floor = floor.unwrap_or_else(|| default_floor(n));
                let mut t = Table::new(&COEFF_COLUMNS);
                for c in rational_spectrum_scan(&x, &w, q_max, n, floor)? {
                    coeff_row(&mut t, &c);
                }
                t.note("floor", floor);
                Ok(t)
            }
            SpectrumOp::MassRatio {
                sequence,
                weighting,
                q_max,
                n,
            } => {
                let (x, w) = weighted(sequence, &weighting, ctx)?;
                let m = spectral_mass_ratio(&x, &w, q_max, n)?;
                let mut t = Table::new(&["q_max", "n", "mass", "energy", "ratio"]);
                t.push(cells![m.q_max, m.cutoff, m.mass, m.energy, m.ratio]);
                Ok(t)
            }
            SpectrumOp::Genericity {
                sequence,
                l_max,
                scheme,
                k,
            } => {
                let x = sequence.build(ctx)?;
                let (s, k) = scheme.build(k)?;
                let g = genericity_diagnostic(&x, l_max, &s, k)?;
                let mut t = Table::new(&["len", "from", "to", "distance"]);
                for row in &g.rows {
                    for (i, d) in row.distances.iter().enumerate() {
                        t.push(cells![row.len, g.cutoffs[i], g.cutoffs[i + 1], *d]);
                    }
                }
                Ok(t)
            }
        }
    }
}
