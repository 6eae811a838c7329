//! Symbolic sequences, rational almost periodicity and weighted multiple
//! recurrence, computed at finite scale.
//!
//! Sequences are 1-indexed. Parallel work is split into fixed chunks of
//! [`CHUNK`] positions and reduced in order, so results do not depend on
//! the number of worker threads.

pub mod arith;
pub mod automata;
pub mod bfree;
pub mod dynamics;
pub mod error;
pub mod generators;
pub mod metrics;
pub mod mobius;
pub mod seqcore;
pub mod spectrum;

pub use error::{Error, Result};
pub use seqcore::{
    cylinder_frequency, empirical_density, evaluate_window, word_statistics, Alphabet, AverageSeries, CylinderSpec,
    DensityReport, Exact, Sequence, SubseqScheme, Symbol, SymbolSource, Weighting, Word, CHUNK, EXACT_PERIOD_CAP,
};

pub use automata::{
    automatic_seq, find_synchronizing_word, is_synchronizing_word, synchronizing_residues, wrap_approximant,
    Automaton, SyncReport, WrapApproximant,
};
pub use bfree::{
    coprime_quotient_set, inner_regularity_check, is_taut_finite, log_density_estimate, multiples_density_exact,
    primitive_reduction, shift_divisibility_table, shifted_progression_density, truncation_density_curve, BRule, BSet,
    DensityDecomposition, Primitivity,
};
pub use dynamics::{
    basic_arrangement_census, combinatorial_intersection_density, cyclic_battery, divisibility_table,
    finite_intersectivity_search, finite_psz_search, recurrence_battery, uniform_recurrence_scan,
    weighted_orbit_average, weighted_poly_multirec_average, CircleSystem, CyclicSystem, Grid, IntPolynomial,
    PolyMatrix, RotationSystem, TrigPolynomial,
};
pub use metrics::{best_periodic_approx, db_estimate, dw_estimate, rap_profile, MetricEstimate, PeriodicApproximant};
pub use mobius::{
    dirichlet_baseline, dyadic_check, mobius_sieve, short_interval_double_average, short_interval_exceptional_density,
    weighted_mobius_average, MobiusTable,
};
pub use spectrum::{
    fourier_bohr, genericity_diagnostic, rational_spectrum_scan, spectral_mass_ratio, FourierBohrCoefficient,
    GenericityReport, SpectralMass,
};
