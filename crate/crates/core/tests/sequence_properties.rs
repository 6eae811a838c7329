use proptest::prelude::*;

use ratdyn_core::automata::{padded_digits, reset_automaton};
use ratdyn_core::generators::{
    bfree_seq, periodic_seq, squarefree_seq, toeplitz_seq, totient_ratio_seq, ToeplitzRule,
};
use ratdyn_core::metrics::rap_profile_at;
use ratdyn_core::*;

fn binary_periodic(word: &[bool]) -> Sequence {
    periodic_seq(Alphabet::binary(), word.iter().map(|&b| b as Symbol).collect()).unwrap()
}

fn random_automaton(delta: &[(usize, usize)], outputs: &[bool]) -> Automaton {
    let s = delta.len();
    // digit 0 fixes q0 so leading zeros are harmless
    let table = delta
        .iter()
        .enumerate()
        .map(|(q, &(a, b))| vec![if q == 0 { 0 } else { a % s }, b % s])
        .collect();
    Automaton::binary(2, table, outputs.iter().map(|&b| b as Symbol).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn periodic_density_is_exact(word in prop::collection::vec(any::<bool>(), 1..40), n in 1u64..5000) {
        let x = binary_periodic(&word);
        let q = word.len() as u64;
        let ones = word.iter().filter(|&&b| b).count() as u64;
        let d = empirical_density(&x, &SubseqScheme::single(n), 1).unwrap();
        let exact = d.exact.unwrap();
        prop_assert_eq!(exact, Exact::new(ones.into(), q.into()));
        prop_assert!((d.empirical - ones as f64 / q as f64).abs() <= q as f64 / n as f64);
    }

    #[test]
    fn single_symbol_cylinder_is_density(word in prop::collection::vec(any::<bool>(), 1..30), seed in 0u64..1000, n in 1u64..4000) {
        for x in [binary_periodic(&word), Sequence::coin_flips(seed)] {
            let s = SubseqScheme::single(n);
            let cyl = CylinderSpec::new(vec![0], vec![1]).unwrap();
            let f = cylinder_frequency(&x, &cyl, &s, 1).unwrap();
            let d = empirical_density(&x, &s, 1).unwrap();
            prop_assert!((f - d.empirical).abs() <= 1.0 / n as f64);
        }
    }

    #[test]
    fn word_statistics_are_a_distribution(seed in 0u64..1000, len in 1usize..6, n in 1u64..3000) {
        let x = Sequence::coin_flips(seed);
        let stats = word_statistics(&x, len, &SubseqScheme::single(n), 1).unwrap();
        prop_assert!(stats.iter().all(|(_, f)| *f >= 0.0));
        let total: f64 = stats.iter().map(|(_, f)| f).sum();
        prop_assert!((total - 1.0).abs() <= 1.0 / n as f64);
    }

    #[test]
    fn totient_sets_grow_with_threshold(a in 0u64..=60, b in 0u64..=60, start in 1u64..100_000) {
        let (lo, hi) = (a.min(b), a.max(b));
        let small = totient_ratio_seq(lo, 60).unwrap().range(start, 500);
        let big = totient_ratio_seq(hi, 60).unwrap().range(start, 500);
        prop_assert!(small.iter().zip(&big).all(|(s, b)| s <= b));
    }

    #[test]
    fn totient_sets_are_closed_under_multiples(num in 1u64..60, n in 1u64..2000, m in 1u64..50) {
        let x = totient_ratio_seq(num, 60).unwrap();
        if x.at(n) == 1 && n * m <= 100_000 {
            prop_assert_eq!(x.at(n * m), 1);
        }
    }

    #[test]
    fn toeplitz_rules_hold_on_filled_positions(
        rules in prop::collection::vec((1u64..12, 0u64..12, 0u8..3), 1..5),
        start in 1u64..10_000,
    ) {
        let rules: Vec<ToeplitzRule> = rules
            .into_iter()
            .map(|(p, r, s)| ToeplitzRule { period: p, residue: r % p, symbol: s })
            .collect();
        let x = toeplitz_seq(Alphabet::new(["a", "b", "c"]).unwrap(), rules.clone(), 0).unwrap();
        let syms = x.range(start, 300);
        for (i, &s) in syms.iter().enumerate() {
            let n = start + i as u64;
            if let Some(r) = rules.iter().find(|r| n % r.period == r.residue) {
                prop_assert_eq!(s, r.symbol);
            }
        }
    }

    #[test]
    fn besicovitch_below_weyl(w1 in prop::collection::vec(any::<bool>(), 1..20), seed in 0u64..500, n in 10u64..3000) {
        let x = binary_periodic(&w1);
        let y = Sequence::coin_flips(seed);
        let db = db_estimate(&x, &y, &SubseqScheme::single(n), 1).unwrap();
        let dw = dw_estimate(&x, &y, n, 500).unwrap();
        prop_assert!(db.empirical <= dw.empirical + 2.0 / n as f64);
        prop_assert_eq!(db.empirical, db_estimate(&y, &x, &SubseqScheme::single(n), 1).unwrap().empirical);
    }

    #[test]
    fn flipping_a_residue_never_helps(word in prop::collection::vec(any::<bool>(), 1..60), q in 1u64..8) {
        let x = binary_periodic(&word);
        let n = word.len() as u64;
        let s = SubseqScheme::single(n);
        let best = best_periodic_approx(&x, q, &s, 1).unwrap();
        let base = (best.distance * n as f64).round() as i64;
        for i in 0..q as usize {
            let mut flipped = best.word.clone();
            flipped[i] ^= 1;
            let y = periodic_seq(Alphabet::binary(), flipped).unwrap();
            let d = (db_estimate(&x, &y, &s, 1).unwrap().empirical * n as f64).round() as i64;
            // residue i holds positions n ≡ i + 1; strict unless that class is tied
            let (mut ones, mut total) = (0, 0);
            for m in (i as u64 + 1..=n).step_by(q as usize) {
                total += 1;
                ones += word[(m - 1) as usize] as i64;
            }
            if 2 * ones == total {
                prop_assert!(d >= base);
            } else {
                prop_assert!(d > base);
            }
        }
    }

    #[test]
    fn shifted_wrap_sequences_keep_their_approximants(n1 in 1u32..4, shift in 0i64..40) {
        let m = reset_automaton(4);
        let x = automatic_seq(&m);
        let z = x.shifted(shift);
        let period = 2u64.pow(n1);
        let n = 40_000;
        let s = SubseqScheme::single(n);
        let dx = rap_profile_at(&x, &[period], &s, 1).unwrap()[0].1;
        let dz = rap_profile_at(&z, &[period], &s, 1).unwrap()[0].1;
        prop_assert!(dz <= dx + 2.0 * shift as f64 / n as f64 + 1e-12);
    }

    #[test]
    fn synchronizing_residues_fix_the_output(
        delta in prop::collection::vec((0usize..4, 0usize..4), 2..5),
        outputs in prop::collection::vec(any::<bool>(), 4),
        n1 in 1u32..5,
    ) {
        let m = random_automaton(&delta, &outputs[..delta.len()]);
        let a = automatic_seq(&m);
        let w = wrap_approximant(&m, n1).unwrap();
        let q = w.report.modulus();
        let prefix = a.prefix(10_000);
        for &r in &w.report.residues {
            let state = ratdyn_core::automata::run(&m, &padded_digits(r, 2, n1)).unwrap();
            let want = m.output(state);
            let mut n = if r == 0 { q } else { r };
            while n <= 10_000 {
                prop_assert_eq!(prefix[n as usize - 1], want);
                n += q;
            }
        }
        let est = dw_estimate(&a, &w.sequence, 5_000, 5_000).unwrap();
        prop_assert!(num::ToPrimitive::to_f64(&w.bound).unwrap() >= est.value - 2.0 / 5_000.0);
    }

    #[test]
    fn sync_fraction_is_monotone(states in 2usize..7) {
        let m = reset_automaton(states);
        let fr: Vec<Exact> = (1..=10).map(|n1| synchronizing_residues(&m, n1).unwrap().fraction).collect();
        prop_assert!(fr.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(num::ToPrimitive::to_f64(fr.last().unwrap()).unwrap() > 0.99);
    }
}

#[test]
fn prime_square_free_is_squarefree() {
    let n = 1_000_000;
    assert_eq!(bfree_seq(&BSet::prime_squares()).prefix(n), squarefree_seq().prefix(n));
}

#[test]
fn evaluation_is_deterministic_across_pools() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let q = squarefree_seq();
                let d = empirical_density(&q, &SubseqScheme::single(3_000_000), 1).unwrap();
                let w = Weighting::identity(q.alphabet());
                let s = spectral_mass_ratio(&q, &w, 12, 500_000).unwrap();
                let m = weighted_mobius_average(&q, &w, &SubseqScheme::single(2_000_000), 1).unwrap();
                (d.empirical.to_bits(), s.ratio.to_bits(), m.tail().to_bits())
            })
    };
    assert_eq!(run(1), run(4));
    assert_eq!(run(4), run(4));
}
