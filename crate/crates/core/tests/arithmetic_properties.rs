use num::{BigInt, BigRational, One};
use proptest::prelude::*;

use ratdyn_core::arith::{gcd, lcm};
use ratdyn_core::bfree::{is_taut_finite, shift_divisibility_table, shifted_progression_density, DEFAULT_IE_CAP};
use ratdyn_core::dynamics::CyclicSystem;
use ratdyn_core::generators::{periodic_seq, squarefree_seq};
use ratdyn_core::mobius::{dyadic_check, mobius_sieve};
use ratdyn_core::*;

fn primitive(mut els: Vec<u64>) -> Vec<u64> {
    els.sort_unstable();
    els.dedup();
    let copy = els.clone();
    els.retain(|&a| !copy.iter().any(|&b| b != a && a % b == 0));
    els
}

fn q(n: u64, d: u64) -> Exact {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn finite_sets_are_never_behrend(els in prop::collection::vec(2u64..200, 1..10)) {
        let d = multiples_density_exact(&BSet::explicit(els).unwrap(), DEFAULT_IE_CAP).unwrap();
        prop_assert!(d.value < BigRational::one());
    }

    #[test]
    fn coprime_progressions_split_evenly(els in prop::collection::vec(2u64..40, 1..6), u in 2u64..30) {
        let els: Vec<u64> = els.into_iter().filter(|&b| gcd(b, u) == 1).collect();
        prop_assume!(!els.is_empty());
        let set = BSet::explicit(els.clone()).unwrap();
        let free = BigRational::one() - multiples_density_exact(&set, DEFAULT_IE_CAP).unwrap().value;
        let want = &free / BigRational::from_integer(BigInt::from(u));
        for a in 0..u {
            let got = shifted_progression_density(&set, a, u, 1, DEFAULT_IE_CAP).unwrap();
            prop_assert_eq!(&got.exact, &want);
        }
    }

    #[test]
    fn taut_shift_verdict_is_membership(els in prop::collection::vec(2u64..25, 1..5), r in 1u64..=100) {
        let els = primitive(els);
        let set = BSet::explicit(els.clone()).unwrap();
        prop_assume!(is_taut_finite(&set, DEFAULT_IE_CAP).unwrap().taut);
        let table = shift_divisibility_table(&set, r, 30, DEFAULT_IE_CAP).unwrap();
        prop_assert_eq!(table.divisible, !set.has_multiple(r));
    }

    #[test]
    fn rotations_preserve_measure(moduli in prop::collection::vec(2u64..7, 1..3), n in -50i128..50) {
        let full = RotationSystem::Cyclic(CyclicSystem::full(moduli.clone()).unwrap());
        prop_assert_eq!(dynamics::intersection_measure(&full, &[n]).exact.unwrap(), BigRational::one());
        let pts: Vec<Vec<u64>> = vec![moduli.iter().map(|_| 0).collect(), moduli.iter().map(|m| m - 1).collect()];
        let sys = RotationSystem::Cyclic(CyclicSystem::product(moduli, &pts).unwrap());
        let RotationSystem::Cyclic(c) = &sys else { unreachable!() };
        prop_assert_eq!(dynamics::intersection_measure(&sys, &[0]).exact.unwrap(), c.measure());
        // invariance gives μ(A ∩ T^{-n}A) = μ(T^{n}A ∩ A)
        prop_assert_eq!(
            dynamics::intersection_measure(&sys, &[n]).exact.unwrap(),
            dynamics::intersection_measure(&sys, &[-n]).exact.unwrap()
        );
    }

    #[test]
    fn unweighted_linear_average_is_inverse_square(m in 2u64..30, reps in 1u64..40) {
        let sys = RotationSystem::cyclic(m, &[0]).unwrap();
        let all = Sequence::constant_binary(true);
        let s = SubseqScheme::single(m * reps);
        let avg = weighted_poly_multirec_average(&sys, &[IntPolynomial::identity()], &all, &s, 1, true).unwrap();
        prop_assert_eq!(avg.exact.unwrap()[0].clone(), q(1, m * m));
    }

    #[test]
    fn cyclic_averages_repeat_with_the_period(
        m in 2u64..12,
        word in prop::collection::vec(any::<bool>(), 1..8),
        n in 20u64..2000,
    ) {
        let r = periodic_seq(Alphabet::binary(), word.iter().map(|&b| b as Symbol).collect()).unwrap();
        let sys = RotationSystem::cyclic(m, &[0, 1]).unwrap();
        let period = lcm(m, word.len() as u64).unwrap();
        let s = SubseqScheme::explicit(vec![n, n + period], "pair").unwrap();
        let avg = weighted_poly_multirec_average(&sys, &[IntPolynomial::monomial(2)], &r, &s, 2, true).unwrap();
        prop_assert!((avg.values[0] - avg.values[1]).abs() <= period as f64 / n as f64);
    }

    #[test]
    fn failing_divisibility_has_a_zero_system(word in prop::collection::vec(any::<bool>(), 1..10)) {
        prop_assume!(word.iter().any(|&b| b));
        let r = periodic_seq(Alphabet::binary(), word.iter().map(|&b| b as Symbol).collect()).unwrap();
        let q = word.len() as u64;
        let s = SubseqScheme::single(q * 10 * 12);
        let table = divisibility_table(&r, 10, &s, 1).unwrap();
        let battery = cyclic_battery(1..=10, &[IntPolynomial::identity()]).unwrap();
        let rep = recurrence_battery(&r, &battery, &s, 1).unwrap();
        for (row, div) in rep.rows.iter().zip(&table.rows) {
            // at a multiple of every period the averages are exact limits
            prop_assert_eq!(row.positive, div.count > 0);
        }
        prop_assert!(rep.consistent);
    }

    #[test]
    fn psz_search_matches_grid_oracle(
        cells in prop::collection::vec(any::<bool>(), 36),
        rows in prop::collection::vec((0i64..3, 0i64..2, 0i64..3, 0i64..2), 1..3),
    ) {
        let side = 6u64;
        let pts: Vec<Vec<u64>> = (0..36u64)
            .filter(|&i| cells[i as usize])
            .map(|i| vec![i / side + 1, i % side + 1])
            .collect();
        let grid = Grid::from_points(2, side, &pts).unwrap();
        // rows of (a n + b n^2, c n + d n^2)
        let polys: PolyMatrix = rows
            .iter()
            .map(|&(a, b, c, d)| {
                vec![
                    IntPolynomial::from_power(&[0, a, b]).unwrap(),
                    IntPolynomial::from_power(&[0, c, d]).unwrap(),
                ]
            })
            .collect();
        let found = finite_psz_search(&grid, &polys, 6).unwrap();
        let inside = |x: i64, y: i64| (1..=6).contains(&x) && (1..=6).contains(&y) && cells[((x - 1) * 6 + y - 1) as usize];
        let oracle = (1..=6i64).find_map(|n| {
            pts.iter().find(|p| {
                let (x, y) = (p[0] as i64, p[1] as i64);
                rows.iter().all(|&(a, b, c, d)| inside(x + a * n + b * n * n, y + c * n + d * n * n))
            })
            .map(|p| (n as u64, p.clone()))
        });
        prop_assert_eq!(found.map(|w| (w.n, w.a)), oracle);
    }

    #[test]
    fn spectral_mass_obeys_bessel(word in prop::collection::vec(0u8..3, 1..50), q_max in 1u64..15, n in 1u64..400) {
        let x = periodic_seq(Alphabet::new(["a", "b", "c"]).unwrap(), word).unwrap();
        let w = Weighting::Symbols(vec![1.0, -2.0, 0.5]);
        let m = spectral_mass_ratio(&x, &w, q_max, n).unwrap();
        prop_assert!(m.ratio <= 1.0 + 4.0 * (q_max * q_max) as f64 / n as f64);
    }

    #[test]
    fn conjugate_frequencies_match(seed in 0u64..100, q in 3u64..20, n in 1u64..5000) {
        let x = Sequence::coin_flips(seed);
        let w = Weighting::identity(x.alphabet());
        for p in (1..q).filter(|&p| gcd(p, q) == 1) {
            let a = fourier_bohr(&x, &w, p, q, n).unwrap();
            let b = fourier_bohr(&x, &w, q - p, q, n).unwrap();
            prop_assert_eq!(a.value, b.value.conj());
        }
    }
}

#[test]
fn mu_squared_is_the_squarefree_indicator() {
    let n = 1_000_000;
    let table = mobius_sieve(n).unwrap();
    let q = squarefree_seq().prefix(n);
    assert!((1..=n).all(|m| table.get(m).unsigned_abs() == q[m as usize - 1]));
    assert_eq!(table.get(1), 1);
    assert!((1..=n).all(|m| table.get(m) != 0 || !ratdyn_core::arith::is_squarefree(m)));
}

#[test]
fn dyadic_blocks_track_the_full_average() {
    let x = squarefree_seq();
    let w = Weighting::identity(x.alphabet());
    for depth in 1..=10 {
        let c = dyadic_check(&x, &w, 20, 100_000, depth).unwrap();
        assert!(c.holds(), "depth {depth}: {c:?}");
    }
}

#[test]
fn zero_energy_has_no_ratio() {
    let z = Sequence::constant_binary(false);
    assert!(spectral_mass_ratio(&z, &Weighting::identity(z.alphabet()), 3, 10).is_err());
}
