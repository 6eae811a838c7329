use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ratdyn_core::bfree::DEFAULT_IE_CAP;
use ratdyn_core::generators::squarefree_seq;
use ratdyn_core::*;

fn density(c: &mut Criterion) {
    let q = squarefree_seq();
    let s = SubseqScheme::single(1_000_000);
    c.bench_function("squarefree_density_1e6", |b| {
        b.iter(|| empirical_density(black_box(&q), &s, 1).unwrap().value)
    });
}

fn sieve(c: &mut Criterion) {
    c.bench_function("mobius_sieve_1e6", |b| b.iter(|| mobius_sieve(black_box(1_000_000)).unwrap().mertens(1_000_000)));
}

fn inclusion_exclusion(c: &mut Criterion) {
    let set = BSet::explicit(vec![4, 9, 25, 49, 121, 169, 289, 361, 529, 841, 961, 1369]).unwrap();
    c.bench_function("multiples_density_12_prime_squares", |b| {
        b.iter(|| multiples_density_exact(black_box(&set), DEFAULT_IE_CAP).unwrap().lcm_classes)
    });
}

fn spectrum(c: &mut Criterion) {
    let q = squarefree_seq();
    let w = Weighting::identity(q.alphabet());
    c.bench_function("spectral_mass_q36_1e5", |b| {
        b.iter(|| spectral_mass_ratio(black_box(&q), &w, 36, 100_000).unwrap().ratio)
    });
}

fn recurrence(c: &mut Criterion) {
    let r = squarefree_seq().shifted(1);
    let battery = cyclic_battery(2..=10, &[IntPolynomial::monomial(2)]).unwrap();
    let s = SubseqScheme::single(100_000);
    c.bench_function("battery_n2_mod_2_to_10_1e5", |b| {
        b.iter(|| recurrence_battery(black_box(&r), &battery, &s, 1).unwrap().margin)
    });
}

criterion_group! {
    name = kernels;
    config = Criterion::default().sample_size(10);
    targets = density, sieve, inclusion_exclusion, spectrum, recurrence
}
criterion_main!(kernels);
