use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use wiener_bench::gaussian;
use wiener_core::calculus::{besov_norm, lp_norm, wiener_mass, BesovSpec};
use wiener_core::criteria::{evaluate, CriterionCase, CriterionId, Num};
use wiener_core::{DyadicPartition, WeightSpec};

fn norms(c: &mut Criterion) {
    let f = gaussian(1, 1 << 14);
    let part = DyadicPartition::for_grid(f.grid()).unwrap();
    let weight = WeightSpec::power(1.5);
    c.bench_function("lp_norm_weighted_2^14", |b| {
        b.iter(|| lp_norm(black_box(&f), 3.0, &weight).unwrap())
    });
    let spec = BesovSpec::homogeneous(1.0, 2.0, 2.0);
    c.bench_function("besov_homogeneous_2^14", |b| {
        b.iter(|| besov_norm(black_box(&f), &spec, &part).unwrap())
    });
    c.bench_function("wiener_mass_2^14", |b| b.iter(|| wiener_mass(black_box(&f), None)));
}

fn criteria(c: &mut Criterion) {
    let case = CriterionCase::new(CriterionId::ThmC, 3)
        .s(Num::int(2))
        .q(Num::ratio(4, 3))
        .r(Num::ratio(5, 2));
    c.bench_function("evaluate_thm_c", |b| b.iter(|| evaluate(black_box(&case))));
}

criterion_group!(benches, norms, criteria);
criterion_main!(benches);
