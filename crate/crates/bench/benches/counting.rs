use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nbound::bounds::evaluate_potential;
use nbound::counter::{count_states, solve_levels, EffectivePotential};
use nbound::{build_pair, census, compute_functionals, RadialPotential};

fn functionals(c: &mut Criterion) {
    let pot = RadialPotential::yukawa(30.0, 1.0).unwrap();
    c.bench_function("functionals yukawa g=30", |b| b.iter(|| compute_functionals(black_box(&pot)).unwrap()));
    c.bench_function("bounds yukawa g=30", |b| b.iter(|| evaluate_potential(black_box(&pot)).unwrap()));
}

fn counting(c: &mut Criterion) {
    let pot = RadialPotential::yukawa(30.0, 1.0).unwrap();
    let eff = EffectivePotential::centrifugal(&pot, 0);
    c.bench_function("count s-wave yukawa g=30", |b| b.iter(|| count_states(black_box(&eff)).unwrap()));
    c.bench_function("census yukawa g=8", |b| {
        let pot = RadialPotential::yukawa(8.0, 1.0).unwrap();
        b.iter(|| census(black_box(&pot)).unwrap())
    });
    c.bench_function("levels hulthen g=5.2", |b| {
        let eff = EffectivePotential::centrifugal(&RadialPotential::hulthen(5.2, 1.0).unwrap(), 0);
        b.iter(|| solve_levels(black_box(&eff), usize::MAX).unwrap())
    });
}

fn susy(c: &mut Criterion) {
    let eff = EffectivePotential::centrifugal(&RadialPotential::yukawa(4.0, 1.0).unwrap(), 0);
    let mut group = c.benchmark_group("susy");
    group.sample_size(20);
    group.bench_function("partner yukawa g=4", |b| b.iter(|| build_pair(black_box(&eff)).unwrap()));
    group.finish();
}

criterion_group!(benches, functionals, counting, susy);
criterion_main!(benches);
