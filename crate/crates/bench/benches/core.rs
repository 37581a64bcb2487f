use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use polynet::fixtures::{mixed_rate_rep, three_source_rep};
use polynet::{
    build_network, construct_and_solve, search_linear, verify_solution, DiscretePolymatroid, Field,
    IntVector, Policy, SearchOptions,
};

fn polymatroid(c: &mut Criterion) {
    let rep = mixed_rate_rep();
    c.bench_function("rank table of a 5-element representation", |b| {
        b.iter(|| DiscretePolymatroid::from_representation(black_box(&rep)).unwrap())
    });
    let d = DiscretePolymatroid::from_representation(&rep).unwrap();
    c.bench_function("excluded vectors C_i, all i", |b| {
        b.iter(|| {
            (0..d.ground_set_size())
                .map(|i| d.c_set(i).unwrap().len())
                .sum::<usize>()
        })
    });
    c.bench_function("bases", |b| b.iter(|| d.bases().unwrap()));
}

fn construction(c: &mut Criterion) {
    let rep = mixed_rate_rep();
    let d = DiscretePolymatroid::from_representation(&rep).unwrap();
    let basis = IntVector::new(vec![2, 1, 1, 0, 0]);
    c.bench_function("build network", |b| {
        b.iter(|| build_network(&d, black_box(&basis), &Policy::Exhaustive).unwrap())
    });
    c.bench_function("construct and extract", |b| {
        b.iter(|| construct_and_solve(&rep, black_box(&basis), &Policy::Exhaustive).unwrap())
    });
    let s = construct_and_solve(&rep, &basis, &Policy::Exhaustive).unwrap();
    c.bench_function("verify solution", |b| {
        b.iter(|| verify_solution(&s.construction.network, black_box(&s.solution)).unwrap())
    });
}

fn search(c: &mut Criterion) {
    let d = DiscretePolymatroid::from_representation(&three_source_rep()).unwrap();
    let net = build_network(&d, &IntVector::new(vec![1, 1, 1, 0]), &Policy::Exhaustive)
        .unwrap()
        .network;
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    for (label, k, n) in [
        ("(1,1,1;1) none", [1, 1, 1], 1),
        ("(2,2,2;3) none", [2, 2, 2], 3),
    ] {
        group.bench_function(label, |b| {
            b.iter_batched(
                SearchOptions::default,
                |o| search_linear(&net, &k, n, Field::binary(), &o).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, polymatroid, construction, search);
criterion_main!(benches);
