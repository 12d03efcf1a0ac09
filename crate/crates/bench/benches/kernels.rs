use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use shadowdrift::analysis::{bch_corrections, commutant_test};
use shadowdrift::models::{toy_model, ToyModel};
use shadowdrift::operator::{c, expm, HermitianOperator};
use shadowdrift::schemes::{strang_scheme, trotter_scheme, Propagator};
use shadowdrift::SchemeSpec;
use shadowdrift_bench::quartic_fixture;

fn bench_expm(c_: &mut Criterion) {
    let mut group = c_.benchmark_group("expm");
    for dim in [16, 64] {
        let split = toy_model(&ToyModel::RandomHermitian { seed: 1, dim }).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, _| {
            b.iter(|| {
                // fresh operator so the eigendecomposition is not cached
                let h = HermitianOperator::new(split.total().matrix().clone()).unwrap();
                expm(black_box(&h), c(0.0, -0.1)).unwrap()
            })
        });
    }
    group.finish();
}

fn bench_step(c_: &mut Criterion) {
    let mut group = c_.benchmark_group("propagator_step");
    for points in [16, 32] {
        let (split, psi) = quartic_fixture(points);
        for spec in [SchemeSpec::Strang, SchemeSpec::TripleJump { order: 4 }] {
            let prop = Propagator::new(&spec.build(2).unwrap(), &split, 0.02).unwrap();
            let id = BenchmarkId::new(prop.name().to_string(), points * points);
            group.bench_with_input(id, &points, |b, _| b.iter(|| prop.step(black_box(psi.amplitudes()))));
        }
    }
    group.finish();
}

fn bench_bch(c_: &mut Criterion) {
    let (split, _) = quartic_fixture(8);
    c_.bench_function("bch_corrections/trotter/64", |b| {
        b.iter(|| bch_corrections(&trotter_scheme(2).unwrap(), black_box(&split), 4).unwrap())
    });
    c_.bench_function("bch_corrections/strang/64", |b| {
        b.iter(|| bch_corrections(&strang_scheme(), black_box(&split), 4).unwrap())
    });
}

fn bench_commutant(c_: &mut Criterion) {
    let split = toy_model(&ToyModel::RandomHermitian { seed: 2, dim: 32 }).unwrap();
    let phi = HermitianOperator::new(split.part(0).matrix().clone()).unwrap();
    c_.bench_function("commutant_test/32", |b| {
        b.iter(|| commutant_test(black_box(&phi), split.total(), 1e-8).unwrap())
    });
}

criterion_group!(benches, bench_expm, bench_step, bench_bch, bench_commutant);
criterion_main!(benches);
