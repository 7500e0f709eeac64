use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use symtomo::{
    catalog, linear_inversion, symmetric_basis, vqt_estimate, NumericPolicy, SolverOptions,
};
use symtomo_bench::{basis, photonic_record};

fn bench_symmetric_basis(c: &mut Criterion) {
    let mut group = c.benchmark_group("symmetric_basis");
    for (name, n) in [
        ("permutation", 3),
        ("permutation", 4),
        ("werner", 4),
        ("global_rotation_z", 4),
    ] {
        let spec = catalog(name, n).unwrap();
        group.bench_with_input(BenchmarkId::new(name, n), &spec, |b, spec| {
            b.iter(|| symmetric_basis(spec, &NumericPolicy::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_estimators(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate");
    group.sample_size(10);
    for (name, n) in [
        ("global_rotation_z", 3),
        ("permutation", 4),
        ("individual_rotation_z", 4),
    ] {
        let b = basis(name, n);
        let record = photonic_record(&b, 1);
        group.bench_function(BenchmarkId::new(format!("linear/{name}"), n), |bench| {
            bench.iter(|| linear_inversion(&record, &b).unwrap())
        });
        group.bench_function(BenchmarkId::new(format!("vqt/{name}"), n), |bench| {
            bench.iter(|| vqt_estimate(&record, &b, &SolverOptions::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_symmetric_basis, bench_estimators);
criterion_main!(benches);
