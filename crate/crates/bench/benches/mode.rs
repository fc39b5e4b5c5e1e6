use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use kgvac_bench::standard_spec;
use kgvac_core::{coeff_table, evolve_mode, ModeIndex};

fn coefficients(c: &mut Criterion) {
    let spec = standard_spec(2);
    let k = ModeIndex::new(&[3, -1]).unwrap();
    let mut g = c.benchmark_group("coeff_table");
    for tol in [1e-8, 1e-10] {
        g.bench_with_input(BenchmarkId::from_parameter(tol), &tol, |b, &tol| {
            b.iter(|| coeff_table(black_box(&k), 0.1, &spec, 0.3, tol).unwrap().at(0.3))
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let spec = standard_spec(1);
    let mut g = c.benchmark_group("evolve_mode");
    for hbar in [0.4, 0.1, 0.025] {
        let k = ModeIndex::new(&[1]).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(hbar), &hbar, |b, &hbar| {
            b.iter(|| evolve_mode(black_box(&k), hbar, &spec, 1.0, 1e-11).unwrap().vacuum_probability())
        });
    }
    g.finish();
}

criterion_group!(benches, coefficients, oracle);
criterion_main!(benches);
