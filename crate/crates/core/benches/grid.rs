//! Criterion benchmarks: sequential vs data-parallel verification sweeps
//! and the arithmetic kernels that dominate them.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;

use mu_matrix::{
    log_truncation, mu_matrix, roots_of_unity_sum, run_checks, ExecMode, GridSpec, HeckeData,
};

fn bench_grid_modes(c: &mut Criterion) {
    let spec: GridSpec =
        serde_json::from_str(r#"{"p": [2, 3], "ap": [0, 1], "n_max": 3}"#).unwrap();
    let grid = spec.expand().unwrap();
    let mut group = c.benchmark_group("verify-grid");
    group.sample_size(10);
    for (label, mode) in [
        ("sequential", ExecMode::Sequential),
        ("parallel", ExecMode::Parallel),
    ] {
        group.bench_with_input(BenchmarkId::from_parameter(label), &mode, |b, &mode| {
            b.iter(|| {
                let report = run_checks(&grid, 0, mode);
                assert!(report.passed());
                report
            });
        });
    }
    group.finish();
}

fn bench_log_truncation(c: &mut Criterion) {
    let ctx = HeckeData::new(3, 0, 1).unwrap();
    let mut group = c.benchmark_group("log-truncation");
    for n in [3u32, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| log_truncation(&ctx, n).unwrap());
        });
    }
    group.finish();
}

fn bench_digit_product_sweep(c: &mut Criterion) {
    let ctx = HeckeData::new(3, 1, -1).unwrap();
    c.bench_function("digit-product-sweep-n4", |b| {
        b.iter(|| {
            let mut acc = 0usize;
            for r in 0..81i64 {
                if !mu_matrix(&ctx, &BigInt::from(r), 4).unwrap().is_zero() {
                    acc += 1;
                }
            }
            acc
        });
    });
}

fn bench_roots_sum(c: &mut Criterion) {
    let ctx = HeckeData::new(3, 0, 1).unwrap();
    let mut group = c.benchmark_group("roots-of-unity-sum");
    group.sample_size(10);
    group.bench_function("n3", |b| {
        b.iter(|| roots_of_unity_sum(&ctx, &BigInt::from(5), 3).unwrap());
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_grid_modes,
    bench_log_truncation,
    bench_digit_product_sweep,
    bench_roots_sum
);
criterion_main!(benches);
